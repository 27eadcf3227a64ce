"""Field-level comparison of two manifest sets."""

from __future__ import annotations

from collections.abc import Iterator
from typing import Any

from chaoscycle.core.enums import ReconfigOpKind
from chaoscycle.core.records import ChangeSet
from chaoscycle.core.records import FieldDifference
from chaoscycle.core.records import FileChange
from chaoscycle.core.records import ReconfigOp
from chaoscycle.core.records import Reconfiguration
from chaoscycle.core.resources import ManifestSet


def _join(prefix: str, key: str) -> str:
    return f"{prefix}.{key}" if prefix else key


def _diff_tree(old: Any, new: Any, prefix: str) -> Iterator[FieldDifference]:
    if isinstance(old, dict) and isinstance(new, dict):
        for key in sorted(set(old) | set(new), key=str):
            path = _join(prefix, str(key))
            if key not in old:
                yield FieldDifference(field=path, old=None, new=new[key])
            elif key not in new:
                yield FieldDifference(field=path, old=old[key], new=None)
            else:
                yield from _diff_tree(old[key], new[key], path)
    elif isinstance(old, list) and isinstance(new, list):
        for index in range(max(len(old), len(new))):
            path = f"{prefix}[{index}]"
            if index >= len(old):
                yield FieldDifference(field=path, old=None, new=new[index])
            elif index >= len(new):
                yield FieldDifference(field=path, old=old[index], new=None)
            else:
                yield from _diff_tree(old[index], new[index], path)
    elif old != new:
        yield FieldDifference(field=prefix, old=old, new=new)


def diff_documents(old: tuple[dict[str, Any], ...], new: tuple[dict[str, Any], ...]) -> tuple[FieldDifference, ...]:
    if len(old) == 1 and len(new) == 1:
        return tuple(_diff_tree(old[0], new[0], ""))
    return tuple(_diff_tree(list(old), list(new), "docs"))


def diff_manifest_sets(old: ManifestSet, new: ManifestSet) -> ChangeSet:
    """Paths added, removed and modified between two sets, ordered by path."""
    before = old.structure()
    after = new.structure()
    added = tuple(sorted(set(after) - set(before)))
    removed = tuple(sorted(set(before) - set(after)))
    modified = []
    for path in sorted(set(before) & set(after)):
        differences = diff_documents(before[path], after[path])
        if differences:
            modified.append(FileChange(path=path, differences=differences))
    return ChangeSet(added=added, removed=removed, modified=tuple(modified))


def reconfiguration_from_changeset(changes: ChangeSet, new: ManifestSet) -> Reconfiguration:
    """The reconfiguration that turns the diff's left-hand set into ``new``."""
    ops = [ReconfigOp(op=ReconfigOpKind.DELETE, path=path) for path in changes.removed]
    ops += [ReconfigOp(op=ReconfigOpKind.REPLACE, path=c.path, text=new.texts[c.path]) for c in changes.modified]
    ops += [ReconfigOp(op=ReconfigOpKind.CREATE, path=path, text=new.texts[path]) for path in changes.added]
    return Reconfiguration(ops=tuple(ops), rationale="derived from manifest diff")


def describe_changes(changes: ChangeSet) -> str:
    """Plain-text rendering used in agent prompts."""
    if changes.is_empty:
        return "no changes"
    lines = [f"added {path}" for path in changes.added]
    lines += [f"removed {path}" for path in changes.removed]
    for change in changes.modified:
        lines.extend(
            f"modified {change.path}: {difference.field}: {difference.old!r} -> {difference.new!r}"
            for difference in change.differences
        )
    return "\n".join(lines)

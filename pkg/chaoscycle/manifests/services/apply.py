from __future__ import annotations

import logging

from chaoscycle.core.enums import ReconfigOpKind
from chaoscycle.core.loaders import build_manifest_set
from chaoscycle.core.records import Reconfiguration
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.skaffold import regenerate_deploy_config
from chaoscycle.core.values import format_selector

logger = logging.getLogger(__name__)


def dangling_selector_warnings(manifest_set: ManifestSet) -> tuple[str, ...]:
    return tuple(
        f"DanglingSelector: {service.id} selector {format_selector(service.selector)} matches no pod template"
        for service in manifest_set.dangling_services()
    )


def apply_reconfiguration(current: ManifestSet, reconf: Reconfiguration) -> ManifestSet:
    """Apply Replace/Create/Delete ops; created files go after the existing ones."""
    reconf.check_against(current)
    replaced = {op.path: op.text for op in reconf.ops if op.op == ReconfigOpKind.REPLACE}
    deleted = {op.path for op in reconf.ops if op.op == ReconfigOpKind.DELETE}

    files = [(path, replaced.get(path, text)) for path, text in current.texts.items() if path not in deleted]
    files += [(op.path, op.text) for op in reconf.ops if op.op == ReconfigOpKind.CREATE]

    paths = [path for path, _ in files]
    deploy_config = current.deploy_config
    if paths != list(current.paths):
        deploy_config = regenerate_deploy_config(current.deploy_config, paths, current.deploy_config_path)

    result = build_manifest_set(files, deploy_config, current.deploy_config_path)
    warnings = dangling_selector_warnings(result)
    for warning in warnings:
        logger.warning(warning)
    if warnings:
        result = result.model_copy(update={"warnings": warnings})
    logger.info("Applied %d reconfiguration ops, %d files now deployed", len(reconf.ops), len(paths))
    return result

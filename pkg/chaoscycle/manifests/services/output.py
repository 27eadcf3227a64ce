"""Writing a manifest set back to disk as a deployable project folder."""

from __future__ import annotations

import logging
from pathlib import Path

from chaoscycle.core.exceptions import ChaosCycleError
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.skaffold import deploy_config_paths
from chaoscycle.core.skaffold import regenerate_deploy_config

logger = logging.getLogger(__name__)


def output_deploy_config(manifest_set: ManifestSet) -> str:
    """The set's deploy config, regenerated unless it already lists exactly its files in order."""
    paths = list(manifest_set.paths)
    try:
        if deploy_config_paths(manifest_set.deploy_config, paths, manifest_set.deploy_config_path) == paths:
            return manifest_set.deploy_config
    except ChaosCycleError:
        logger.info("Deploy config no longer matches the manifests, regenerating it")
    return regenerate_deploy_config(manifest_set.deploy_config, paths, manifest_set.deploy_config_path)


def write_output_folder(manifest_set: ManifestSet, destination: Path) -> list[Path]:
    """Write every manifest file plus the deploy config; returns the written paths."""
    destination = Path(destination)
    if destination.exists() and any(destination.iterdir()):
        msg = f"Output folder {destination} is not empty"
        raise FileExistsError(msg)
    destination.mkdir(parents=True, exist_ok=True)

    written = []
    files = [*manifest_set.texts.items(), (manifest_set.deploy_config_path, output_deploy_config(manifest_set))]
    for relative, text in files:
        target = destination / relative
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8", newline="")
        written.append(target)
    logger.info("Wrote %d files to %s", len(written), destination)
    return written

"""Reproducibility manifests written beside every command output.

A manifest snapshots the command, its flags, input checksums and output
checksums; re-running the recorded command with the same inputs reproduces
the outputs byte-for-byte. Manifests contain no wall-clock data so they are
themselves reproducible.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from . import _kernels


def file_sha256(path: Path | str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fp:
        for chunk in iter(lambda: fp.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(
    command: str,
    args: dict,
    inputs: dict[str, Path | str],
    outputs: dict[str, Path | str],
    **extra,
) -> dict:
    from . import __version__

    manifest = {
        "tool": "frtsim",
        "version": __version__,
        "kernel": _kernels.default_backend(),
        "command": command,
        "args": args,
        "inputs": {
            name: {"path": str(p), "sha256": file_sha256(p)} for name, p in inputs.items()
        },
        "outputs": {
            name: {"path": str(p), "sha256": file_sha256(p)} for name, p in outputs.items()
        },
    }
    manifest.update(extra)
    return manifest


def write_manifest(path: Path | str, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(manifest, fp, indent=2, sort_keys=True)
        fp.write("\n")

"""Run manifests: every CLI output is accompanied by a JSON record of the
resolved parameters, tool version and platform fingerprint.

The manifest digest covers (tool, version, subcommand, parameters) only, so
replaying a manifest -- even into a different output directory -- must
reproduce byte-identical delimited output on the same platform.
"""

from __future__ import annotations

import hashlib
import json
import platform
import sys
from pathlib import Path

import numpy
import scipy

from . import __version__

SCHEMA_VERSION = 1


def platform_fingerprint() -> dict:
    return {
        "python": sys.version.split()[0],
        "implementation": platform.python_implementation(),
        "os": platform.platform(),
        "machine": platform.machine(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
    }


def manifest_digest(manifest: dict) -> str:
    """sha256 over the reproducibility-relevant manifest core."""
    core = {
        "tool": manifest["tool"],
        "version": manifest["version"],
        "subcommand": manifest["subcommand"],
        "parameters": manifest["parameters"],
    }
    blob = json.dumps(core, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def build_manifest(subcommand: str, parameters: dict,
                   inputs: dict | None = None,
                   outputs: dict | None = None) -> dict:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "tool": "stwpa",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": parameters,
        "inputs": inputs or {},
        "outputs": outputs or {},
        "platform": platform_fingerprint(),
    }
    manifest["digest"] = manifest_digest(manifest)
    return manifest


def write_manifest(path, manifest: dict) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path) -> dict:
    with Path(path).open("r", encoding="utf-8") as fh:
        return json.load(fh)

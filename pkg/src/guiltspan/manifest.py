"""Run manifests: enough provenance to reproduce any artifact-producing run."""

from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .io import sha256_file, write_json


def emit_manifest(
    out_path: str | Path,
    command: str,
    config: dict,
    inputs: dict[str, str | Path],
    seeds: dict[str, int] | None = None,
    outputs: dict[str, str | Path] | None = None,
) -> Path:
    """Write `<out_path>` describing one command run.

    Timestamps are the only non-reproducible fields; everything else is a
    pure function of (command, config, inputs).
    """
    manifest = {
        "command": command,
        "config": config,
        "inputs": {
            name: {"path": str(p), "sha256": sha256_file(p)}
            for name, p in inputs.items()
            if p is not None and Path(p).is_file()
        },
        "outputs": {name: str(p) for name, p in (outputs or {}).items()},
        "seeds": dict(seeds or {}),
        "tool_version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    out_path = Path(out_path)
    write_json(out_path, manifest)
    return out_path

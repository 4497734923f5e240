"""Epoch-boundary checkpoints: one directory per epoch plus a sha256 manifest."""

from __future__ import annotations

import hashlib
import json
import os

FORMAT = "molforge-checkpoint"
VERSION = 1
MANIFEST = "MANIFEST.json"


class IntegrityError(ValueError):
    """Checkpoint missing files, truncated, tampered with or from another version."""


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_checkpoint(directory: str, files: dict[str, str]) -> str:
    """Write ``files`` (name -> text) and a manifest; returns the directory."""
    os.makedirs(directory, exist_ok=True)
    for name, text in files.items():
        with open(os.path.join(directory, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    manifest = {
        "format": FORMAT,
        "version": VERSION,
        "files": {name: _sha256(os.path.join(directory, name)) for name in sorted(files)},
    }
    tmp = os.path.join(directory, MANIFEST + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, os.path.join(directory, MANIFEST))
    return directory


def read_checkpoint(directory: str) -> dict[str, str]:
    """Verify the manifest and return every listed file's text."""
    path = os.path.join(directory, MANIFEST)
    try:
        with open(path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        raise IntegrityError(f"no manifest in {directory}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise IntegrityError(f"corrupted manifest: {e}") from None
    if not isinstance(manifest, dict) or manifest.get("format") != FORMAT:
        raise IntegrityError("not a checkpoint manifest")
    if manifest.get("version") != VERSION:
        raise IntegrityError(f"checkpoint version {manifest.get('version')} != {VERSION}")
    files = manifest.get("files")
    if not isinstance(files, dict) or not files:
        raise IntegrityError("manifest lists no files")
    out = {}
    for name, digest in sorted(files.items()):
        fp = os.path.join(directory, name)
        if not os.path.exists(fp):
            raise IntegrityError(f"checkpoint file missing: {name}")
        if _sha256(fp) != digest:
            raise IntegrityError(f"checksum mismatch for {name}")
        with open(fp, encoding="utf-8") as fh:
            out[name] = fh.read()
    return out


def latest_checkpoint(root: str) -> str | None:
    if not os.path.isdir(root):
        return None
    epochs = sorted(d for d in os.listdir(root) if d.startswith("epoch_"))
    return os.path.join(root, epochs[-1]) if epochs else None

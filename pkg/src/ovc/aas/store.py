"""On-disk layout of a repository.

::

    <dir>/shells/<b64url(id)>.json
    <dir>/submodels/<b64url(id)>.json
    <dir>/blobs/<b64url(submodel id)>/<idShortPath>.<digest>.bin

Every file is written to a temporary name and renamed into place.  Blob
names carry a content digest, so the submodel document switches from old to
new attachments in a single rename; stale blobs are pruned afterwards.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import TYPE_CHECKING, Any

from .model import (
    AasError,
    FileElement,
    MalformedEntity,
    Shell,
    Submodel,
    element_from_dict,
    element_to_dict,
    shell_from_dict,
    shell_to_dict,
    submodel_to_dict,
    validate_submodel,
)

if TYPE_CHECKING:
    from .repository import Repository

SHELLS = "shells"
SUBMODELS = "submodels"
BLOBS = "blobs"


class IoFailure(AasError):
    pass


class CorruptStore(AasError):
    def __init__(self, path: Path, reason: str) -> None:
        self.path = path
        super().__init__(f"corrupt store file {path}: {reason}")


def encode_id(identifier: str) -> str:
    return base64.urlsafe_b64encode(identifier.encode("utf-8")).decode("ascii").rstrip("=")


def decode_id(encoded: str) -> str:
    padded = encoded + "=" * (-len(encoded) % 4)
    return base64.urlsafe_b64decode(padded.encode("ascii")).decode("utf-8")


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _dump(doc: Any) -> bytes:
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _blob_name(element: FileElement) -> str:
    digest = hashlib.sha256(element.attachment).hexdigest()[:16]
    return f"{element.id_short}.{digest}.bin"


def write_shell(root: Path, shell: Shell) -> None:
    try:
        _atomic_write(root / SHELLS / f"{encode_id(shell.id)}.json", _dump(shell_to_dict(shell)))
    except OSError as exc:
        raise IoFailure(f"cannot write shell {shell.id!r} to {root}: {exc}") from exc


def write_submodel(root: Path, sm: Submodel) -> None:
    blob_dir = root / BLOBS / encode_id(sm.id)
    doc = submodel_to_dict(sm)
    keep = set()
    try:
        for element, element_doc in zip(sm.elements, doc["submodelElements"]):
            if isinstance(element, FileElement):
                name = _blob_name(element)
                keep.add(name)
                element_doc["blob"] = f"{BLOBS}/{encode_id(sm.id)}/{name}"
                target = blob_dir / name
                if not target.exists():
                    _atomic_write(target, element.attachment)
        _atomic_write(root / SUBMODELS / f"{encode_id(sm.id)}.json", _dump(doc))
        if blob_dir.is_dir():
            for stale in blob_dir.iterdir():
                if stale.name not in keep:
                    stale.unlink()
    except OSError as exc:
        raise IoFailure(f"cannot write submodel {sm.id!r} to {root}: {exc}") from exc


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_bytes())
    except json.JSONDecodeError as exc:
        raise CorruptStore(path, f"not valid JSON ({exc})") from exc
    except UnicodeDecodeError as exc:
        raise CorruptStore(path, "not UTF-8") from exc
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _read_submodel(root: Path, path: Path) -> Submodel:
    doc = _read_json(path)
    try:
        elements = []
        for element_doc in doc["submodelElements"]:
            attachment = b""
            if element_doc.get("modelType") == "File":
                blob_path = root / element_doc["blob"]
                try:
                    attachment = blob_path.read_bytes()
                except FileNotFoundError:
                    raise CorruptStore(path, f"missing attachment {blob_path}") from None
                if len(attachment) != element_doc["size"]:
                    raise CorruptStore(blob_path, f"expected {element_doc['size']} bytes, found {len(attachment)}")
            elements.append(element_from_dict(element_doc, attachment))
        sm = Submodel(doc["id"], doc["idShort"], tuple(elements), doc.get("semanticId"))
        validate_submodel(sm)
    except (KeyError, TypeError, MalformedEntity) as exc:
        raise CorruptStore(path, f"unexpected document structure ({exc})") from exc
    return sm


def _read_shell(path: Path) -> Shell:
    try:
        return shell_from_dict(_read_json(path))
    except MalformedEntity as exc:
        raise CorruptStore(path, str(exc)) from exc


def load_repository(persistence_dir: Path | str) -> Repository:
    """Load a repository from ``persistence_dir``; a missing or empty
    directory gives an empty repository bound to it."""
    from .repository import Repository

    root = Path(persistence_dir)
    shells, submodels = {}, {}
    if (root / SHELLS).is_dir():
        for path in sorted((root / SHELLS).glob("*.json")):
            shell = _read_shell(path)
            shells[shell.id] = shell
    if (root / SUBMODELS).is_dir():
        for path in sorted((root / SUBMODELS).glob("*.json")):
            sm = _read_submodel(root, path)
            submodels[sm.id] = sm
    return Repository._from_state(root, shells, submodels)


def serialize_repository(repo: Repository, persistence_dir: Path | str) -> None:
    """Write every entity of ``repo`` under ``persistence_dir`` and drop
    documents of entities ``repo`` no longer holds."""
    root = Path(persistence_dir)
    shells, submodels = repo.shells(), repo.submodels()
    for shell in shells:
        write_shell(root, shell)
    for sm in submodels:
        write_submodel(root, sm)
    wanted = {
        SHELLS: {f"{encode_id(s.id)}.json" for s in shells},
        SUBMODELS: {f"{encode_id(s.id)}.json" for s in submodels},
        BLOBS: {encode_id(s.id) for s in submodels},
    }
    try:
        for sub, names in wanted.items():
            folder = root / sub
            if not folder.is_dir():
                continue
            for entry in folder.iterdir():
                if entry.name in names:
                    continue
                if entry.is_dir():
                    for blob in entry.iterdir():
                        blob.unlink()
                    entry.rmdir()
                elif entry.suffix in (".json", ".bin"):
                    entry.unlink()
    except OSError as exc:
        raise IoFailure(f"cannot prune {root}: {exc}") from exc

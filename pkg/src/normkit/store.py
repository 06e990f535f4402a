"""File-backed document storage.

One JSON file per document under a data directory.  Writes go through a
temp file in the same directory followed by ``os.replace``, so readers
always see a complete file.  Every stored document carries a revision
counter that increases by one per write; updates must name the revision
they were based on and fail with ``stale_revision`` when it no longer
matches.
"""

import json
import os
import re
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

from .documents import Document, DocumentError, document_from_jsonable, document_jsonable

# ids double as file names, so keep them to one path segment
_ID_PATTERN = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]{0,127}\Z")

NOT_FOUND = "not_found"
STALE_REVISION = "stale_revision"
ALREADY_EXISTS = "already_exists"
ID_ERROR = "id_error"


class StoreError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class StoredDocument:
    document: Document
    revision: int
    created_at: str
    updated_at: str


def stored_jsonable(sd: StoredDocument) -> dict:
    return {
        "revision": sd.revision,
        "createdAt": sd.created_at,
        "updatedAt": sd.updated_at,
        "document": document_jsonable(sd.document),
    }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def check_id(doc_id: str) -> str:
    if not isinstance(doc_id, str) or not _ID_PATTERN.match(doc_id):
        raise StoreError(
            ID_ERROR,
            "document ids must be letters, digits, '.', '_' or '-', "
            "start with a letter or digit, and stay under 128 characters")
    return doc_id


class DocumentStore:
    """Documents on disk, one ``<id>.json`` per document."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._mutex = threading.Lock()
        self._locks: Dict[str, threading.Lock] = {}

    def _lock(self, doc_id: str) -> threading.Lock:
        with self._mutex:
            return self._locks.setdefault(doc_id, threading.Lock())

    def _path(self, doc_id: str) -> Path:
        return self.root / (check_id(doc_id) + ".json")

    def _read(self, doc_id: str) -> StoredDocument:
        try:
            with open(self._path(doc_id), encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise StoreError(NOT_FOUND, f"no document {doc_id!r}") from None
        except json.JSONDecodeError as e:
            raise DocumentError("structure_error",
                                f"corrupt store file for {doc_id!r}: {e}")
        doc = document_from_jsonable(data["document"])
        if doc.id != doc_id:
            raise DocumentError(
                "structure_error",
                f"store file {doc_id!r} holds document id {doc.id!r}")
        return StoredDocument(doc, int(data["revision"]),
                              data["createdAt"], data["updatedAt"])

    def _write(self, sd: StoredDocument) -> None:
        path = self._path(sd.document.id)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(stored_jsonable(sd), fh, indent=1)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def list_ids(self) -> List[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))

    def list_documents(self) -> List[StoredDocument]:
        return [self.load(i) for i in self.list_ids()]

    def load(self, doc_id: str) -> StoredDocument:
        with self._lock(doc_id):
            return self._read(doc_id)

    def create(self, document: Document) -> StoredDocument:
        with self._lock(document.id):
            if self._path(document.id).exists():
                raise StoreError(ALREADY_EXISTS,
                                 f"document {document.id!r} already exists")
            now = _now()
            sd = StoredDocument(document, 1, now, now)
            self._write(sd)
            return sd

    def save(self, document: Document,
             expected_revision: int) -> StoredDocument:
        """Replace a stored document, checking it has not moved on."""
        with self._lock(document.id):
            current = self._read(document.id)
            if current.revision != expected_revision:
                raise StoreError(
                    STALE_REVISION,
                    f"document {document.id!r} is at revision "
                    f"{current.revision}, not {expected_revision}")
            sd = StoredDocument(document, current.revision + 1,
                                current.created_at, _now())
            self._write(sd)
            return sd

    def delete(self, doc_id: str) -> None:
        with self._lock(doc_id):
            try:
                os.unlink(self._path(doc_id))
            except FileNotFoundError:
                raise StoreError(NOT_FOUND, f"no document {doc_id!r}") from None

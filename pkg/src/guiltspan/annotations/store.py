"""Append-only JSONL session log.

Each session is one line, appended with a single O_APPEND write, so
concurrent writers interleave whole records and a crash never leaves a
partial one. Reads snapshot the file at call time.
"""

import threading
from pathlib import Path

from ..io import append_jsonl_atomic, read_jsonl
from .types import Annotation, Session


class SessionStore:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, session: Session) -> None:
        with self._lock:
            append_jsonl_atomic(self.path, session.to_dict())

    def load_sessions(self) -> list[Session]:
        if not self.path.exists():
            return []
        return [Session.from_dict(d) for d in read_jsonl(self.path)]

    def load_annotations(self) -> list[Annotation]:
        return [a for s in self.load_sessions() for a in s.annotations]

    def session_ids(self) -> set[str]:
        return {s.session_id for s in self.load_sessions()}

    def __len__(self) -> int:
        return len(self.load_sessions())

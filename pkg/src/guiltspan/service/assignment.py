"""Session assignment: coverage-first story sampling and attention checks.

Stories are sampled least-annotated-first (seeded random tie-break) among
those the participant has never seen, so the at-least-5-annotations
coverage target is reached as fast as possible. Every state change is
appended to disk before it is acknowledged; startup replays the logs.
"""

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ..annotations.store import SessionStore
from ..annotations.types import Session
from ..corpus.types import Story
from ..io import append_jsonl_atomic, read_jsonl

QUESTION_KINDS = ("reader_perception", "author_belief", "attention_check")
STORIES_PER_SESSION = 5


@dataclass
class AttentionCheck:
    prompt: str
    expected_side: str  # "above_half" | "below_half"


def make_attention_check(story: Story, rng: np.random.Generator) -> AttentionCheck:
    """Template question with analytically known truth polarity."""
    n_words = len(story.body.split())
    if rng.random() < 0.5:
        threshold = max(1, n_words // 2)
        return AttentionCheck(
            prompt=f"How likely is it that this story contains more than {threshold} words?",
            expected_side="above_half",
        )
    threshold = n_words * 2 + 5
    return AttentionCheck(
        prompt=f"How likely is it that this story contains more than {threshold} words?",
        expected_side="below_half",
    )


@dataclass
class StoryTask:
    story: Story
    question_order: list[str]
    attention_check: AttentionCheck

    def to_payload(self) -> dict:
        return {
            "story_id": self.story.id,
            "title": self.story.title,
            "body": self.story.body,
            "question_order": list(self.question_order),
            "attention_check": {
                "prompt": self.attention_check.prompt,
                "expected_side": self.attention_check.expected_side,
            },
        }


@dataclass
class OpenAssignment:
    session_id: str
    participant_id: str
    tasks: list[StoryTask]
    issued_at: str
    seed: int

    def to_payload(self) -> dict:
        return {
            "session_id": self.session_id,
            "participant_id": self.participant_id,
            "stories": [t.to_payload() for t in self.tasks],
            "issued_at": self.issued_at,
            "seed": self.seed,
        }


class CorpusExhausted(Exception):
    """No eligible stories remain for this participant."""


class UnknownParticipant(KeyError):
    pass


@dataclass
class AssignmentManager:
    stories: list[Story]
    data_dir: Path
    seed: int = 0
    store: SessionStore = field(init=False)
    _lock: threading.RLock = field(init=False, default_factory=threading.RLock)

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.story_by_id = {s.id: s for s in self.stories}
        self.store = SessionStore(self.data_dir / "sessions.jsonl")
        self.participants: set[str] = set()
        self.open_assignments: dict[str, OpenAssignment] = {}
        self.open_by_participant: dict[str, str] = {}
        self.seen: dict[str, set[str]] = {}
        self.annotation_counts: dict[str, int] = {s.id: 0 for s in self.stories}
        self.submitted_sessions: set[str] = set()
        self._assignments_issued = 0
        self._replay()

    # -- persistence -------------------------------------------------------

    @property
    def _participants_path(self) -> Path:
        return self.data_dir / "participants.jsonl"

    @property
    def _assignments_path(self) -> Path:
        return self.data_dir / "assignments.jsonl"

    def _replay(self) -> None:
        if self._participants_path.exists():
            for rec in read_jsonl(self._participants_path):
                self.participants.add(rec["participant_id"])
        assignments: dict[str, OpenAssignment] = {}
        if self._assignments_path.exists():
            for rec in read_jsonl(self._assignments_path):
                tasks = [
                    StoryTask(
                        story=self.story_by_id[t["story_id"]],
                        question_order=t["question_order"],
                        attention_check=AttentionCheck(
                            t["attention_check"]["prompt"],
                            t["attention_check"]["expected_side"],
                        ),
                    )
                    for t in rec["stories"]
                ]
                assignments[rec["session_id"]] = OpenAssignment(
                    session_id=rec["session_id"],
                    participant_id=rec["participant_id"],
                    tasks=tasks,
                    issued_at=rec["issued_at"],
                    seed=rec["seed"],
                )
                self.seen.setdefault(rec["participant_id"], set()).update(
                    t["story_id"] for t in rec["stories"]
                )
                self._assignments_issued += 1
        for session in self.store.load_sessions():
            self.submitted_sessions.add(session.session_id)
            for sid in session.story_ids:
                if sid in self.annotation_counts:
                    self.annotation_counts[sid] += 1
        for session_id, assignment in assignments.items():
            if session_id not in self.submitted_sessions:
                self.open_assignments[session_id] = assignment
                self.open_by_participant[assignment.participant_id] = session_id

    # -- API operations ----------------------------------------------------

    def register_participant(self) -> str:
        with self._lock:
            pid = f"p-{uuid.uuid4().hex[:12]}"
            self.participants.add(pid)
            append_jsonl_atomic(self._participants_path, {"participant_id": pid})
            return pid

    def assign_session(self, participant_id: str) -> OpenAssignment:
        with self._lock:
            if participant_id not in self.participants:
                raise UnknownParticipant(participant_id)
            open_id = self.open_by_participant.get(participant_id)
            if open_id:
                return self.open_assignments[open_id]

            seen = self.seen.get(participant_id, set())
            eligible = [s for s in self.stories if s.id not in seen]
            if len(eligible) < STORIES_PER_SESSION:
                raise CorpusExhausted(participant_id)

            draw_seed = self.seed + self._assignments_issued
            rng = np.random.default_rng(draw_seed)
            # Least-annotated-first; ties broken by a seeded random key.
            tie = {s.id: rng.random() for s in eligible}
            eligible.sort(key=lambda s: (self.annotation_counts[s.id], tie[s.id]))
            chosen = eligible[:STORIES_PER_SESSION]

            tasks = []
            for story in chosen:
                order = list(QUESTION_KINDS)
                rng.shuffle(order)
                tasks.append(
                    StoryTask(
                        story=story,
                        question_order=order,
                        attention_check=make_attention_check(story, rng),
                    )
                )
            assignment = OpenAssignment(
                session_id=f"sess-{uuid.uuid4().hex[:12]}",
                participant_id=participant_id,
                tasks=tasks,
                issued_at=datetime.now(timezone.utc).isoformat(),
                seed=draw_seed,
            )
            # Persist before returning; a crash after this line only leaves
            # an open assignment, which replay restores.
            append_jsonl_atomic(self._assignments_path, assignment.to_payload())
            self._assignments_issued += 1
            self.open_assignments[assignment.session_id] = assignment
            self.open_by_participant[participant_id] = assignment.session_id
            self.seen.setdefault(participant_id, set()).update(s.id for s in chosen)
            return assignment

    def get_open(self, session_id: str) -> OpenAssignment | None:
        with self._lock:
            return self.open_assignments.get(session_id)

    def accept_submission(self, assignment: OpenAssignment, session: Session) -> None:
        with self._lock:
            if session.session_id in self.submitted_sessions:
                raise ValueError("duplicate")
            self.store.append(session)  # atomic single-line append
            self.submitted_sessions.add(session.session_id)
            del self.open_assignments[assignment.session_id]
            self.open_by_participant.pop(assignment.participant_id, None)
            for sid in session.story_ids:
                if sid in self.annotation_counts:
                    self.annotation_counts[sid] += 1

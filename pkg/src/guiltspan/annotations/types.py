"""Annotation records: sessions, per-question responses, aggregated targets.

Sliders are stored normalized to [0,1] (the collection UI's 0-100 scale is
divided by 100 at ingestion). A response is either a slider value or a
"doesn't apply" opt-out, never both.
"""

from dataclasses import dataclass, field
from enum import Enum


class Question(str, Enum):
    READER_PERCEPTION = "reader_perception"
    AUTHOR_BELIEF = "author_belief"
    ATTENTION_CHECK = "attention_check"


# The two guilt questions; attention checks never contribute to targets.
GUILT_QUESTIONS = (Question.READER_PERCEPTION, Question.AUTHOR_BELIEF)


@dataclass(frozen=True, order=True)
class Highlight:
    char_start: int
    char_end: int

    def __post_init__(self):
        if not (0 <= self.char_start < self.char_end):
            raise ValueError(f"bad highlight interval ({self.char_start}, {self.char_end})")

    def to_list(self) -> list[int]:
        return [self.char_start, self.char_end]


@dataclass
class Annotation:
    """One participant's response to one question on one story."""

    story_id: str
    question: Question
    slider: float | None  # in [0,1]; None iff doesnt_apply
    doesnt_apply: bool
    highlights: list[Highlight]
    participant_id: str
    session_id: str

    def __post_init__(self):
        if self.doesnt_apply:
            if self.slider is not None:
                raise ValueError("doesnt_apply response carries no slider value")
            if self.highlights:
                raise ValueError("doesnt_apply response carries no highlights")
        else:
            if self.slider is None:
                raise ValueError("response needs a slider value or doesnt_apply")
            if not (0.0 <= self.slider <= 1.0):
                raise ValueError(f"slider {self.slider} outside [0,1]")

    def to_dict(self) -> dict:
        return {
            "story_id": self.story_id,
            "question": self.question.value,
            "slider": self.slider,
            "doesnt_apply": self.doesnt_apply,
            "highlights": [h.to_list() for h in self.highlights],
            "participant_id": self.participant_id,
            "session_id": self.session_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Annotation":
        return cls(
            story_id=str(d["story_id"]),
            question=Question(d["question"]),
            slider=d.get("slider"),
            doesnt_apply=bool(d.get("doesnt_apply", False)),
            highlights=[Highlight(h[0], h[1]) for h in d.get("highlights", [])],
            participant_id=str(d["participant_id"]),
            session_id=str(d["session_id"]),
        )


@dataclass(frozen=True)
class ControlResponse:
    expected_side: str  # "above_half" | "below_half"
    slider: float       # in [0,1]

    def is_erroneous(self) -> bool:
        # Exactly 0.5 counts as erroneous: not clearly on the correct side.
        if self.expected_side == "above_half":
            return self.slider <= 0.5
        if self.expected_side == "below_half":
            return self.slider >= 0.5
        raise ValueError(f"unknown expected_side {self.expected_side!r}")


@dataclass
class Session:
    """One complete submission: five stories, three questions each."""

    session_id: str
    participant_id: str
    story_ids: list[str]
    annotations: list[Annotation]
    duration_minutes: float
    control_responses: list[ControlResponse]
    self_report: str  # "ok" | "confused_or_incorrect"
    native_language: str
    demographics: dict | None = None
    submitted_at: str = ""  # ISO timestamp; orders repeat-story exclusion

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "participant_id": self.participant_id,
            "story_ids": list(self.story_ids),
            "annotations": [a.to_dict() for a in self.annotations],
            "duration_minutes": self.duration_minutes,
            "control_responses": [
                {"expected_side": c.expected_side, "slider": c.slider}
                for c in self.control_responses
            ],
            "self_report": self.self_report,
            "native_language": self.native_language,
            "demographics": self.demographics,
            "submitted_at": self.submitted_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        return cls(
            session_id=str(d["session_id"]),
            participant_id=str(d["participant_id"]),
            story_ids=[str(s) for s in d["story_ids"]],
            annotations=[Annotation.from_dict(a) for a in d["annotations"]],
            duration_minutes=float(d["duration_minutes"]),
            control_responses=[
                ControlResponse(c["expected_side"], float(c["slider"]))
                for c in d["control_responses"]
            ],
            self_report=d["self_report"],
            native_language=d["native_language"],
            demographics=d.get("demographics"),
            submitted_at=d.get("submitted_at", ""),
        )


@dataclass
class AggregatedStory:
    """Model targets for one story: mean rating and per-token highlight rates."""

    story_id: str
    mean_rating: dict[str, float] = field(default_factory=dict)   # question -> mean
    n_ratings: dict[str, int] = field(default_factory=dict)       # question -> count
    token_target: dict[str, list[float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "story_id": self.story_id,
            "mean_rating": dict(sorted(self.mean_rating.items())),
            "n_ratings": dict(sorted(self.n_ratings.items())),
            "token_target": {k: list(v) for k, v in sorted(self.token_target.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AggregatedStory":
        return cls(
            story_id=str(d["story_id"]),
            mean_rating={k: float(v) for k, v in d["mean_rating"].items()},
            n_ratings={k: int(v) for k, v in d["n_ratings"].items()},
            token_target={k: [float(x) for x in v] for k, v in d["token_target"].items()},
        )

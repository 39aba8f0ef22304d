"""Deterministic synthetic corpus with a planted rationale signal.

Thirty short crime-style stories built from a graded cue vocabulary: each
cue type has a fixed salience level k in 1..8, every annotator with index
below k highlights every occurrence of that type, and the story's true
rating is an affine function of the mean per-token highlight proportion.
Token targets are therefore noiseless and carry exactly the information
needed to predict ratings, which is what makes the joint-objective
advantage testable at desk scale. A few deliberately rejectable archive
entries and excludable sessions exercise the filtering and exclusion
paths. Used by CI and the CLI walkthrough, so real data never enters the
test suite.
"""

from dataclasses import dataclass, field

import numpy as np

from ..annotations.types import Annotation, ControlResponse, Highlight, Question, Session
from ..corpus.scrub import scrub_text
from ..corpus.tokenize import tokenize_with_offsets
from ..corpus.types import RawStory
from ..io import write_jsonl

N_ANNOTATORS = 8

# Cue vocabulary: salience level = how many of the 8 annotators highlight
# every occurrence. The aggregated token target for a cue of level k is
# exactly k/8; filler tokens are never highlighted.
CUE_TYPES = (
    "confessed", "convicted", "admitted", "eyewitness", "testified", "charged",
    "indicted", "sentenced", "guilty", "weapon", "fingerprints", "footage",
    "allegedly", "reportedly", "unverified", "denies", "rumored", "speculated",
    "unconfirmed", "disputed", "presumably", "supposedly", "doubtful", "uncertain",
)
CUE_LEVELS = {w: 1 + (i % N_ANNOTATORS) for i, w in enumerate(CUE_TYPES)}
CUE_WEIGHTS = {w: lvl / N_ANNOTATORS for w, lvl in CUE_LEVELS.items()}

# True rating = RATING_BASE + RATING_SLOPE * mean per-token highlight target.
RATING_BASE = 0.1
RATING_SLOPE = 6.0
AB_SHIFT = -0.04  # author-belief sliders sit slightly below reader perception

_FILLERS = (
    "police officers responded late evening near downtown district residents "
    "reported vehicle parked outside local store owner called department "
    "investigation continues officials said incident occurred around corner "
    "neighborhood witnesses described scene area authorities searched building"
).split()

STORIES_PER_SESSION = 5


@dataclass
class FixtureTruth:
    """Ground truth for one story: the planted rating and cue positions."""

    story_id: str
    rating: float
    cue_token_indices: list[int] = field(default_factory=list)
    cue_levels: list[int] = field(default_factory=list)  # aligned with indices

    def token_targets(self, n_tokens: int) -> list[float]:
        out = [0.0] * n_tokens
        for j, lvl in zip(self.cue_token_indices, self.cue_levels):
            out[j] = lvl / N_ANNOTATORS
        return out

    def to_dict(self) -> dict:
        return {
            "story_id": self.story_id,
            "rating": self.rating,
            "cue_token_indices": list(self.cue_token_indices),
            "cue_levels": list(self.cue_levels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FixtureTruth":
        return cls(
            story_id=str(d["story_id"]),
            rating=float(d["rating"]),
            cue_token_indices=[int(x) for x in d["cue_token_indices"]],
            cue_levels=[int(x) for x in d["cue_levels"]],
        )


def _clip01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _build_story(rng: np.random.Generator, k: int) -> tuple[RawStory, FixtureTruth]:
    n_cues = int(rng.integers(3, 9))
    cues = [CUE_TYPES[i] for i in rng.integers(0, len(CUE_TYPES), n_cues)]
    n_filler = int(rng.integers(40, 45))
    words = [str(_FILLERS[i]) for i in rng.integers(0, len(_FILLERS), n_filler)]
    positions = sorted(rng.choice(len(words) + 1, size=len(cues), replace=False))
    for offset, (pos, cue) in enumerate(zip(positions, cues)):
        words.insert(pos + offset, cue)
    body = (
        "Suspect arrested after a reported crime, and officials say the "
        "accused faces alleged criminal charges. " + " ".join(words) + "."
    )
    assert scrub_text(body) == body
    sid = f"story-{k:03d}"
    raw = RawStory(
        id=sid,
        title=f"Fixture report {k:03d}",
        body=body,
        community=f"Town {k % 6}",
        published=f"2019-{(k % 12) + 1:02d}-{(k % 27) + 1:02d}",
    )
    tokens = tokenize_with_offsets(body)
    surf = [t.surface.lower() for t in tokens]
    cue_idx = [j for j, w in enumerate(surf) if w in CUE_LEVELS]
    levels = [CUE_LEVELS[surf[j]] for j in cue_idx]
    mean_target = sum(lvl / N_ANNOTATORS for lvl in levels) / len(tokens)
    rating = _clip01(RATING_BASE + RATING_SLOPE * mean_target)
    return raw, FixtureTruth(sid, rating, cue_idx, levels)


def generate_fixture(
    n_stories: int = 30, seed: int = 7, with_rejects: bool = True
) -> tuple[list[RawStory], list[Session], list[FixtureTruth]]:
    if n_stories % STORIES_PER_SESSION != 0:
        raise ValueError("story count must be a multiple of the session size")
    rng = np.random.default_rng(seed)

    archive: list[RawStory] = []
    truths: list[FixtureTruth] = []
    for k in range(n_stories):
        raw, truth = _build_story(rng, k)
        archive.append(raw)
        truths.append(truth)

    if with_rejects:
        long_body = archive[0].body + " pad" * 400
        archive.append(RawStory(id="junk-long", title="Too long", body=long_body))
        archive.append(RawStory(id="junk-stems", title="No stems", body="Quiet day in town today."))
        archive.append(
            RawStory(id="junk-dup", title="Fixture report 000", body=archive[0].body,
                     published="2020-01-01")
        )
        archive.append(
            RawStory(
                id="junk-log",
                title="Weekly blotter",
                body=(
                    "12/01/2019 - Suspect arrested for alleged criminal accusations.\n"
                    "12/02/2019 - Another arrest of an accused criminal suspect.\n"
                    "12/03/2019 - Alleged crime reported; suspect arrested again.\n"
                ),
            )
        )

    truth_by_id = {t.story_id: t for t in truths}
    body_by_id = {s.id: s.body for s in archive}

    sessions: list[Session] = []
    story_ids = [t.story_id for t in truths]
    assignment = story_ids * N_ANNOTATORS
    n_sessions = len(assignment) // STORIES_PER_SESSION
    da_counter = 0
    for s in range(n_sessions):
        pid = f"fixture-p{s:03d}"
        sess_id = f"fixture-s{s:03d}"
        annotator_index = s // (n_stories // STORIES_PER_SESSION)  # 0..7 per coverage pass
        batch = assignment[s * STORIES_PER_SESSION : (s + 1) * STORIES_PER_SESSION]
        annotations: list[Annotation] = []
        controls: list[ControlResponse] = []
        for sid in batch:
            truth = truth_by_id[sid]
            tokens = tokenize_with_offsets(body_by_id[sid])
            cue_level_at = dict(zip(truth.cue_token_indices, truth.cue_levels))
            for q in (Question.READER_PERCEPTION, Question.AUTHOR_BELIEF):
                shift = 0.0 if q is Question.READER_PERCEPTION else AB_SHIFT
                da = False
                if q is Question.AUTHOR_BELIEF:
                    # Deterministic sparse opt-outs: at most one per story.
                    da_counter += 1
                    da = da_counter % 37 == 0
                if da:
                    annotations.append(Annotation(sid, q, None, True, [], pid, sess_id))
                    continue
                slider = _clip01(truth.rating + shift + float(rng.normal(0, 0.05)))
                hls = [
                    Highlight(tok.char_start, tok.char_end)
                    for j, tok in enumerate(tokens)
                    if annotator_index < cue_level_at.get(j, 0)
                ]
                annotations.append(
                    Annotation(sid, q, round(slider, 4), False, hls, pid, sess_id)
                )
            check_high = bool(rng.random() < 0.5)
            expected = "above_half" if check_high else "below_half"
            slider = 0.9 + 0.05 * rng.random() if check_high else 0.05 * rng.random()
            annotations.append(
                Annotation(sid, Question.ATTENTION_CHECK, round(float(slider), 4), False,
                           [], pid, sess_id)
            )
            controls.append(ControlResponse(expected, round(float(slider), 4)))
        sessions.append(
            Session(
                session_id=sess_id,
                participant_id=pid,
                story_ids=batch,
                annotations=annotations,
                duration_minutes=round(float(rng.uniform(8, 20)), 2),
                control_responses=controls,
                self_report="ok",
                native_language="English",
                demographics={"age": int(rng.integers(20, 60)), "gender": None},
                submitted_at=f"2020-02-{(s % 28) + 1:02d}T10:00:00",
            )
        )

    if with_rejects:
        base = sessions[0]
        def clone(sess_id, pid, **overrides):
            fields = dict(
                session_id=sess_id,
                participant_id=pid,
                story_ids=base.story_ids,
                annotations=[
                    Annotation(a.story_id, a.question, a.slider, a.doesnt_apply,
                               list(a.highlights), pid, sess_id)
                    for a in base.annotations
                ],
                duration_minutes=12.0,
                control_responses=base.control_responses,
                self_report="ok",
                native_language="English",
                demographics=None,
                submitted_at="2020-03-01T10:00:00",
            )
            fields.update(overrides)
            return Session(**fields)

        sessions.append(clone("fixture-bad-fast", "fixture-bad-p0", duration_minutes=2.0))
        sessions.append(
            clone(
                "fixture-bad-ctrl", "fixture-bad-p1",
                control_responses=[ControlResponse("above_half", 0.1)] * 3
                + [ControlResponse("above_half", 0.9)] * 2,
                submitted_at="2020-03-02T10:00:00",
            )
        )

    return archive, sessions, truths


def write_fixture(out_dir, n_stories: int = 30, seed: int = 7) -> dict:
    """Write archive/sessions/truth JSONL files; returns the written paths."""
    from pathlib import Path

    out = Path(out_dir)
    archive, sessions, truths = generate_fixture(n_stories=n_stories, seed=seed)
    paths = {
        "archive": out / "archive.jsonl",
        "sessions": out / "sessions.jsonl",
        "truth": out / "truth.jsonl",
    }
    write_jsonl(paths["archive"], (s.to_dict() for s in archive))
    write_jsonl(paths["sessions"], (s.to_dict() for s in sessions))
    write_jsonl(paths["truth"], (t.to_dict() for t in truths))
    return {k: str(v) for k, v in paths.items()}

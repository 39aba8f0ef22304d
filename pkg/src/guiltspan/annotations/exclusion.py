"""Participant- and story-level exclusion rules.

Sessions are dropped whole when the participant self-reports problems, is
not a native English speaker, rushed the task, or failed too many control
questions. Individual annotations are additionally dropped when the
participant had already seen the story in an earlier session. Stories are
dropped when too many annotators opted out of a guilt question.
"""

from dataclasses import dataclass, field

from .types import GUILT_QUESTIONS, Annotation, Session

MIN_DURATION_MINUTES = 3.5
MAX_CONTROL_ERRORS = 2        # more than this -> excluded
DOESNT_APPLY_THRESHOLD = 0.30  # strictly more than this fraction -> story excluded


@dataclass
class ExclusionLedger:
    sessions_in: int = 0
    sessions_kept: int = 0
    malformed: int = 0
    self_report: int = 0
    non_native: int = 0
    too_fast: int = 0
    control_errors: int = 0
    repeat_story_annotations: int = 0
    annotations_kept: int = 0
    stories_in: int = 0
    stories_kept: int = 0
    story_doesnt_apply: dict[str, int] = field(default_factory=dict)
    story_no_annotations: int = 0

    def to_dict(self) -> dict:
        return {
            "sessions_in": self.sessions_in,
            "sessions_kept": self.sessions_kept,
            "malformed": self.malformed,
            "self_report": self.self_report,
            "non_native": self.non_native,
            "too_fast": self.too_fast,
            "control_errors": self.control_errors,
            "repeat_story_annotations": self.repeat_story_annotations,
            "annotations_kept": self.annotations_kept,
            "stories_in": self.stories_in,
            "stories_kept": self.stories_kept,
            "story_doesnt_apply": dict(sorted(self.story_doesnt_apply.items())),
            "story_no_annotations": self.story_no_annotations,
        }


def _is_malformed(session: Session) -> bool:
    if len(session.story_ids) != 5:
        return True
    if len(set(session.story_ids)) != len(session.story_ids):
        return True
    for ann in session.annotations:
        if ann.story_id not in session.story_ids:
            return True
    return False


def exclude_participants(
    sessions: list[Session],
    min_duration: float = MIN_DURATION_MINUTES,
    max_control_errors: int = MAX_CONTROL_ERRORS,
    ledger: ExclusionLedger | None = None,
) -> tuple[list[Session], ExclusionLedger]:
    """Apply session-level exclusion rules, first matching rule counted.

    Returned sessions have repeat-story annotations stripped; repeat order
    follows (submitted_at, session_id) per participant.
    """
    led = ledger or ExclusionLedger()
    led.sessions_in = len(sessions)

    passed: list[Session] = []
    for s in sessions:
        if _is_malformed(s):
            led.malformed += 1
        elif s.self_report != "ok":
            led.self_report += 1
        elif s.native_language.strip().lower() != "english":
            led.non_native += 1
        elif s.duration_minutes < min_duration:
            led.too_fast += 1
        elif sum(c.is_erroneous() for c in s.control_responses) > max_control_errors:
            led.control_errors += 1
        else:
            passed.append(s)

    # Drop annotations for stories the participant saw in an earlier session.
    passed.sort(key=lambda s: (s.participant_id, s.submitted_at, s.session_id))
    seen: dict[str, set[str]] = {}
    kept: list[Session] = []
    for s in passed:
        seen_stories = seen.setdefault(s.participant_id, set())
        repeats = {sid for sid in s.story_ids if sid in seen_stories}
        if repeats:
            kept_anns = [a for a in s.annotations if a.story_id not in repeats]
            led.repeat_story_annotations += len(s.annotations) - len(kept_anns)
            s = Session(
                session_id=s.session_id,
                participant_id=s.participant_id,
                story_ids=s.story_ids,
                annotations=kept_anns,
                duration_minutes=s.duration_minutes,
                control_responses=s.control_responses,
                self_report=s.self_report,
                native_language=s.native_language,
                demographics=s.demographics,
                submitted_at=s.submitted_at,
            )
        seen_stories.update(s.story_ids)
        kept.append(s)

    kept.sort(key=lambda s: (s.submitted_at, s.session_id))
    led.sessions_kept = len(kept)
    led.annotations_kept = sum(len(s.annotations) for s in kept)
    return kept, led


def exclude_stories(
    story_ids: list[str],
    annotations: list[Annotation],
    threshold: float = DOESNT_APPLY_THRESHOLD,
    ledger: ExclusionLedger | None = None,
) -> tuple[list[str], ExclusionLedger]:
    """Drop stories where either guilt question was opted out > threshold.

    Expects participant-filtered annotations. Stories with no guilt
    annotations at all are dropped under a separate reason.
    """
    led = ledger or ExclusionLedger()
    led.stories_in = len(story_ids)

    by_story: dict[str, list[Annotation]] = {sid: [] for sid in story_ids}
    for ann in annotations:
        if ann.question in GUILT_QUESTIONS and ann.story_id in by_story:
            by_story[ann.story_id].append(ann)

    kept: list[str] = []
    for sid in story_ids:
        anns = by_story[sid]
        if not anns:
            led.story_no_annotations += 1
            continue
        excluded = False
        for q in GUILT_QUESTIONS:
            q_anns = [a for a in anns if a.question == q]
            if not q_anns:
                continue
            da = sum(a.doesnt_apply for a in q_anns)
            if da / len(q_anns) > threshold:
                led.story_doesnt_apply[q.value] = led.story_doesnt_apply.get(q.value, 0) + 1
                excluded = True
                break
        if not excluded:
            kept.append(sid)

    led.stories_kept = len(kept)
    return kept, led

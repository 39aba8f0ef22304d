"""HTTP+JSON annotation backend (payload schema v1).

POST /participants            register, returns an opaque participant id
POST /sessions                assign five stories (idempotent while open)
GET  /sessions/{id}           fetch an open assignment
POST /sessions/{id}/submit    one immutable submission per session
GET  /health                  liveness + corpus size

Sliders arrive on the UI's 0-100 scale and are normalized to [0,1] at
ingestion; highlights are merged before the session record is appended.
"""

from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..annotations.spans import merge_highlights
from ..annotations.types import Annotation, ControlResponse, Highlight, Question, Session
from ..corpus.types import Story
from .assignment import AssignmentManager, CorpusExhausted, UnknownParticipant

SCHEMA_VERSION = "v1"


class AssignRequest(BaseModel):
    participant_id: str


class AnswerPayload(BaseModel):
    question: str
    slider: int | None = Field(default=None, ge=0, le=100)
    doesnt_apply: bool = False
    highlights: list[tuple[int, int]] = Field(default_factory=list)


class StoryResponsePayload(BaseModel):
    story_id: str
    answers: list[AnswerPayload]


class SubmitRequest(BaseModel):
    participant_id: str
    responses: list[StoryResponsePayload]
    duration_minutes: float = Field(ge=0)
    self_report: str = "ok"
    native_language: str = "English"
    demographics: dict | None = None


def _reject(status: int, reason: str, detail: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"accepted": False, "reason": reason, "detail": detail},
    )


def _session_from_submission(assignment, req: SubmitRequest) -> Session | JSONResponse:
    """Validate one submission against its assignment; build the Session."""
    task_by_story = {t.story.id: t for t in assignment.tasks}
    if req.participant_id != assignment.participant_id:
        return _reject(422, "schema", "participant does not own this session")
    seen_stories = [r.story_id for r in req.responses]
    if sorted(seen_stories) != sorted(task_by_story):
        return _reject(422, "schema", "responses must cover exactly the assigned stories")

    annotations: list[Annotation] = []
    controls: list[ControlResponse] = []
    for resp in req.responses:
        task = task_by_story[resp.story_id]
        body_len = len(task.story.body)
        questions_answered = [a.question for a in resp.answers]
        if sorted(questions_answered) != sorted(task.question_order):
            return _reject(422, "schema", f"story {resp.story_id}: answer every question once")
        for answer in resp.answers:
            if answer.doesnt_apply:
                if answer.slider is not None:
                    return _reject(422, "schema", "doesnt_apply excludes a slider value")
                if answer.highlights:
                    return _reject(422, "schema", "doesnt_apply excludes highlights")
            elif answer.slider is None:
                return _reject(422, "schema", "missing slider value")
            try:
                merged = merge_highlights(
                    [Highlight(a, b) for a, b in answer.highlights], body_len
                )
            except ValueError as exc:
                return _reject(422, "schema", str(exc))
            q = Question(answer.question)
            if q is Question.ATTENTION_CHECK:
                if answer.doesnt_apply:
                    return _reject(422, "schema", "attention checks cannot be opted out")
                controls.append(
                    ControlResponse(
                        expected_side=task.attention_check.expected_side,
                        slider=answer.slider / 100.0,
                    )
                )
            annotations.append(
                Annotation(
                    story_id=resp.story_id,
                    question=q,
                    slider=None if answer.doesnt_apply else answer.slider / 100.0,
                    doesnt_apply=answer.doesnt_apply,
                    highlights=[] if answer.doesnt_apply else merged,
                    participant_id=assignment.participant_id,
                    session_id=assignment.session_id,
                )
            )

    return Session(
        session_id=assignment.session_id,
        participant_id=assignment.participant_id,
        story_ids=[t.story.id for t in assignment.tasks],
        annotations=annotations,
        duration_minutes=req.duration_minutes,
        control_responses=controls,
        self_report=req.self_report,
        native_language=req.native_language,
        demographics=req.demographics,
        submitted_at=datetime.now(timezone.utc).isoformat(),
    )


def create_app(stories: list[Story], data_dir: str | Path, seed: int = 0,
               static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="guiltspan annotation service", version=SCHEMA_VERSION)
    manager = AssignmentManager(stories=stories, data_dir=Path(data_dir), seed=seed)
    app.state.manager = manager

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "schema": SCHEMA_VERSION,
            "stories": len(manager.stories),
            "sessions_stored": len(manager.submitted_sessions),
        }

    @app.post("/participants")
    def register_participant():
        return {"participant_id": manager.register_participant()}

    @app.post("/sessions")
    def assign_session(req: AssignRequest):
        try:
            assignment = manager.assign_session(req.participant_id)
        except UnknownParticipant:
            raise HTTPException(status_code=404, detail="unknown participant")
        except CorpusExhausted:
            return JSONResponse(
                status_code=409,
                content={"error": "no_eligible_stories",
                         "detail": "participant has seen all stories"},
            )
        return assignment.to_payload()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        assignment = manager.get_open(session_id)
        if assignment is None:
            if session_id in manager.submitted_sessions:
                raise HTTPException(status_code=410, detail="session already submitted")
            raise HTTPException(status_code=404, detail="unknown session")
        return assignment.to_payload()

    @app.post("/sessions/{session_id}/submit")
    def submit(session_id: str, req: SubmitRequest):
        if session_id in manager.submitted_sessions:
            return _reject(409, "duplicate", "session already submitted")
        assignment = manager.get_open(session_id)
        if assignment is None:
            return _reject(404, "unknown_session", "no open assignment with this id")
        session = _session_from_submission(assignment, req)
        if isinstance(session, JSONResponse):
            return session
        try:
            manager.accept_submission(assignment, session)
        except ValueError:
            return _reject(409, "duplicate", "session already submitted")
        return {"accepted": True, "session_id": session_id}

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app

/**
 * Session state machine.
 *
 * Per (story, question): rating -> highlighting -> done, strictly one-way;
 * a doesnt_apply rating skips the highlighting phase. Submitted ratings
 * can never be revisited. Questions within a story follow the server's
 * question_order; stories advance in assignment order. The machine is a
 * pure reducer so the irreversibility invariant is testable without a DOM.
 */

import type { Assignment, QuestionKind, SubmitRequest } from "./schema.js";
import type { CharInterval } from "./intervals.js";
import { addInterval, removeInterval } from "./intervals.js";

export type Phase = "rating" | "highlighting" | "done";

export interface QuestionState {
  phase: Phase;
  slider: number | null; // 0..100, null until first interaction
  doesntApply: boolean;
  highlights: CharInterval[];
}

export interface UiSessionState {
  assignment: Assignment;
  storyIndex: number; // index of the active story; == 5 when finished
  questionIndex: number; // index into the active story's question_order
  questions: Record<string, QuestionState>; // `${storyId}:${question}`
  startedAt: number; // epoch ms
  demographics: Record<string, unknown>;
}

export type UiAction =
  | { kind: "move_slider"; value: number }
  | { kind: "toggle_doesnt_apply" }
  | { kind: "submit_rating" }
  | { kind: "add_highlight"; interval: CharInterval }
  | { kind: "remove_highlight"; interval: CharInterval }
  | { kind: "submit_highlights" }
  | { kind: "set_demographic"; key: string; value: unknown };

export function questionKey(storyId: string, question: QuestionKind): string {
  return `${storyId}:${question}`;
}

export function initSession(assignment: Assignment, now: number = Date.now()): UiSessionState {
  const questions: Record<string, QuestionState> = {};
  for (const task of assignment.stories) {
    for (const q of task.question_order) {
      questions[questionKey(task.story_id, q)] = {
        phase: "rating",
        slider: null,
        doesntApply: false,
        highlights: [],
      };
    }
  }
  return {
    assignment,
    storyIndex: 0,
    questionIndex: 0,
    questions,
    startedAt: now,
    demographics: {},
  };
}

export function sessionFinished(state: UiSessionState): boolean {
  return state.storyIndex >= state.assignment.stories.length;
}

export function activeQuestion(
  state: UiSessionState
): { storyId: string; question: QuestionKind; qs: QuestionState } | null {
  if (sessionFinished(state)) return null;
  const task = state.assignment.stories[state.storyIndex]!;
  const question = task.question_order[state.questionIndex]!;
  const qs = state.questions[questionKey(task.story_id, question)]!;
  return { storyId: task.story_id, question, qs };
}

function advance(state: UiSessionState): UiSessionState {
  const task = state.assignment.stories[state.storyIndex]!;
  if (state.questionIndex + 1 < task.question_order.length) {
    return { ...state, questionIndex: state.questionIndex + 1 };
  }
  return { ...state, storyIndex: state.storyIndex + 1, questionIndex: 0 };
}

/**
 * Pure reducer. Invalid actions (e.g. rating input during highlighting,
 * submit without a response) leave the state unchanged.
 */
export function reduce(state: UiSessionState, action: UiAction): UiSessionState {
  if (action.kind === "set_demographic") {
    return {
      ...state,
      demographics: { ...state.demographics, [action.key]: action.value },
    };
  }
  const active = activeQuestion(state);
  if (!active) return state;
  const key = questionKey(active.storyId, active.question);
  const qs = active.qs;

  const withQuestion = (next: QuestionState): UiSessionState => ({
    ...state,
    questions: { ...state.questions, [key]: next },
  });

  switch (action.kind) {
    case "move_slider":
      if (qs.phase !== "rating" || qs.doesntApply) return state;
      if (action.value < 0 || action.value > 100) return state;
      return withQuestion({ ...qs, slider: Math.round(action.value) });
    case "toggle_doesnt_apply": {
      if (qs.phase !== "rating") return state;
      if (active.question === "attention_check") return state; // opt-out not offered
      const doesntApply = !qs.doesntApply;
      return withQuestion({ ...qs, doesntApply, slider: doesntApply ? null : qs.slider });
    }
    case "submit_rating": {
      if (qs.phase !== "rating") return state;
      if (!qs.doesntApply && qs.slider === null) return state; // unmoved slider blocks
      const next: QuestionState = {
        ...qs,
        phase: qs.doesntApply ? "done" : "highlighting",
      };
      const updated = withQuestion(next);
      return qs.doesntApply ? advance(updated) : updated;
    }
    case "add_highlight":
      if (qs.phase !== "highlighting") return state;
      return withQuestion({ ...qs, highlights: addInterval(qs.highlights, action.interval) });
    case "remove_highlight":
      if (qs.phase !== "highlighting") return state;
      return withQuestion({
        ...qs,
        highlights: removeInterval(qs.highlights, action.interval),
      });
    case "submit_highlights": {
      if (qs.phase !== "highlighting") return state;
      return advance(withQuestion({ ...qs, phase: "done" }));
    }
  }
}

/** Build the service submission payload; only valid once every question is done. */
export function buildSubmission(
  state: UiSessionState,
  now: number = Date.now()
): SubmitRequest {
  if (!sessionFinished(state)) {
    throw new Error("session is not finished");
  }
  const responses = state.assignment.stories.map((task) => ({
    story_id: task.story_id,
    answers: task.question_order.map((question) => {
      const qs = state.questions[questionKey(task.story_id, question)]!;
      return {
        question,
        slider: qs.doesntApply ? null : qs.slider,
        doesnt_apply: qs.doesntApply,
        highlights: qs.highlights.map(([s, e]) => [s, e] as [number, number]),
      };
    }),
  }));
  const demographics = Object.keys(state.demographics).length
    ? state.demographics
    : null;
  return {
    participant_id: state.assignment.participant_id,
    responses,
    duration_minutes: Math.max(0, (now - state.startedAt) / 60000),
    self_report: "ok",
    native_language: String(state.demographics["native_language"] ?? "English"),
    demographics,
  };
}

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { AssignmentSchema, SubmitRequestSchema } from "../src/schema.js";
import {
  activeQuestion,
  buildSubmission,
  initSession,
  questionKey,
  reduce,
  sessionFinished,
  type Phase,
  type UiAction,
  type UiSessionState,
} from "../src/session.js";

const assignmentFixture = AssignmentSchema.parse(
  JSON.parse(
    readFileSync(fileURLToPath(new URL("../fixtures/assignment.json", import.meta.url)), "utf-8")
  )
);

const PHASE_ORDER: Record<Phase, number> = { rating: 0, highlighting: 1, done: 2 };

function makeRng(seed: number) {
  let s = seed;
  return (n: number) => {
    s = (s * 1103515245 + 12345) % 2147483648;
    return s % n;
  };
}

function randomAction(rand: (n: number) => number): UiAction {
  switch (rand(7)) {
    case 0:
      return { kind: "move_slider", value: rand(101) };
    case 1:
      return { kind: "toggle_doesnt_apply" };
    case 2:
      return { kind: "submit_rating" };
    case 3: {
      const start = rand(60);
      return { kind: "add_highlight", interval: [start, start + 1 + rand(15)] };
    }
    case 4: {
      const start = rand(60);
      return { kind: "remove_highlight", interval: [start, start + 1 + rand(15)] };
    }
    case 5:
      return { kind: "submit_highlights" };
    default:
      return { kind: "set_demographic", key: "age", value: rand(80) };
  }
}

describe("session state machine", () => {
  it("walks rating -> highlighting -> done per question", () => {
    let state = initSession(assignmentFixture, 0);
    const first = activeQuestion(state)!;
    expect(first.qs.phase).toBe("rating");

    state = reduce(state, { kind: "move_slider", value: 70 });
    state = reduce(state, { kind: "submit_rating" });
    const highlighting = state.questions[questionKey(first.storyId, first.question)]!;
    expect(highlighting.phase).toBe("highlighting");

    state = reduce(state, { kind: "add_highlight", interval: [0, 7] });
    state = reduce(state, { kind: "submit_highlights" });
    const done = state.questions[questionKey(first.storyId, first.question)]!;
    expect(done.phase).toBe("done");
    expect(activeQuestion(state)!.question).not.toBe(first.question);
  });

  it("blocks submit when the slider is unmoved and nothing is checked", () => {
    let state = initSession(assignmentFixture, 0);
    const before = activeQuestion(state)!;
    state = reduce(state, { kind: "submit_rating" });
    expect(activeQuestion(state)!.question).toBe(before.question);
    expect(before.qs.phase).toBe("rating");
  });

  it("doesnt_apply skips the highlighting phase", () => {
    let state = initSession(assignmentFixture, 0);
    const first = activeQuestion(state)!;
    if (first.question === "attention_check") return; // opt-out not offered there
    state = reduce(state, { kind: "toggle_doesnt_apply" });
    state = reduce(state, { kind: "submit_rating" });
    const qs = state.questions[questionKey(first.storyId, first.question)]!;
    expect(qs.phase).toBe("done");
    expect(qs.highlights).toEqual([]);
    expect(qs.slider).toBeNull();
  });

  it("never returns a question to the rating phase (model test)", () => {
    for (let run = 0; run < 60; run++) {
      const rand = makeRng(run + 1);
      let state = initSession(assignmentFixture, 0);
      const maxPhase = new Map<string, number>();
      for (const key of Object.keys(state.questions)) maxPhase.set(key, 0);
      for (let step = 0; step < 300 && !sessionFinished(state); step++) {
        state = reduce(state, randomAction(rand));
        for (const [key, qs] of Object.entries(state.questions)) {
          const rank = PHASE_ORDER[qs.phase];
          expect(rank).toBeGreaterThanOrEqual(maxPhase.get(key)!);
          maxPhase.set(key, Math.max(maxPhase.get(key)!, rank));
        }
      }
    }
  });

  it("adjacent selections merge into one highlight", () => {
    let state = initSession(assignmentFixture, 0);
    state = reduce(state, { kind: "move_slider", value: 55 });
    state = reduce(state, { kind: "submit_rating" });
    state = reduce(state, { kind: "add_highlight", interval: [0, 5] });
    state = reduce(state, { kind: "add_highlight", interval: [5, 9] });
    const active = activeQuestion(state)!;
    expect(active.qs.highlights).toEqual([[0, 9]]);
  });

  it("allows submitting a question with zero highlights", () => {
    let state = initSession(assignmentFixture, 0);
    state = reduce(state, { kind: "move_slider", value: 80 });
    state = reduce(state, { kind: "submit_rating" });
    state = reduce(state, { kind: "submit_highlights" });
    expect(Object.values(state.questions).filter((q) => q.phase === "done")).toHaveLength(1);
  });
});

function completeSession(state: UiSessionState, rand: (n: number) => number): UiSessionState {
  let guard = 0;
  while (!sessionFinished(state) && guard++ < 500) {
    const active = activeQuestion(state)!;
    if (active.qs.phase === "rating") {
      if (active.question !== "attention_check" && rand(6) === 0) {
        state = reduce(state, { kind: "toggle_doesnt_apply" });
      } else {
        state = reduce(state, { kind: "move_slider", value: rand(101) });
      }
      state = reduce(state, { kind: "submit_rating" });
    } else {
      if (rand(2) === 0) {
        const start = rand(40);
        state = reduce(state, { kind: "add_highlight", interval: [start, start + 4] });
      }
      state = reduce(state, { kind: "submit_highlights" });
    }
  }
  return state;
}

describe("buildSubmission", () => {
  it("refuses before the session is finished", () => {
    const state = initSession(assignmentFixture, 0);
    expect(() => buildSubmission(state)).toThrow();
  });

  it("produces a payload that validates against the service schema", () => {
    for (let run = 0; run < 20; run++) {
      const rand = makeRng(1000 + run);
      let state = initSession(assignmentFixture, 0);
      state = completeSession(state, rand);
      expect(sessionFinished(state)).toBe(true);
      const payload = buildSubmission(state, 15 * 60000);
      const parsed = SubmitRequestSchema.parse(payload);
      expect(parsed.responses.map((r) => r.story_id).sort()).toEqual(
        assignmentFixture.stories.map((t) => t.story_id).sort()
      );
    }
  });
});

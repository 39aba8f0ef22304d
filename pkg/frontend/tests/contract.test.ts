import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  AssignmentSchema,
  HealthSchema,
  RegisterResponseSchema,
  SubmitAcceptedSchema,
  SubmitRejectedSchema,
  SubmitRequestSchema,
} from "../src/schema.js";

function fixture(name: string): unknown {
  const path = fileURLToPath(new URL(`../fixtures/${name}.json`, import.meta.url));
  return JSON.parse(readFileSync(path, "utf-8"));
}

// Recorded wire fixtures from the backend; no live service needed.
describe("service contract fixtures", () => {
  it("health response matches", () => {
    const health = HealthSchema.parse(fixture("health"));
    expect(health.stories).toBeGreaterThan(0);
  });

  it("participant registration matches", () => {
    RegisterResponseSchema.parse(fixture("register"));
  });

  it("assignment payload matches", () => {
    const assignment = AssignmentSchema.parse(fixture("assignment"));
    expect(new Set(assignment.stories.map((t) => t.story_id)).size).toBe(5);
    for (const task of assignment.stories) {
      expect([...task.question_order].sort()).toEqual(
        ["attention_check", "author_belief", "reader_perception"]
      );
      expect(task.body.length).toBeGreaterThan(0);
    }
  });

  it("accepted submission request matches", () => {
    const req = SubmitRequestSchema.parse(fixture("submit_request"));
    const assignment = AssignmentSchema.parse(fixture("assignment"));
    expect(req.responses.map((r) => r.story_id).sort()).toEqual(
      assignment.stories.map((t) => t.story_id).sort()
    );
    // Highlight intervals lie inside the served body.
    const bodyLen = new Map(assignment.stories.map((t) => [t.story_id, t.body.length]));
    for (const resp of req.responses) {
      for (const answer of resp.answers) {
        for (const [start, end] of answer.highlights) {
          expect(start).toBeLessThan(end);
          expect(end).toBeLessThanOrEqual(bodyLen.get(resp.story_id)!);
        }
      }
    }
  });

  it("submit responses match (accepted and duplicate rejection)", () => {
    const accepted = SubmitAcceptedSchema.parse(fixture("submit_accepted"));
    const assignment = AssignmentSchema.parse(fixture("assignment"));
    expect(accepted.session_id).toBe(assignment.session_id);
    const rejected = SubmitRejectedSchema.parse(fixture("submit_rejected"));
    expect(rejected.reason).toBe("duplicate");
  });
});

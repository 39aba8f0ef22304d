/**
 * Wire schemas for the annotation service (payload schema v1).
 *
 * These mirror the backend's request/response shapes; the contract tests
 * validate recorded server fixtures against them, so drift on either side
 * fails the build without a live service.
 */

import { z } from "zod";

export const QuestionKind = z.enum([
  "reader_perception",
  "author_belief",
  "attention_check",
]);
export type QuestionKind = z.infer<typeof QuestionKind>;

export const AttentionCheckSchema = z.object({
  prompt: z.string(),
  expected_side: z.enum(["above_half", "below_half"]),
});

export const StoryTaskSchema = z.object({
  story_id: z.string(),
  title: z.string(),
  body: z.string(),
  question_order: z.array(QuestionKind).length(3),
  attention_check: AttentionCheckSchema,
});
export type StoryTask = z.infer<typeof StoryTaskSchema>;

export const AssignmentSchema = z.object({
  session_id: z.string(),
  participant_id: z.string(),
  stories: z.array(StoryTaskSchema).length(5),
  issued_at: z.string(),
  seed: z.number().int(),
});
export type Assignment = z.infer<typeof AssignmentSchema>;

export const AnswerSchema = z
  .object({
    question: QuestionKind,
    slider: z.number().int().min(0).max(100).nullable(),
    doesnt_apply: z.boolean(),
    highlights: z.array(z.tuple([z.number().int().min(0), z.number().int().min(1)])),
  })
  .refine((a) => a.doesnt_apply !== (a.slider !== null), {
    message: "answer carries a slider value xor doesnt_apply",
  })
  .refine((a) => !a.doesnt_apply || a.highlights.length === 0, {
    message: "doesnt_apply answers carry no highlights",
  });
export type Answer = z.infer<typeof AnswerSchema>;

export const StoryResponseSchema = z.object({
  story_id: z.string(),
  answers: z.array(AnswerSchema).length(3),
});

export const SubmitRequestSchema = z.object({
  participant_id: z.string(),
  responses: z.array(StoryResponseSchema).length(5),
  duration_minutes: z.number().min(0),
  self_report: z.enum(["ok", "confused_or_incorrect"]),
  native_language: z.string(),
  demographics: z.record(z.unknown()).nullable(),
});
export type SubmitRequest = z.infer<typeof SubmitRequestSchema>;

export const SubmitAcceptedSchema = z.object({
  accepted: z.literal(true),
  session_id: z.string(),
});

export const SubmitRejectedSchema = z.object({
  accepted: z.literal(false),
  reason: z.string(),
  detail: z.string(),
});

export const RegisterResponseSchema = z.object({ participant_id: z.string() });

export const HealthSchema = z.object({
  status: z.literal("ok"),
  schema: z.string(),
  stories: z.number().int(),
  sessions_stored: z.number().int(),
});

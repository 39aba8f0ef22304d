/** Typed fetch client for the annotation service. */

import {
  Assignment,
  AssignmentSchema,
  RegisterResponseSchema,
  SubmitAcceptedSchema,
  SubmitRejectedSchema,
  SubmitRequest,
} from "./schema.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public status: number,
    public reason?: string
  ) {
    super(message);
  }
}

async function parseJson(res: Response): Promise<unknown> {
  try {
    return await res.json();
  } catch {
    throw new ApiError(`bad JSON from ${res.url}`, res.status);
  }
}

export async function registerParticipant(base = ""): Promise<string> {
  const res = await fetch(`${base}/participants`, { method: "POST" });
  const body = RegisterResponseSchema.parse(await parseJson(res));
  return body.participant_id;
}

export async function requestAssignment(
  participantId: string,
  base = ""
): Promise<Assignment> {
  const res = await fetch(`${base}/sessions`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ participant_id: participantId }),
  });
  if (res.status === 409) {
    throw new ApiError("no eligible stories remain", res.status, "no_eligible_stories");
  }
  if (!res.ok) throw new ApiError(`assignment failed (${res.status})`, res.status);
  return AssignmentSchema.parse(await parseJson(res));
}

export async function fetchOpenAssignment(
  sessionId: string,
  base = ""
): Promise<Assignment | null> {
  const res = await fetch(`${base}/sessions/${sessionId}`);
  if (res.status === 404 || res.status === 410) return null;
  if (!res.ok) throw new ApiError(`fetch failed (${res.status})`, res.status);
  return AssignmentSchema.parse(await parseJson(res));
}

export async function submitSession(
  sessionId: string,
  payload: SubmitRequest,
  base = ""
): Promise<void> {
  const res = await fetch(`${base}/sessions/${sessionId}/submit`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
  const body = await parseJson(res);
  if (res.ok) {
    SubmitAcceptedSchema.parse(body);
    return;
  }
  const rejected = SubmitRejectedSchema.safeParse(body);
  throw new ApiError(
    rejected.success ? rejected.data.detail : `submit failed (${res.status})`,
    res.status,
    rejected.success ? rejected.data.reason : undefined
  );
}

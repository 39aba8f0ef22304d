/**
 * Map DOM selections to offsets in the canonical story body.
 *
 * The story text is rendered as a run of segments (text nodes); a segment
 * knows which body slice it displays, so a (node, offsetInNode) pair maps
 * to `segment.start + offsetInNode`. Because the rendered text is exactly
 * the stored body (no whitespace normalization), substring(start, end) of
 * the body equals the visually selected text.
 */

import type { CharInterval } from "./intervals.js";

export interface Segment {
  /** body offset where this segment starts */
  start: number;
  /** body offset one past the segment's last character */
  end: number;
}

/** Split [0, bodyLength) into segments at the given boundary offsets. */
export function segmentText(bodyLength: number, boundaries: number[]): Segment[] {
  const cuts = [...new Set(boundaries.filter((b) => b > 0 && b < bodyLength))].sort(
    (a, b) => a - b
  );
  const segments: Segment[] = [];
  let prev = 0;
  for (const cut of cuts) {
    segments.push({ start: prev, end: cut });
    prev = cut;
  }
  if (prev < bodyLength) segments.push({ start: prev, end: bodyLength });
  return segments;
}

/**
 * Convert a selection anchored in segment space to one body interval.
 * Returns null for collapsed (empty) selections.
 */
export function selectionToInterval(
  segments: Segment[],
  anchorSegment: number,
  anchorOffset: number,
  focusSegment: number,
  focusOffset: number
): CharInterval | null {
  const seg = (i: number): Segment => {
    const s = segments[i];
    if (!s) throw new RangeError(`segment ${i} out of range`);
    return s;
  };
  const clampOffset = (s: Segment, off: number): number =>
    Math.max(0, Math.min(off, s.end - s.start));
  const a = seg(anchorSegment).start + clampOffset(seg(anchorSegment), anchorOffset);
  const b = seg(focusSegment).start + clampOffset(seg(focusSegment), focusOffset);
  const start = Math.min(a, b);
  const end = Math.max(a, b);
  return start === end ? null : [start, end];
}

/**
 * Character-interval algebra for span highlights.
 *
 * Intervals are half-open [start, end) offsets into the canonical story
 * body served by the backend. Directly touching selections merge into one
 * highlight, mirroring the server's merge rule.
 */

export type CharInterval = [number, number];

export function mergeIntervals(raw: CharInterval[]): CharInterval[] {
  if (raw.length === 0) return [];
  const sorted = [...raw].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  const out: CharInterval[] = [sorted[0]!.slice() as CharInterval];
  for (let i = 1; i < sorted.length; i++) {
    const [start, end] = sorted[i]!;
    const last = out[out.length - 1]!;
    if (start <= last[1]) {
      last[1] = Math.max(last[1], end);
    } else {
      out.push([start, end]);
    }
  }
  return out;
}

export function addInterval(existing: CharInterval[], iv: CharInterval): CharInterval[] {
  if (iv[0] >= iv[1]) return existing;
  return mergeIntervals([...existing, iv]);
}

/** Remove the covered characters of `iv` from the highlight set (deselect). */
export function removeInterval(existing: CharInterval[], iv: CharInterval): CharInterval[] {
  const [rs, re] = iv;
  const out: CharInterval[] = [];
  for (const [s, e] of existing) {
    if (e <= rs || s >= re) {
      out.push([s, e]);
      continue;
    }
    if (s < rs) out.push([s, rs]);
    if (e > re) out.push([re, e]);
  }
  return out;
}

export function coveredChars(intervals: CharInterval[]): number {
  return intervals.reduce((acc, [s, e]) => acc + (e - s), 0);
}

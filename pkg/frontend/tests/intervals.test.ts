import { describe, expect, it } from "vitest";

import {
  addInterval,
  coveredChars,
  mergeIntervals,
  removeInterval,
  type CharInterval,
} from "../src/intervals.js";

function coverSet(intervals: CharInterval[]): Set<number> {
  const s = new Set<number>();
  for (const [a, b] of intervals) for (let i = a; i < b; i++) s.add(i);
  return s;
}

describe("mergeIntervals", () => {
  it("merges directly adjacent selections into one interval", () => {
    expect(mergeIntervals([[0, 5], [5, 9]])).toEqual([[0, 9]]);
  });

  it("preserves gaps", () => {
    expect(mergeIntervals([[0, 5], [6, 9]])).toEqual([[0, 5], [6, 9]]);
  });

  it("handles unsorted overlapping input", () => {
    expect(mergeIntervals([[3, 7], [0, 4]])).toEqual([[0, 7]]);
  });

  it("preserves the covered character set (100 random cases)", () => {
    let seed = 12345;
    const rand = (n: number) => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed % n;
    };
    for (let trial = 0; trial < 100; trial++) {
      const raw: CharInterval[] = [];
      const count = rand(8) + 1;
      for (let i = 0; i < count; i++) {
        const start = rand(50);
        raw.push([start, start + 1 + rand(12)]);
      }
      const merged = mergeIntervals(raw);
      expect(coverSet(merged)).toEqual(coverSet(raw));
      for (let i = 1; i < merged.length; i++) {
        expect(merged[i]![0]).toBeGreaterThan(merged[i - 1]![1]);
      }
    }
  });
});

describe("removeInterval", () => {
  it("splits a highlight when deselecting its middle", () => {
    expect(removeInterval([[0, 10]], [3, 6])).toEqual([[0, 3], [6, 10]]);
  });

  it("drops fully covered highlights", () => {
    expect(removeInterval([[2, 5], [7, 9]], [0, 20])).toEqual([]);
  });

  it("leaves disjoint highlights alone", () => {
    expect(removeInterval([[0, 3]], [5, 8])).toEqual([[0, 3]]);
  });
});

describe("addInterval", () => {
  it("ignores empty selections", () => {
    expect(addInterval([[0, 2]], [4, 4])).toEqual([[0, 2]]);
  });

  it("counts covered characters", () => {
    expect(coveredChars(addInterval([[0, 2]], [2, 6]))).toBe(6);
  });
});

/**
 * DOM glue for selection capture over the rendered story text.
 *
 * The story container holds text nodes (plain runs and <mark> children);
 * walking them in order yields the segment list for offsets.ts, so a DOM
 * Range maps to body offsets no matter how the highlight markup splits
 * the text.
 */

import type { CharInterval } from "./intervals.js";
import { Segment, selectionToInterval } from "./offsets.js";

interface NodeWalk {
  nodes: Text[];
  segments: Segment[];
}

function walkTextNodes(container: Node): NodeWalk {
  const nodes: Text[] = [];
  const segments: Segment[] = [];
  let offset = 0;
  const visit = (node: Node): void => {
    if (node.nodeType === Node.TEXT_NODE) {
      const text = node as Text;
      nodes.push(text);
      segments.push({ start: offset, end: offset + text.data.length });
      offset += text.data.length;
      return;
    }
    node.childNodes.forEach(visit);
  };
  visit(container);
  return { nodes, segments };
}

/** Map the current window selection to a body interval, if it lies inside. */
export function domSelectionToInterval(
  container: HTMLElement,
  selection: Selection | null
): CharInterval | null {
  if (!selection || selection.rangeCount === 0 || selection.isCollapsed) return null;
  const { anchorNode, focusNode, anchorOffset, focusOffset } = selection;
  if (!anchorNode || !focusNode) return null;
  if (!container.contains(anchorNode) || !container.contains(focusNode)) return null;
  const { nodes, segments } = walkTextNodes(container);
  const anchorIdx = nodes.indexOf(anchorNode as Text);
  const focusIdx = nodes.indexOf(focusNode as Text);
  if (anchorIdx < 0 || focusIdx < 0) return null;
  return selectionToInterval(segments, anchorIdx, anchorOffset, focusIdx, focusOffset);
}

/** Render the body with <mark> elements over the highlighted intervals. */
export function renderHighlightedText(
  container: HTMLElement,
  body: string,
  highlights: CharInterval[]
): void {
  container.textContent = "";
  let pos = 0;
  for (const [start, end] of highlights) {
    if (start > pos) container.appendChild(document.createTextNode(body.slice(pos, start)));
    const mark = document.createElement("mark");
    mark.textContent = body.slice(start, end);
    mark.dataset.start = String(start);
    mark.dataset.end = String(end);
    container.appendChild(mark);
    pos = end;
  }
  if (pos < body.length) container.appendChild(document.createTextNode(body.slice(pos)));
}

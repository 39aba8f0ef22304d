/** Browser entry point: one annotation session, start to submission. */

import {
  fetchOpenAssignment,
  registerParticipant,
  requestAssignment,
  submitSession,
  ApiError,
} from "./api.js";
import { domSelectionToInterval, renderHighlightedText } from "./dom.js";
import type { Assignment, QuestionKind } from "./schema.js";
import {
  UiSessionState,
  activeQuestion,
  buildSubmission,
  initSession,
  reduce,
  sessionFinished,
} from "./session.js";

const QUESTION_TEXT: Record<QuestionKind, string> = {
  reader_perception:
    "How likely is it that the main suspect is / the main suspects are guilty?",
  author_belief:
    "How much does the author believe that the main suspect is / the main suspects are guilty?",
  attention_check: "", // served per story
};

const $ = (id: string): HTMLElement => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
};

let state: UiSessionState;

async function start(): Promise<void> {
  let participantId = localStorage.getItem("guiltspan.participant");
  if (!participantId) {
    participantId = await registerParticipant();
    localStorage.setItem("guiltspan.participant", participantId);
  }
  // Resume an open assignment after reload, otherwise request a new one.
  let assignment: Assignment | null = null;
  const openId = localStorage.getItem("guiltspan.session");
  if (openId) assignment = await fetchOpenAssignment(openId);
  if (!assignment) {
    try {
      assignment = await requestAssignment(participantId);
    } catch (err) {
      if (err instanceof ApiError && err.reason === "no_eligible_stories") {
        $("app").textContent =
          "You have annotated every available story. Thank you!";
        return;
      }
      throw err;
    }
    localStorage.setItem("guiltspan.session", assignment.session_id);
  }
  state = initSession(assignment);
  render();
}

function dispatch(action: Parameters<typeof reduce>[1]): void {
  state = reduce(state, action);
  render();
}

function render(): void {
  if (sessionFinished(state)) {
    renderDemographics();
    return;
  }
  const active = activeQuestion(state)!;
  const task = state.assignment.stories[state.storyIndex]!;
  $("progress").textContent = `Story ${state.storyIndex + 1} of ${
    state.assignment.stories.length
  } — question ${state.questionIndex + 1} of 3`;
  $("story-title").textContent = task.title;

  const prompt =
    active.question === "attention_check"
      ? task.attention_check.prompt
      : QUESTION_TEXT[active.question];
  $("question").textContent = prompt;

  const ratingPane = $("rating-pane");
  const highlightPane = $("highlight-pane");
  if (active.qs.phase === "rating") {
    ratingPane.hidden = false;
    highlightPane.hidden = true;
    renderStoryPlain(task.body);
    renderRatingControls(active.question);
  } else {
    ratingPane.hidden = true;
    highlightPane.hidden = false;
    renderHighlighting(task.body);
  }
}

function renderStoryPlain(body: string): void {
  const el = $("story-text");
  el.classList.remove("highlightable");
  el.textContent = body;
}

function renderRatingControls(question: QuestionKind): void {
  const active = activeQuestion(state)!;
  const slider = $("slider") as HTMLInputElement;
  const daBox = $("doesnt-apply") as HTMLInputElement;
  const daRow = $("doesnt-apply-row");
  const error = $("rating-error");
  error.textContent = "";

  // The thumb stays visually unset until the first interaction, so an
  // untouched slider is distinguishable from a deliberate 50.
  if (active.qs.slider === null) {
    slider.value = "50";
    slider.classList.add("unmoved");
  } else {
    slider.value = String(active.qs.slider);
    slider.classList.remove("unmoved");
  }
  slider.disabled = active.qs.doesntApply;
  daBox.checked = active.qs.doesntApply;
  daRow.hidden = question === "attention_check";

  slider.oninput = () => dispatch({ kind: "move_slider", value: Number(slider.value) });
  daBox.onchange = () => dispatch({ kind: "toggle_doesnt_apply" });
  ($("submit-rating") as HTMLButtonElement).onclick = () => {
    const before = activeQuestion(state)!.qs;
    if (!before.doesntApply && before.slider === null) {
      error.textContent = "Move the slider or check “Doesn't apply”.";
      return;
    }
    dispatch({ kind: "submit_rating" });
  };
}

function renderHighlighting(body: string): void {
  const active = activeQuestion(state)!;
  const el = $("story-text");
  el.classList.add("highlightable");
  renderHighlightedText(el, body, active.qs.highlights);
  $("highlight-hint").textContent =
    "Highlight in the text why you gave your response. " +
    "Select text to highlight it; click a highlight to remove it.";

  el.onmouseup = () => {
    const interval = domSelectionToInterval(el, window.getSelection());
    window.getSelection()?.removeAllRanges();
    if (interval) dispatch({ kind: "add_highlight", interval });
  };
  el.onclick = (ev) => {
    const target = ev.target as HTMLElement;
    if (target.tagName === "MARK" && !window.getSelection()?.toString()) {
      dispatch({
        kind: "remove_highlight",
        interval: [Number(target.dataset.start), Number(target.dataset.end)],
      });
    }
  };
  ($("submit-highlights") as HTMLButtonElement).onclick = () =>
    dispatch({ kind: "submit_highlights" });
}

function renderDemographics(): void {
  $("annotation-pane").hidden = true;
  const pane = $("demographics-pane");
  pane.hidden = false;
  ($("finish") as HTMLButtonElement).onclick = async () => {
    for (const key of ["age", "gender", "native_language", "enjoyment"]) {
      const input = document.getElementById(`demo-${key}`) as HTMLInputElement | null;
      if (input && input.value) dispatch({ kind: "set_demographic", key, value: input.value });
    }
    const payload = buildSubmission(state);
    if ((document.getElementById("demo-confused") as HTMLInputElement).checked) {
      payload.self_report = "confused_or_incorrect";
    }
    try {
      await submitSession(state.assignment.session_id, payload);
      localStorage.removeItem("guiltspan.session");
      pane.innerHTML = "<p>Submission received. Thank you!</p>";
    } catch (err) {
      $("submit-error").textContent =
        err instanceof ApiError ? `Submission rejected: ${err.message}` : String(err);
    }
  };
}

start().catch((err) => {
  $("app").textContent = `Failed to start session: ${err}`;
});

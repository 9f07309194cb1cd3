/**
 * DOM wiring for the chat + calendar page.
 *
 * Data flow: the user's text goes to the service verbatim; the reply string
 * from the payload is appended to the transcript verbatim.  The calendar is
 * refreshed only after a turn whose payload lists changed events
 * (poll-after-write), or when the user pages between months.
 */

import { ApiClient } from "./api.js";
import {
  buildMonthGrid,
  eventLabel,
  monthBounds,
  shiftMonth,
} from "./calendar.js";
import {
  ChatViewState,
  canSend,
  initialState,
  replyReceived,
  sendFailed,
  sendStarted,
  sessionStarted,
} from "./state.js";

const api = new ApiClient("");

let state: ChatViewState = initialState();
let view = { year: new Date().getFullYear(), month: new Date().getMonth() + 1 };

const transcriptEl = document.getElementById("transcript") as HTMLElement;
const pendingEl = document.getElementById("pending") as HTMLElement;
const inputEl = document.getElementById("input") as HTMLInputElement;
const sendEl = document.getElementById("send") as HTMLButtonElement;
const retryEl = document.getElementById("retry") as HTMLButtonElement;
const calendarEl = document.getElementById("calendar") as HTMLElement;
const monthTitleEl = document.getElementById("month-title") as HTMLElement;
const prevEl = document.getElementById("prev-month") as HTMLButtonElement;
const nextEl = document.getElementById("next-month") as HTMLButtonElement;

function renderTranscript(): void {
  transcriptEl.replaceChildren(
    ...state.transcript.map((turn) => {
      const line = document.createElement("div");
      line.className = `turn turn-${turn.role}`;
      line.textContent = (turn.role === "user" ? "U> " : "S> ") + turn.text;
      return line;
    }),
  );
  transcriptEl.scrollTop = transcriptEl.scrollHeight;
}

function renderControls(): void {
  pendingEl.textContent = state.pending ? `awaiting: ${state.pending}` : "";
  inputEl.disabled = state.inputLocked;
  sendEl.disabled = state.inputLocked;
  retryEl.hidden = state.failedText === null;
}

async function renderCalendar(): Promise<void> {
  const { start, end } = monthBounds(view.year, view.month);
  let events;
  try {
    events = await api.fetchEvents(start, end);
  } catch {
    calendarEl.textContent = "calendar unavailable";
    return;
  }
  const grid = buildMonthGrid(events, view.year, view.month);
  monthTitleEl.textContent = grid.title;
  const table = document.createElement("table");
  const head = table.createTHead().insertRow();
  for (const name of ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]) {
    const th = document.createElement("th");
    th.textContent = name;
    head.appendChild(th);
  }
  const body = table.createTBody();
  for (const week of grid.weeks) {
    const row = body.insertRow();
    for (const cell of week) {
      const td = row.insertCell();
      td.className = cell.inMonth ? "in-month" : "out-month";
      const day = document.createElement("div");
      day.className = "day-number";
      day.textContent = String(cell.dayOfMonth);
      td.appendChild(day);
      for (const event of cell.events) {
        const chip = document.createElement("div");
        chip.className = "event";
        chip.textContent = eventLabel(event);
        td.appendChild(chip);
      }
    }
  }
  calendarEl.replaceChildren(table);
}

async function send(text: string): Promise<void> {
  const sessionId = state.sessionId;
  if (!canSend(state, text) || sessionId === null) return;
  state = sendStarted(state);
  renderControls();
  try {
    const payload = await api.sendUtterance(sessionId, text);
    state = replyReceived(state, text, payload);
    inputEl.value = "";
    renderTranscript();
    renderControls();
    if (payload.events_changed.length > 0) {
      await renderCalendar();
    }
  } catch {
    state = sendFailed(state, text);
    renderControls();
  }
}

sendEl.addEventListener("click", () => void send(inputEl.value));
inputEl.addEventListener("keydown", (event) => {
  if (event.key === "Enter") void send(inputEl.value);
});
retryEl.addEventListener("click", () => {
  if (state.failedText !== null) void send(state.failedText);
});
prevEl.addEventListener("click", () => {
  view = shiftMonth(view.year, view.month, -1);
  void renderCalendar();
});
nextEl.addEventListener("click", () => {
  view = shiftMonth(view.year, view.month, 1);
  void renderCalendar();
});

async function boot(): Promise<void> {
  state = sessionStarted(state, await api.createSession());
  renderControls();
  await renderCalendar();
}

void boot();

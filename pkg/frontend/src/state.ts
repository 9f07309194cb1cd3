/**
 * Chat view state and its pure transition functions.
 *
 * The transcript is append-only; the pending badge always mirrors the last
 * service payload; the input is locked while exactly one utterance is in
 * flight.  A failed send leaves the transcript unchanged and surfaces a
 * retry affordance instead.
 */

import type { UtterancePayload } from "./api.js";

export interface TranscriptTurn {
  role: "user" | "system";
  text: string;
}

export interface ChatViewState {
  sessionId: string | null;
  transcript: readonly TranscriptTurn[];
  pending: string | null;
  inputLocked: boolean;
  failedText: string | null; // text of a send that errored, for retry
}

export function initialState(): ChatViewState {
  return {
    sessionId: null,
    transcript: [],
    pending: null,
    inputLocked: false,
    failedText: null,
  };
}

export function sessionStarted(
  state: ChatViewState,
  sessionId: string,
): ChatViewState {
  return { ...state, sessionId };
}

/** The user pressed send: lock input, but do not touch the transcript yet. */
export function sendStarted(state: ChatViewState): ChatViewState {
  return { ...state, inputLocked: true, failedText: null };
}

export function replyReceived(
  state: ChatViewState,
  userText: string,
  payload: UtterancePayload,
): ChatViewState {
  return {
    ...state,
    transcript: [
      ...state.transcript,
      { role: "user", text: userText },
      { role: "system", text: payload.reply },
    ],
    pending: payload.pending,
    inputLocked: false,
    failedText: null,
  };
}

export function sendFailed(
  state: ChatViewState,
  userText: string,
): ChatViewState {
  return { ...state, inputLocked: false, failedText: userText };
}

export function canSend(state: ChatViewState, text: string): boolean {
  return !state.inputLocked && state.sessionId !== null && text.length > 0;
}

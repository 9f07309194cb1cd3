/**
 * Typed client for the dialog service JSON API.
 *
 * The UI holds no language understanding of its own: utterance text is sent
 * to the service verbatim, and every system reply string shown in the chat
 * panel comes verbatim from the service payload.
 */

export interface UtterancePayload {
  reply: string;
  pending: string | null;
  frame: string | null;
  executed: boolean;
  events_changed: string[];
}

export interface CalendarEvent {
  id: string;
  name: string;
  date: string; // YYYY-MM-DD
  time: string; // HH:MM
  duration: number; // minutes
  place: string | null;
  participants: string[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) =>
      fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, `${init?.method ?? "GET"} ${path}`);
    }
    return (await response.json()) as T;
  }

  async createSession(): Promise<string> {
    const body = await this.request<{ session_id: string }>("/sessions", {
      method: "POST",
    });
    return body.session_id;
  }

  /** Posts the user's text exactly as typed — no trimming, no rewriting. */
  async sendUtterance(
    sessionId: string,
    text: string,
  ): Promise<UtterancePayload> {
    return this.request<UtterancePayload>(
      `/sessions/${sessionId}/utterances`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ text }),
      },
    );
  }

  async fetchEvents(start?: string, end?: string): Promise<CalendarEvent[]> {
    const params = new URLSearchParams();
    if (start) params.set("start", start);
    if (end) params.set("end", end);
    const query = params.toString();
    return this.request<CalendarEvent[]>(
      "/calendar/events" + (query ? `?${query}` : ""),
    );
  }

  async health(): Promise<boolean> {
    try {
      const body = await this.request<{ status: string }>("/healthz");
      return body.status === "ok";
    } catch {
      return false;
    }
  }
}

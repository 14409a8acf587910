// Thin client over the tutoring service HTTP API. The fetch function is
// injected so tests can run against a mocked transport.

import type { AgentResponse, ApiErrorBody, SessionView } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string
  ) {
    super(message);
  }
}

async function toApiError(resp: Response): Promise<ApiError> {
  let body: ApiErrorBody | null = null;
  try {
    body = (await resp.json()) as ApiErrorBody;
  } catch {
    // non-JSON error body; fall through to a generic code
  }
  return new ApiError(resp.status, body?.error ?? "unknown", body?.message ?? resp.statusText);
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init)
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      throw await toApiError(resp);
    }
    if (resp.status === 204) {
      return undefined as T;
    }
    return (await resp.json()) as T;
  }

  createSession(learnerId: string, role: string, familiarity: string): Promise<{ session_id: string }> {
    return this.request("POST", "/api/sessions", {
      learner_id: learnerId,
      role,
      familiarity,
    });
  }

  sendMessage(sessionId: string, text: string): Promise<AgentResponse> {
    return this.request("POST", `/api/sessions/${sessionId}/messages`, { text });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/api/sessions/${sessionId}`);
  }

  submitFeedback(
    sessionId: string,
    ratings: Record<string, number>,
    freeText?: string,
    turnIndex?: number
  ): Promise<void> {
    const body: Record<string, unknown> = { ratings };
    if (freeText !== undefined && freeText !== "") {
      body.free_text = freeText;
    }
    if (turnIndex !== undefined) {
      body.turn_index = turnIndex;
    }
    return this.request("POST", `/api/sessions/${sessionId}/feedback`, body);
  }
}

import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import {
  applyGatewayFailure,
  applyResponse,
  beginSend,
  initialState,
  setDraft,
} from "../src/state.js";
import type { AgentResponse } from "../src/types.js";
import { goldenTurn1 } from "./golden.js";

type Handler = (input: string, init?: RequestInit) => Response;

function clientWith(handler: Handler): ApiClient {
  return new ApiClient("", async (input, init) => handler(input, init));
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("api client", () => {
  it("posts the message body and parses the agent response", async () => {
    const seen: { url?: string; body?: unknown } = {};
    const client = clientWith((url, init) => {
      seen.url = url;
      seen.body = JSON.parse(String(init?.body));
      return json(200, goldenTurn1);
    });
    const response = await client.sendMessage("sid123", "hello");
    expect(seen.url).toBe("/api/sessions/sid123/messages");
    expect(seen.body).toEqual({ text: "hello" });
    expect(response.scaffold_used).toBe("HighSupport");
    expect(response.plan_snapshot?.steps).toHaveLength(5);
  });

  it("maps error bodies onto ApiError with the machine-readable code", async () => {
    const client = clientWith(() =>
      json(409, { error: "turn_in_flight", message: "busy" })
    );
    const err = await client.sendMessage("sid", "x").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.code).toBe("turn_in_flight");
  });

  it("treats 204 feedback responses as success", async () => {
    const client = clientWith(() => new Response(null, { status: 204 }));
    await expect(client.submitFeedback("sid", { accuracy: 5 })).resolves.toBeUndefined();
  });

  it("feedback body omits free_text when empty", async () => {
    const bodies: unknown[] = [];
    const client = clientWith((_url, init) => {
      bodies.push(JSON.parse(String(init?.body)));
      return new Response(null, { status: 204 });
    });
    await client.submitFeedback("sid", { accuracy: 4 });
    expect(bodies[0]).toEqual({ ratings: { accuracy: 4 } });
  });

  it("a simulated 502 leaves the draft intact end-to-end", async () => {
    const client = clientWith(() =>
      json(502, { error: "gateway_failure", message: "ProviderError: down" })
    );
    let state = setDraft({ ...initialState(), sessionId: "sid" }, "draft to keep");
    state = beginSend(state);
    try {
      const response = await client.sendMessage(state.sessionId!, state.draft);
      state = applyResponse(state, response as AgentResponse);
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(502);
      state = applyGatewayFailure(state, (err as ApiError).message);
    }
    expect(state.draft).toBe("draft to keep");
    expect(state.banner.kind).toBe("retry");
    expect(state.inFlight).toBe(false);
  });
});

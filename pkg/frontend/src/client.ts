/** HTTP client for the /v1 editing API.
 *
 * At most one edit request is in flight: a newer submission aborts and
 * replaces the current one (the promise of the aborted request rejects with
 * an AbortError).
 */

import { EditRequest } from "./request.js";

export interface EditResponse {
  edited_image: string;
  parsing_visualization?: string;
  model_fingerprint: string;
}

export interface HealthResponse {
  status: "ready" | "not_ready";
  parser_fingerprint: string | null;
  inpainter_fingerprint: string | null;
}

export class ApiClient {
  readonly baseUrl: string;
  private inflight: AbortController | null = null;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  async health(): Promise<HealthResponse> {
    const response = await fetch(`${this.baseUrl}/v1/health`);
    return (await response.json()) as HealthResponse;
  }

  /** Submit an edit; cancels and replaces any in-flight edit. */
  async submitEdit(request: EditRequest): Promise<EditResponse> {
    if (this.inflight) {
      this.inflight.abort();
    }
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const response = await fetch(`${this.baseUrl}/v1/edit`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
        signal: controller.signal,
      });
      if (!response.ok) {
        const body = (await response.json().catch(() => null)) as { error?: { code?: string } } | null;
        throw new Error(`edit failed (${response.status}): ${body?.error?.code ?? "unknown_error"}`);
      }
      return (await response.json()) as EditResponse;
    } finally {
      if (this.inflight === controller) {
        this.inflight = null;
      }
    }
  }
}

/** Typed client over the scoring service HTTP API.
 *
 * Two failure modes are kept distinct: `ApiError` carries an HTTP status and
 * the service's own error message verbatim (it is shown to the operator
 * unchanged), while `ServiceUnreachable` means the request never produced a
 * response and the dashboard should raise the stale-data banner.
 */

import type {
  AlertRow,
  HomeRow,
  ModelInfo,
  RiskDay,
  ValidateResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export class ServiceUnreachable extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ServiceUnreachable";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(readonly base: string, fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let res: Response;
    try {
      res = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ServiceUnreachable(
        `service unreachable at ${this.base}: ${String(err)}`,
      );
    }
    if (!res.ok) {
      let message = `${res.status} ${res.statusText}`.trim();
      try {
        const body: unknown = await res.json();
        if (body && typeof body === "object") {
          const record = body as Record<string, unknown>;
          if (typeof record["error"] === "string") {
            message = record["error"];
          } else if (record["detail"] !== undefined) {
            message = JSON.stringify(record["detail"]);
          }
        }
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(res.status, message);
    }
    return (await res.json()) as T;
  }

  getModel(): Promise<ModelInfo> {
    return this.request<ModelInfo>("/model");
  }

  getHomes(): Promise<HomeRow[]> {
    return this.request<HomeRow[]>("/homes");
  }

  getAlerts(status?: string): Promise<AlertRow[]> {
    const query = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.request<AlertRow[]>(`/alerts${query}`);
  }

  getRisk(homeId: string, date: string): Promise<RiskDay> {
    return this.request<RiskDay>(
      `/risk/${encodeURIComponent(homeId)}/${encodeURIComponent(date)}`,
    );
  }

  validateAlert(
    alertId: string,
    outcome: "positive" | "negative",
  ): Promise<ValidateResponse> {
    return this.request<ValidateResponse>(
      `/alerts/${encodeURIComponent(alertId)}/validate`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ outcome }),
      },
    );
  }
}

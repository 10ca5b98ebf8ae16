import type {
  AlertRow,
  AlertStatus,
  HomeRow,
  ModelInfo,
  RiskDay,
} from "../src/types.js";

export function makeModel(overrides: Partial<ModelInfo> = {}): ModelInfo {
  return {
    version_tag: "v1",
    checksum: "0".repeat(64),
    threshold: 0.5,
    extractor: "de",
    classifier: "pnn",
    use_phys: false,
    homes: 2,
    days: 6,
    pending_alerts: 1,
    audit_entries: 0,
    kernels: 16,
    ...overrides,
  };
}

export function makeHome(overrides: Partial<HomeRow> = {}): HomeRow {
  const dates = overrides.dates ?? ["2020-01-01", "2020-01-02", "2020-01-03"];
  return {
    home_id: "H001",
    days: dates.length,
    latest_date: dates[dates.length - 1] ?? "2020-01-03",
    latest_probability: 0.4,
    pending_alerts: 0,
    dates,
    ...overrides,
  };
}

export function makeAlert(
  id: string,
  status: AlertStatus = "pending",
  overrides: Partial<AlertRow> = {},
): AlertRow {
  return {
    alert_id: id,
    home_id: "H001",
    date: "2020-01-02",
    probability: 0.8,
    status,
    created_at: "2020-01-02T10:00:00+00:00",
    validated_at: status === "pending" ? null : "2020-01-02T11:00:00+00:00",
    ...overrides,
  };
}

export function makeRisk(
  homeId: string,
  date: string,
  overrides: Partial<RiskDay> = {},
): RiskDay {
  return {
    home_id: homeId,
    date,
    probability: 0.3,
    alert: null,
    heatmap: Array.from({ length: 24 }, () => [0, 0]),
    nodes: ["hallway_pir", "bathroom_door"],
    ...overrides,
  };
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (err: unknown) => void;
}

export function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (err: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

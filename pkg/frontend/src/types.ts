/** Payload shapes of the scoring service HTTP API. */

export type AlertStatus = "pending" | "validated_positive" | "validated_negative";

export interface AlertRow {
  alert_id: string;
  home_id: string;
  date: string;
  probability: number;
  status: AlertStatus;
  created_at: string;
  validated_at: string | null;
}

export interface HomeRow {
  home_id: string;
  days: number;
  latest_date: string;
  latest_probability: number;
  pending_alerts: number;
  dates: string[];
}

export interface RiskDay {
  home_id: string;
  date: string;
  probability: number;
  alert: AlertRow | null;
  heatmap: number[][];
  nodes: string[];
}

export interface ModelInfo {
  version_tag: string;
  checksum: string;
  threshold: number;
  extractor: string;
  classifier: string;
  use_phys: boolean;
  homes: number;
  days: number;
  pending_alerts: number;
  audit_entries: number;
  kernels?: number;
}

export interface ValidateResponse {
  alert: AlertRow;
  version_tag: string;
}

/** Dashboard state. Everything here is a cache of service responses: no
 * field is mutated locally except on a confirmed 2xx reply, so a full page
 * reload rebuilds the identical view from the API alone.
 *
 * Validation is guarded client-side: an alert with a request in flight
 * cannot be submitted again, so a double-click produces a single request.
 * A 409 leaves the card pending (the next poll brings the server's truth)
 * and surfaces the service's message verbatim.
 */

import { ApiClient, ApiError } from "./api.js";
import type { AlertRow, HomeRow, ModelInfo, RiskDay } from "./types.js";

export interface PollSnapshot {
  model: ModelInfo;
  homes: HomeRow[];
  alerts: AlertRow[];
}

export type ValidationResult = "validated" | "duplicate" | "rejected" | "failed";

export interface AlertLanes {
  pending: AlertRow[];
  validated: AlertRow[];
}

export class DashboardStore {
  model: ModelInfo | null = null;
  homes: HomeRow[] = [];
  alerts: AlertRow[] = [];
  selectedHome: string | null = null;
  selectedDate: string | null = null;
  stale = false;
  toast: string | null = null;

  private risks = new Map<string, RiskDay>();
  private inFlight = new Set<string>();
  private listeners = new Set<() => void>();

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  applyPoll(snapshot: PollSnapshot): void {
    if (this.model && this.model.version_tag !== snapshot.model.version_tag) {
      this.risks.clear();
    }
    this.model = snapshot.model;
    this.homes = snapshot.homes;
    this.alerts = [...snapshot.alerts].sort(byAlertId);
    this.stale = false;
    if (
      this.selectedHome !== null &&
      !snapshot.homes.some((h) => h.home_id === this.selectedHome)
    ) {
      this.selectedHome = null;
      this.selectedDate = null;
    }
    this.emit();
  }

  markStale(): void {
    this.stale = true;
    this.emit();
  }

  selectHome(homeId: string | null): void {
    this.selectedHome = homeId;
    const home = this.homes.find((h) => h.home_id === homeId);
    this.selectedDate = home ? home.latest_date : null;
    this.emit();
  }

  selectDate(date: string): void {
    this.selectedDate = date;
    this.emit();
  }

  risk(homeId: string, date: string): RiskDay | undefined {
    return this.risks.get(riskKey(homeId, date));
  }

  putRisk(day: RiskDay): void {
    this.risks.set(riskKey(day.home_id, day.date), day);
    if (day.alert) this.upsertAlert(day.alert);
    this.emit();
  }

  isInFlight(alertId: string): boolean {
    return this.inFlight.has(alertId);
  }

  /** Returns false (and sends nothing) unless the alert is pending with no
   * request already in flight. */
  beginValidation(alertId: string): boolean {
    const alert = this.alerts.find((a) => a.alert_id === alertId);
    if (!alert || alert.status !== "pending" || this.inFlight.has(alertId)) {
      return false;
    }
    this.inFlight.add(alertId);
    this.emit();
    return true;
  }

  completeValidation(updated: AlertRow, versionTag: string): void {
    this.inFlight.delete(updated.alert_id);
    this.upsertAlert(updated);
    if (this.model && this.model.version_tag !== versionTag) {
      // the snapshot changed, so every cached probability is stale
      this.risks.clear();
      this.model = { ...this.model, version_tag: versionTag };
    }
    this.emit();
  }

  failValidation(alertId: string, message: string): void {
    this.inFlight.delete(alertId);
    this.toast = message;
    this.emit();
  }

  dismissToast(): void {
    this.toast = null;
    this.emit();
  }

  private upsertAlert(row: AlertRow): void {
    const i = this.alerts.findIndex((a) => a.alert_id === row.alert_id);
    if (i >= 0) {
      this.alerts[i] = row;
    } else {
      this.alerts.push(row);
      this.alerts.sort(byAlertId);
    }
  }
}

export function alertLanes(store: DashboardStore): AlertLanes {
  const pending: AlertRow[] = [];
  const validated: AlertRow[] = [];
  for (const alert of store.alerts) {
    (alert.status === "pending" ? pending : validated).push(alert);
  }
  return { pending, validated };
}

export async function submitValidation(
  store: DashboardStore,
  api: ApiClient,
  alertId: string,
  outcome: "positive" | "negative",
): Promise<ValidationResult> {
  if (!store.beginValidation(alertId)) return "duplicate";
  try {
    const res = await api.validateAlert(alertId, outcome);
    store.completeValidation(res.alert, res.version_tag);
    return "validated";
  } catch (err) {
    store.failValidation(alertId, errorMessage(err));
    return err instanceof ApiError && err.status === 409 ? "rejected" : "failed";
  }
}

function errorMessage(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

function riskKey(homeId: string, date: string): string {
  return `${homeId}|${date}`;
}

function byAlertId(a: AlertRow, b: AlertRow): number {
  return a.alert_id < b.alert_id ? -1 : a.alert_id > b.alert_id ? 1 : 0;
}

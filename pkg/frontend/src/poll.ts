/** Polling loop: model info first (so a version change invalidates cached
 * probabilities before new data lands), then homes and alerts.  A failed
 * cycle flips the stale banner and keeps the last good data on screen.
 */

import { ApiClient } from "./api.js";
import { DashboardStore, PollSnapshot } from "./store.js";

export const DEFAULT_POLL_INTERVAL_MS = 30_000;

export async function refreshOnce(
  store: DashboardStore,
  api: ApiClient,
): Promise<boolean> {
  let snapshot: PollSnapshot;
  try {
    const model = await api.getModel();
    const homes = await api.getHomes();
    const alerts = await api.getAlerts();
    snapshot = { model, homes, alerts };
  } catch {
    store.markStale();
    return false;
  }
  store.applyPoll(snapshot);
  return true;
}

export function startPolling(
  store: DashboardStore,
  api: ApiClient,
  intervalMs = DEFAULT_POLL_INTERVAL_MS,
  onCycle?: (ok: boolean) => void,
): () => void {
  let stopped = false;
  let timer: ReturnType<typeof setTimeout> | null = null;
  const cycle = async (): Promise<void> => {
    const ok = await refreshOnce(store, api);
    if (onCycle) onCycle(ok);
    if (!stopped) timer = setTimeout(() => void cycle(), intervalMs);
  };
  void cycle();
  return () => {
    stopped = true;
    if (timer) clearTimeout(timer);
  };
}

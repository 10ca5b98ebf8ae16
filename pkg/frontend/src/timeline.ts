/** Render model for a home's risk timeline: one slot per day with the
 * probability (null until its fetch lands) and the day's alert, if any, for
 * the marker.
 */

import { DashboardStore } from "./store.js";
import type { AlertRow } from "./types.js";

export interface TimelinePoint {
  date: string;
  probability: number | null;
  alert: AlertRow | null;
  selected: boolean;
}

export function timelinePoints(
  store: DashboardStore,
  homeId: string,
  dates: readonly string[],
): TimelinePoint[] {
  const alertsByDate = new Map<string, AlertRow>();
  for (const alert of store.alerts) {
    if (alert.home_id === homeId) alertsByDate.set(alert.date, alert);
  }
  return dates.map((date) => {
    const risk = store.risk(homeId, date);
    return {
      date,
      probability: risk ? risk.probability : null,
      alert: alertsByDate.get(date) ?? null,
      selected: date === store.selectedDate,
    };
  });
}

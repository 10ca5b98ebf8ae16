/** Fetches per-day risk records into the store with in-flight deduplication
 * and bounded concurrency.
 *
 * A day that failed with an HTTP error is remembered and not retried until
 * `clearFailed` runs (the poll loop calls it after each successful cycle);
 * without that, a render -> fetch -> fail -> render cycle would hammer the
 * service with the same doomed request.  Network-level failures additionally
 * flip the store's stale flag.
 */

import { ApiClient, ServiceUnreachable } from "./api.js";
import { DashboardStore } from "./store.js";
import type { RiskDay } from "./types.js";

export interface DayRef {
  homeId: string;
  date: string;
}

export class RiskLoader {
  private pending = new Map<string, Promise<RiskDay | null>>();
  private failed = new Set<string>();

  constructor(
    private readonly api: ApiClient,
    private readonly store: DashboardStore,
  ) {}

  clearFailed(): void {
    this.failed.clear();
  }

  ensure(homeId: string, date: string): Promise<RiskDay | null> {
    const cached = this.store.risk(homeId, date);
    if (cached) return Promise.resolve(cached);
    const key = `${homeId}|${date}`;
    if (this.failed.has(key)) return Promise.resolve(null);
    const running = this.pending.get(key);
    if (running) return running;
    const job = this.api
      .getRisk(homeId, date)
      .then((day) => {
        this.store.putRisk(day);
        return day as RiskDay | null;
      })
      .catch((err) => {
        this.failed.add(key);
        if (err instanceof ServiceUnreachable) this.store.markStale();
        return null;
      })
      .finally(() => {
        this.pending.delete(key);
      });
    this.pending.set(key, job);
    return job;
  }

  async ensureBatch(days: readonly DayRef[], concurrency = 4): Promise<void> {
    const queue = [...days];
    const workers = Array.from(
      { length: Math.max(1, Math.min(concurrency, queue.length)) },
      async () => {
        for (;;) {
          const next = queue.shift();
          if (!next) return;
          await this.ensure(next.homeId, next.date);
        }
      },
    );
    await Promise.all(workers);
  }

  ensureMany(
    homeId: string,
    dates: readonly string[],
    concurrency = 4,
  ): Promise<void> {
    return this.ensureBatch(
      dates.map((date) => ({ homeId, date })),
      concurrency,
    );
  }
}

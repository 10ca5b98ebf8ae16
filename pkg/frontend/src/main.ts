/** Bootstrap: wire the store, API client, risk loader, polling loop, and
 * renderer together.  The API base comes from the `?api=` query parameter,
 * defaulting to a local service.
 */

import { ApiClient } from "./api.js";
import { RiskLoader } from "./loader.js";
import { refreshOnce, startPolling } from "./poll.js";
import { Handlers, renderAll } from "./render.js";
import { lastN } from "./sparkline.js";
import { DashboardStore, submitValidation } from "./store.js";

const SPARKLINE_DAYS = 30;
const RENDER_COALESCE_MS = 40;

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return (fromQuery ?? "http://127.0.0.1:8000").replace(/\/$/, "");
}

function scheduleFetches(store: DashboardStore, loader: RiskLoader): void {
  const wanted: { homeId: string; date: string }[] = [];
  const seen = new Set<string>();
  const push = (homeId: string, date: string): void => {
    const key = `${homeId}|${date}`;
    if (seen.has(key) || store.risk(homeId, date)) return;
    seen.add(key);
    wanted.push({ homeId, date });
  };
  const selected = store.homes.find((h) => h.home_id === store.selectedHome);
  if (selected) {
    for (const date of selected.dates) push(selected.home_id, date);
  }
  for (const home of store.homes) {
    for (const date of lastN(home.dates, SPARKLINE_DAYS)) {
      push(home.home_id, date);
    }
  }
  if (wanted.length > 0) void loader.ensureBatch(wanted);
}

function start(): void {
  const store = new DashboardStore();
  const api = new ApiClient(apiBase());
  const loader = new RiskLoader(api, store);

  const handlers: Handlers = {
    onSelectHome: (homeId) => store.selectHome(homeId),
    onSelectDate: (date) => store.selectDate(date),
    onValidate: (alertId, outcome) => {
      void submitValidation(store, api, alertId, outcome);
    },
    onRefresh: () => {
      void refreshOnce(store, api).then((ok) => {
        if (ok) loader.clearFailed();
      });
    },
    onDismissToast: () => store.dismissToast(),
  };

  let renderQueued = false;
  const render = (): void => {
    renderQueued = false;
    renderAll(store, handlers);
    scheduleFetches(store, loader);
  };
  store.subscribe(() => {
    if (renderQueued) return;
    renderQueued = true;
    setTimeout(render, RENDER_COALESCE_MS);
  });

  startPolling(store, api, undefined, (ok) => {
    if (ok) loader.clearFailed();
  });
  render();
}

start();

/** DOM layer: maps the store and view models onto the static page skeleton
 * in index.html.  All interaction handlers are injected by main.ts so this
 * module stays free of fetch logic.
 */

import { heatmapModel } from "./heatmap.js";
import { lastN, sparklineGeometry } from "./sparkline.js";
import { alertLanes, DashboardStore } from "./store.js";
import { timelinePoints } from "./timeline.js";
import type { AlertRow, HomeRow } from "./types.js";

export interface Handlers {
  onSelectHome(homeId: string): void;
  onSelectDate(date: string): void;
  onValidate(alertId: string, outcome: "positive" | "negative"): void;
  onRefresh(): void;
  onDismissToast(): void;
}

const SVG_NS = "http://www.w3.org/2000/svg";
const SPARKLINE_DAYS = 30;

export function renderAll(store: DashboardStore, handlers: Handlers): void {
  renderHeader(store, handlers);
  renderHomes(store, handlers);
  renderTimeline(store, handlers);
  renderHeatmapPanel(store);
  renderAlerts(store, handlers);
  renderToast(store, handlers);
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id} in page skeleton`);
  return node;
}

function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function fmtProb(p: number | null): string {
  return p === null ? "…" : p.toFixed(3);
}

function renderHeader(store: DashboardStore, handlers: Handlers): void {
  const info = byId("model-info");
  if (store.model) {
    const m = store.model;
    const kernels = m.kernels !== undefined ? ` · ${m.kernels} kernels` : "";
    info.textContent =
      `model ${m.version_tag} · ${m.extractor}+${m.classifier}` +
      `${m.use_phys ? "+phys" : ""} · threshold ${m.threshold.toFixed(2)}` +
      `${kernels} · ${m.homes} homes / ${m.days} days`;
    info.title = `snapshot sha256 ${m.checksum}`;
  } else {
    info.textContent = "connecting…";
  }
  byId("stale-banner").hidden = !store.stale;
  const refresh = byId("refresh") as HTMLButtonElement;
  refresh.onclick = () => handlers.onRefresh();
}

function homeRow(
  store: DashboardStore,
  home: HomeRow,
  handlers: Handlers,
): HTMLElement {
  const row = el("div", {
    class: `home-row${home.home_id === store.selectedHome ? " selected" : ""}`,
  });
  row.addEventListener("click", () => handlers.onSelectHome(home.home_id));
  const badge =
    home.pending_alerts > 0
      ? [el("span", { class: "badge" }, [String(home.pending_alerts)])]
      : [];
  row.append(
    el("div", { class: "home-row-top" }, [
      el("span", { class: "home-id" }, [home.home_id]),
      ...badge,
      el("span", { class: "home-prob" }, [fmtProb(home.latest_probability)]),
    ]),
    sparklineSvg(store, home),
  );
  return row;
}

function sparklineSvg(store: DashboardStore, home: HomeRow): SVGSVGElement {
  const dates = lastN(home.dates, SPARKLINE_DAYS);
  const series = dates.map((date) => {
    const risk = store.risk(home.home_id, date);
    return risk ? risk.probability : null;
  });
  const geo = sparklineGeometry(series);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "sparkline");
  svg.setAttribute("viewBox", `0 0 ${geo.width} ${geo.height}`);
  svg.setAttribute("width", String(geo.width));
  svg.setAttribute("height", String(geo.height));
  for (const points of geo.segments) {
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("points", points);
    svg.append(line);
  }
  return svg;
}

function renderHomes(store: DashboardStore, handlers: Handlers): void {
  const panel = byId("homes");
  panel.replaceChildren(
    el("h2", {}, [`homes (${store.homes.length})`]),
    ...store.homes.map((home) => homeRow(store, home, handlers)),
  );
}

function renderTimeline(store: DashboardStore, handlers: Handlers): void {
  const panel = byId("timeline");
  if (!store.selectedHome) {
    panel.replaceChildren(
      el("p", { class: "hint" }, ["select a home to see its risk timeline"]),
    );
    return;
  }
  const home = store.homes.find((h) => h.home_id === store.selectedHome);
  if (!home) {
    panel.replaceChildren();
    return;
  }
  const points = timelinePoints(store, home.home_id, home.dates);
  const width = Math.max(320, points.length * 14);
  const height = 120;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "timeline-chart");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));

  const threshold = store.model ? store.model.threshold : 0.5;
  const yFor = (p: number): number => 8 + (1 - p) * (height - 28);
  const rule = document.createElementNS(SVG_NS, "line");
  rule.setAttribute("class", "threshold-line");
  rule.setAttribute("x1", "0");
  rule.setAttribute("x2", String(width));
  rule.setAttribute("y1", String(yFor(threshold)));
  rule.setAttribute("y2", String(yFor(threshold)));
  svg.append(rule);

  points.forEach((point, i) => {
    const x = 4 + i * 14;
    if (point.probability !== null) {
      const bar = document.createElementNS(SVG_NS, "rect");
      const top = yFor(point.probability);
      bar.setAttribute("x", String(x));
      bar.setAttribute("width", "10");
      bar.setAttribute("y", String(top));
      bar.setAttribute("height", String(Math.max(1, height - 20 - top)));
      bar.setAttribute(
        "class",
        `bar${point.probability >= threshold ? " above" : ""}` +
          `${point.selected ? " selected" : ""}`,
      );
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${point.date}: ${fmtProb(point.probability)}`;
      bar.append(title);
      bar.addEventListener("click", () => handlers.onSelectDate(point.date));
      svg.append(bar);
    }
    if (point.alert) {
      const marker = document.createElementNS(SVG_NS, "circle");
      marker.setAttribute("cx", String(x + 5));
      marker.setAttribute("cy", "4");
      marker.setAttribute("r", "3");
      marker.setAttribute("class", `marker ${point.alert.status}`);
      svg.append(marker);
    }
  });
  panel.replaceChildren(
    el("h2", {}, [
      `${home.home_id} · ${points.length} days`,
      store.selectedDate
        ? el("span", { class: "muted" }, [` · ${store.selectedDate}`])
        : "",
    ]),
    svg,
  );
}

function renderHeatmapPanel(store: DashboardStore): void {
  const panel = byId("heatmap");
  if (!store.selectedHome || !store.selectedDate) {
    panel.replaceChildren();
    return;
  }
  const risk = store.risk(store.selectedHome, store.selectedDate);
  if (!risk) {
    panel.replaceChildren(el("p", { class: "hint" }, ["loading day…"]));
    return;
  }
  const model = heatmapModel(risk.heatmap, risk.nodes);
  const grid = el("div", {
    class: "heatmap-grid",
    style: `grid-template-columns: 3em repeat(${model.nodes.length}, 1fr)`,
  });
  grid.append(el("div", {}, []));
  for (const node of model.nodes) {
    grid.append(el("div", { class: "node-label", title: node }, [node]));
  }
  for (const row of model.rows) {
    grid.append(
      el("div", { class: "hour-label" }, [`${String(row.hour).padStart(2, "0")}h`]),
    );
    for (const cell of row.cells) {
      grid.append(
        el(
          "div",
          {
            class: "cell",
            style: `background: rgba(196, 86, 56, ${cell.intensity.toFixed(3)})`,
            title: String(cell.value),
          },
          [],
        ),
      );
    }
  }
  panel.replaceChildren(
    el("h2", {}, [
      `${risk.date} · probability ${fmtProb(risk.probability)} · peak ${model.max} events/h`,
    ]),
    grid,
  );
}

function alertCard(
  store: DashboardStore,
  alert: AlertRow,
  handlers: Handlers,
): HTMLElement {
  const busy = store.isInFlight(alert.alert_id);
  const card = el("div", { class: `alert-card ${alert.status}` }, [
    el("div", { class: "alert-head" }, [
      el("span", { class: "alert-id" }, [alert.alert_id]),
      el("span", { class: "alert-home" }, [`${alert.home_id} · ${alert.date}`]),
      el("span", { class: "alert-prob" }, [fmtProb(alert.probability)]),
    ]),
  ]);
  card.addEventListener("click", () => {
    handlers.onSelectHome(alert.home_id);
    handlers.onSelectDate(alert.date);
  });
  if (alert.status === "pending") {
    const positive = el(
      "button",
      { class: "confirm" },
      [busy ? "sending…" : "confirm UTI"],
    ) as HTMLButtonElement;
    const negative = el("button", {}, [
      busy ? "sending…" : "not UTI",
    ]) as HTMLButtonElement;
    positive.disabled = busy;
    negative.disabled = busy;
    positive.addEventListener("click", (ev) => {
      ev.stopPropagation();
      handlers.onValidate(alert.alert_id, "positive");
    });
    negative.addEventListener("click", (ev) => {
      ev.stopPropagation();
      handlers.onValidate(alert.alert_id, "negative");
    });
    card.append(el("div", { class: "alert-actions" }, [positive, negative]));
  } else {
    card.append(
      el("div", { class: "alert-outcome" }, [
        alert.status === "validated_positive" ? "validated: UTI" : "validated: no UTI",
        alert.validated_at
          ? el("span", { class: "muted" }, [` · ${alert.validated_at}`])
          : "",
      ]),
    );
  }
  return card;
}

function renderAlerts(store: DashboardStore, handlers: Handlers): void {
  const lanes = alertLanes(store);
  byId("lane-pending").replaceChildren(
    el("h2", {}, [`pending (${lanes.pending.length})`]),
    ...lanes.pending.map((a) => alertCard(store, a, handlers)),
  );
  byId("lane-validated").replaceChildren(
    el("h2", {}, [`validated (${lanes.validated.length})`]),
    ...lanes.validated.map((a) => alertCard(store, a, handlers)),
  );
}

function renderToast(store: DashboardStore, handlers: Handlers): void {
  const toast = byId("toast");
  if (store.toast === null) {
    toast.hidden = true;
    toast.replaceChildren();
    return;
  }
  toast.hidden = false;
  const close = el("button", { class: "toast-close" }, ["dismiss"]);
  close.addEventListener("click", () => handlers.onDismissToast());
  toast.replaceChildren(el("span", {}, [store.toast]), close);
}

import { describe, expect, it } from "vitest";

import { heatmapModel } from "../src/heatmap.js";

const NODES = ["hallway_pir", "bathroom_door", "bed_pressure"];

function zeroGrid(): number[][] {
  return Array.from({ length: 24 }, () => [0, 0, 0]);
}

describe("heatmapModel", () => {
  it("normalizes every cell by the day's maximum", () => {
    const grid = zeroGrid();
    grid[9] = [2, 8, 4];
    grid[21] = [1, 0, 2];
    const model = heatmapModel(grid, NODES);
    expect(model.max).toBe(8);
    expect(model.rows[9]?.cells[1]?.intensity).toBe(1);
    expect(model.rows[9]?.cells[0]?.intensity).toBeCloseTo(0.25, 12);
    expect(model.rows[21]?.cells[2]?.intensity).toBeCloseTo(0.25, 12);
    expect(model.rows[0]?.cells[0]?.intensity).toBe(0);
  });

  it("keeps hour order and node labels", () => {
    const model = heatmapModel(zeroGrid(), NODES);
    expect(model.rows.map((r) => r.hour)).toEqual(
      Array.from({ length: 24 }, (_, h) => h),
    );
    expect(model.nodes).toEqual(NODES);
  });

  it("renders a zero-activity day as a uniform empty grid", () => {
    const model = heatmapModel(zeroGrid(), NODES);
    expect(model.max).toBe(0);
    for (const row of model.rows) {
      for (const cell of row.cells) {
        expect(cell.intensity).toBe(0);
      }
    }
  });

  it("shows an elevated bathroom column prominently", () => {
    const grid = zeroGrid();
    for (let hour = 0; hour < 24; hour += 1) {
      grid[hour] = [1, hour < 6 ? 6 : 3, 1];
    }
    const model = heatmapModel(grid, NODES);
    const meanIntensity = (col: number): number =>
      model.rows.reduce((s, r) => s + (r.cells[col]?.intensity ?? 0), 0) / 24;
    expect(meanIntensity(1)).toBeGreaterThan(2 * meanIntensity(0));
    expect(meanIntensity(1)).toBeGreaterThan(2 * meanIntensity(2));
  });

  it("rejects grids without 24 hourly rows", () => {
    expect(() => heatmapModel(zeroGrid().slice(0, 23), NODES)).toThrow(/24/);
  });

  it("rejects rows that do not match the node list", () => {
    const grid = zeroGrid();
    grid[5] = [1, 2];
    expect(() => heatmapModel(grid, NODES)).toThrow(/width/);
  });
});

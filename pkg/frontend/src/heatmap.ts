/** Render model for the daily activity heatmap: 24 hourly rows by one column
 * per sensor node.  Cell intensity is normalized by the day's own maximum so
 * low-activity homes stay readable; a day with no activity at all renders as
 * a uniform empty grid.
 */

export interface HeatmapCell {
  value: number;
  /** value / day maximum, in [0, 1]; 0 everywhere on an all-zero day. */
  intensity: number;
}

export interface HeatmapRow {
  hour: number;
  cells: HeatmapCell[];
}

export interface HeatmapModel {
  nodes: string[];
  max: number;
  rows: HeatmapRow[];
}

const HOURS_PER_DAY = 24;

export function heatmapModel(grid: number[][], nodes: string[]): HeatmapModel {
  if (grid.length !== HOURS_PER_DAY) {
    throw new Error(`expected ${HOURS_PER_DAY} hourly rows, got ${grid.length}`);
  }
  for (const row of grid) {
    if (row.length !== nodes.length) {
      throw new Error(
        `row width ${row.length} does not match ${nodes.length} nodes`,
      );
    }
  }
  let max = 0;
  for (const row of grid) {
    for (const value of row) {
      if (value > max) max = value;
    }
  }
  const rows = grid.map((row, hour) => ({
    hour,
    cells: row.map((value) => ({
      value,
      intensity: max > 0 ? value / max : 0,
    })),
  }));
  return { nodes: [...nodes], max, rows };
}

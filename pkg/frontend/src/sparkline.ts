/** Tiny SVG sparkline geometry for a probability series.
 *
 * Probabilities map to polyline coordinates inside a fixed viewport; slots
 * whose value has not loaded yet are gaps, splitting the line into segments
 * rather than interpolating across missing days.
 */

export interface SparklineGeometry {
  width: number;
  height: number;
  /** One SVG polyline `points` string per run of consecutive known values. */
  segments: string[];
}

export function lastN<T>(items: readonly T[], n: number): T[] {
  if (n <= 0) return [];
  return items.slice(Math.max(0, items.length - n));
}

export function sparklineGeometry(
  series: ReadonlyArray<number | null>,
  width = 120,
  height = 28,
  pad = 2,
): SparklineGeometry {
  const segments: string[] = [];
  let current: string[] = [];
  const innerWidth = width - 2 * pad;
  const innerHeight = height - 2 * pad;
  const step = series.length > 1 ? innerWidth / (series.length - 1) : 0;
  series.forEach((value, i) => {
    if (value === null) {
      if (current.length > 0) segments.push(current.join(" "));
      current = [];
      return;
    }
    const p = Math.min(1, Math.max(0, value));
    const x = series.length > 1 ? pad + i * step : width / 2;
    const y = pad + (1 - p) * innerHeight;
    current.push(`${round2(x)},${round2(y)}`);
  });
  if (current.length > 0) segments.push(current.join(" "));
  return { width, height, segments };
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

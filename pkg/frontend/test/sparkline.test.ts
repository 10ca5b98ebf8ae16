import { describe, expect, it } from "vitest";

import { lastN, sparklineGeometry } from "../src/sparkline.js";

describe("sparklineGeometry", () => {
  it("maps probabilities onto the viewport", () => {
    const geo = sparklineGeometry([0, 0.5, 1], 120, 28, 2);
    expect(geo.segments).toHaveLength(1);
    const points = geo.segments[0]?.split(" ");
    expect(points).toEqual(["2,26", "60,14", "118,2"]);
  });

  it("splits the line at unloaded days", () => {
    const geo = sparklineGeometry([0.2, null, 0.8, 0.9]);
    expect(geo.segments).toHaveLength(2);
    expect(geo.segments[0]?.split(" ")).toHaveLength(1);
    expect(geo.segments[1]?.split(" ")).toHaveLength(2);
  });

  it("clamps values outside [0, 1]", () => {
    const geo = sparklineGeometry([-0.5, 1.5], 120, 28, 2);
    const [low, high] = geo.segments[0]?.split(" ") ?? [];
    expect(low?.endsWith(",26")).toBe(true);
    expect(high?.endsWith(",2")).toBe(true);
  });

  it("handles empty and single-point series", () => {
    expect(sparklineGeometry([]).segments).toEqual([]);
    expect(sparklineGeometry([null, null]).segments).toEqual([]);
    const single = sparklineGeometry([0.5], 120, 28, 2);
    expect(single.segments).toEqual(["60,14"]);
  });
});

describe("lastN", () => {
  it("keeps the most recent entries", () => {
    const dates = Array.from({ length: 40 }, (_, i) => `d${i}`);
    const window = lastN(dates, 30);
    expect(window).toHaveLength(30);
    expect(window[0]).toBe("d10");
    expect(window[29]).toBe("d39");
  });

  it("returns everything when the series is short", () => {
    expect(lastN(["a", "b"], 30)).toEqual(["a", "b"]);
    expect(lastN([], 30)).toEqual([]);
    expect(lastN(["a"], 0)).toEqual([]);
  });
});

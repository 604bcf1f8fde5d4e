import { describe, expect, it } from "vitest";
import { MissingColumnError, parseCsv, requireColumns } from "../src/csv.js";

describe("parseCsv", () => {
  it("splits header and numeric rows", () => {
    const t = parseCsv("a,b\n1,2\n3,4.5\n");
    expect(t.columns).toEqual(["a", "b"]);
    expect(t.rows).toEqual([[1, 2], [3, 4.5]]);
  });

  it("handles scientific notation and repr-style floats", () => {
    const t = parseCsv("v\n1e-05\n0.6671558867220894\n");
    expect(t.rows[0][0]).toBeCloseTo(1e-5, 12);
    expect(t.rows[1][0]).toBeCloseTo(0.6671558867220894, 15);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow();
  });
});

describe("requireColumns", () => {
  it("extracts columns in the requested order", () => {
    const t = parseCsv("x,y,value\n1,2,3\n4,5,6\n");
    const [vals, xs] = requireColumns(t, ["value", "x"]);
    expect(vals).toEqual([3, 6]);
    expect(xs).toEqual([1, 4]);
  });

  it("names the missing column", () => {
    const t = parseCsv("x,y\n1,2\n");
    expect(() => requireColumns(t, ["x", "value"], "heatmap.csv"))
      .toThrow(MissingColumnError);
    try {
      requireColumns(t, ["value"], "heatmap.csv");
    } catch (err) {
      expect((err as MissingColumnError).column).toBe("value");
      expect((err as Error).message).toContain("value");
      expect((err as Error).message).toContain("heatmap.csv");
    }
  });
});

import { describe, expect, it } from "vitest";
import { hashName, PALETTE_SIZE, termBorder, termColor } from "../src/colors.js";

// Expected values computed with an independent FNV-1a implementation,
// frozen here so the mapping can never drift silently: a term's color is
// part of the editor's visual contract across documents and sessions.
const FROZEN: [string, number, string, string][] = [
  ["adult", 3058793743, "#FFD54F", "#FFC107"],
  ["smoke", 1611018502, "#E1BEE7", "#BA68C8"],
  ["punishment_fine", 3953270833, "#C8E6C9", "#81C784"],
  ["child_in_vehicle", 2103822174, "#DCEDC8", "#AED581"],
  ["the_light_is_red", 2371833032, "#FFCCBC", "#FF8A65"],
];

describe("term colors", () => {
  it("hashes names to the frozen FNV-1a values", () => {
    for (const [name, hash] of FROZEN) {
      expect(hashName(name)).toBe(hash);
    }
  });

  it("assigns the frozen palette entries", () => {
    for (const [name, , color, border] of FROZEN) {
      expect(termColor(name)).toBe(color);
      expect(termBorder(name)).toBe(border);
    }
  });

  it("is deterministic across calls", () => {
    expect(termColor("vehicle_in_public_place")).toBe(termColor("vehicle_in_public_place"));
    expect(termBorder("vehicle_in_public_place")).toBe(termBorder("vehicle_in_public_place"));
  });

  it("indexes the palette by hash mod size", () => {
    expect(PALETTE_SIZE).toBe(12);
    for (const [name, hash] of FROZEN) {
      expect(hashName(name) % PALETTE_SIZE).toBe(hash % 12);
    }
  });

  it("never returns an empty color", () => {
    for (const name of ["a", "zzzz", "x_1", "weird_but_legal_name_9"]) {
      expect(termColor(name)).toMatch(/^#[0-9A-F]{6}$/);
      expect(termBorder(name)).toMatch(/^#[0-9A-F]{6}$/);
    }
  });
});

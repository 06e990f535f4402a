// Term colors: a fixed palette indexed by a hash of the term name, so
// the same term looks the same across documents, tabs and sessions.

const PALETTE = [
  "#BBDEFB", "#C8E6C9", "#FFE0B2", "#F8BBD0",
  "#D1C4E9", "#B2EBF2", "#DCEDC8", "#FFD54F",
  "#FFCCBC", "#CFD8DC", "#E1BEE7", "#B3E5FC",
];

// Matching border shades, same index as PALETTE
const BORDERS = [
  "#64B5F6", "#81C784", "#FFB74D", "#F06292",
  "#9575CD", "#4DD0E1", "#AED581", "#FFC107",
  "#FF8A65", "#90A4AE", "#BA68C8", "#4FC3F7",
];

/** FNV-1a, 32 bit. Stable across platforms for ASCII term names. */
export function hashName(name: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < name.length; i++) {
    h ^= name.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

export function termColor(name: string): string {
  return PALETTE[hashName(name) % PALETTE.length]!;
}

export function termBorder(name: string): string {
  return BORDERS[hashName(name) % BORDERS.length]!;
}

export const PALETTE_SIZE = PALETTE.length;

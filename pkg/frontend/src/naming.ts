// Automatic term naming: the prefilled suggestion when the user marks a
// selection as a term. Same normalization the server applies, so the
// prefill is always a name the server will accept.

export class NamingError extends Error {}

/**
 * Propose a term name for selected text: lowercase, every run of
 * non-alphanumerics collapsed to one underscore, trimmed. When the name
 * is already taken, append the first free _2, _3, ... suffix.
 */
export function autoName(selectedText: string, taken: Iterable<string> = []): string {
  const base = selectedText
    .toLowerCase()
    .replace(/[^a-z0-9]+/g, "_")
    .replace(/^_+|_+$/g, "");
  if (!base || !/^[a-z]/.test(base)) {
    throw new NamingError(
      `cannot derive a term name from ${JSON.stringify(selectedText)}; choose one manually`);
  }
  const used = new Set(taken);
  if (!used.has(base)) return base;
  let n = 2;
  while (used.has(`${base}_${n}`)) n++;
  return `${base}_${n}`;
}

/** Valid term name as the server checks it. */
export function isTermName(name: string): boolean {
  return /^[a-z][A-Za-z0-9_]*$/.test(name);
}

/**
 * Parse the term dialog's input: either a bare name ("adult") or a name
 * with arguments ("owns(X, c)"). Returns null when the text is not a
 * well-formed term.
 */
export function parseTermInput(text: string): { name: string; args: string[] } | null {
  const m = /^\s*([a-z][A-Za-z0-9_]*)\s*(?:\(([^)]*)\))?\s*$/.exec(text);
  if (!m) return null;
  const name = m[1]!;
  if (m[2] === undefined) return { name, args: [] };
  const inner = m[2].trim();
  if (inner === "") return { name, args: [] };
  const args = inner.split(",").map(a => a.trim());
  if (!args.every(isTermArg)) return null;
  return { name, args };
}

/** Valid term argument: variable (uppercase) or constant (lowercase). */
export function isTermArg(arg: string): boolean {
  return /^[A-Za-z][A-Za-z0-9_]*$/.test(arg);
}

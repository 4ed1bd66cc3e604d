/**
 * Autosave persistence: the session is written to browser-local storage on
 * every mutation and restored on reload. Anything malformed in storage is
 * treated as no saved session rather than an error.
 */

import { isLabel } from "./conll.js";
import type { SavedSession } from "./session.js";

export const STORAGE_KEY = "sorani-ner-annotator/session";

export function saveSession(storage: Storage, saved: SavedSession): void {
  storage.setItem(STORAGE_KEY, JSON.stringify(saved));
}

export function clearSession(storage: Storage): void {
  storage.removeItem(STORAGE_KEY);
}

export function loadSession(storage: Storage): SavedSession | null {
  const raw = storage.getItem(STORAGE_KEY);
  if (raw === null) {
    return null;
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof parsed !== "object" || parsed === null) {
    return null;
  }
  const candidate = parsed as Partial<SavedSession>;
  if (!Array.isArray(candidate.rows) || !Array.isArray(candidate.original)) {
    return null;
  }
  if (candidate.rows.length !== candidate.original.length) {
    return null;
  }
  for (const row of candidate.rows) {
    if (typeof row !== "object" || row === null) {
      return null;
    }
    const r = row as { token?: unknown; tag?: unknown; sentence?: unknown };
    if (typeof r.token !== "string" || typeof r.tag !== "string" || !isLabel(r.tag)) {
      return null;
    }
    if (typeof r.sentence !== "number") {
      return null;
    }
  }
  return {
    rows: candidate.rows,
    original: candidate.original,
    page: typeof candidate.page === "number" ? candidate.page : 0,
    mode: candidate.mode === "non-O" ? "non-O" : "changed",
  };
}

/**
 * Keyboard shortcuts for tag assignment.
 *
 * Digits 1-9 and 0 map to the ten entity tags; Shift+1 assigns O. Together
 * the bindings are a bijection onto the 11-label set. Resolution prefers
 * the physical key code (Digit1 stays "1" even when Shift turns the key
 * value into "!") and falls back to the key value for synthetic events.
 */

import type { Label } from "./conll.js";

export const SHORTCUTS: ReadonlyMap<string, Label> = new Map<string, Label>([
  ["1", "B-PER"],
  ["2", "I-PER"],
  ["3", "B-LOC"],
  ["4", "I-LOC"],
  ["5", "B-ORG"],
  ["6", "I-ORG"],
  ["7", "B-DATE"],
  ["8", "I-DATE"],
  ["9", "B-MISC"],
  ["0", "I-MISC"],
]);

export const MODIFIED_ONE: Label = "O";

export interface KeyLike {
  key: string;
  code?: string;
  shiftKey: boolean;
}

/** Label bound to a key event, or null when the event has no binding. */
export function labelForKey(event: KeyLike): Label | null {
  let digit: string | null = null;
  if (event.code) {
    const match = /^(?:Digit|Numpad)([0-9])$/.exec(event.code);
    if (match) {
      digit = match[1] as string;
    }
  }
  if (digit === null && /^[0-9]$/.test(event.key)) {
    digit = event.key;
  }
  if (digit === null) {
    return null;
  }
  if (event.shiftKey) {
    return digit === "1" ? MODIFIED_ONE : null;
  }
  return SHORTCUTS.get(digit) ?? null;
}

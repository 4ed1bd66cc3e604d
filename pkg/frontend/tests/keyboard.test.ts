import { describe, expect, it } from "vitest";

import { LABELS } from "../src/conll.js";
import { MODIFIED_ONE, SHORTCUTS, labelForKey } from "../src/keyboard.js";

describe("labelForKey", () => {
  it("maps plain digits to the entity tags", () => {
    expect(labelForKey({ key: "1", shiftKey: false })).toBe("B-PER");
    expect(labelForKey({ key: "3", shiftKey: false })).toBe("B-LOC");
    expect(labelForKey({ key: "9", shiftKey: false })).toBe("B-MISC");
    expect(labelForKey({ key: "0", shiftKey: false })).toBe("I-MISC");
  });

  it("prefers the physical key code over the key value", () => {
    expect(labelForKey({ key: "٣", code: "Digit3", shiftKey: false })).toBe("B-LOC");
    expect(labelForKey({ key: "5", code: "Numpad5", shiftKey: false })).toBe("B-ORG");
  });

  it("maps Shift+1 to O in both event shapes", () => {
    expect(labelForKey({ key: "!", code: "Digit1", shiftKey: true })).toBe("O");
    expect(labelForKey({ key: "1", shiftKey: true })).toBe("O");
  });

  it("leaves other shifted digits and non-digits unbound", () => {
    expect(labelForKey({ key: "#", code: "Digit3", shiftKey: true })).toBeNull();
    expect(labelForKey({ key: "2", shiftKey: true })).toBeNull();
    expect(labelForKey({ key: "a", shiftKey: false })).toBeNull();
    expect(labelForKey({ key: "Enter", code: "Enter", shiftKey: false })).toBeNull();
    expect(labelForKey({ key: "Shift", code: "ShiftLeft", shiftKey: true })).toBeNull();
  });

  it("is a bijection onto the full label set", () => {
    const bound = [...SHORTCUTS.values(), MODIFIED_ONE];
    expect(bound).toHaveLength(11);
    expect(new Set(bound)).toEqual(new Set(LABELS));
    expect(SHORTCUTS.size).toBe(10);
  });
});

import { describe, expect, it } from "vitest";

import { parseConll } from "../src/conll.js";
import { AnnotationSession, ROWS_PER_PAGE } from "../src/session.js";
import { STORAGE_KEY, clearSession, loadSession, saveSession } from "../src/storage.js";
import { fixtureText, memoryStorage } from "./fixtures.js";

function fixtureSession(rows = 250): AnnotationSession {
  return new AnnotationSession(parseConll(fixtureText(rows)).rows);
}

describe("paging", () => {
  it("splits 250 rows into pages of 100, 100, and 50", () => {
    const session = fixtureSession();
    expect(ROWS_PER_PAGE).toBe(100);
    expect(session.pageCount).toBe(3);
    const lengths = [0, 1, 2].map((page) => {
      session.goToPage(page);
      return session.pageRows().length;
    });
    expect(lengths).toEqual([100, 100, 50]);
  });

  it("pageRows carries absolute indices", () => {
    const session = fixtureSession();
    session.goToPage(2);
    const rows = session.pageRows();
    expect(rows[0]?.index).toBe(200);
    expect(rows[49]?.index).toBe(249);
    expect(rows[0]?.row.token).toBe("w200");
  });

  it("clamps navigation at both ends", () => {
    const session = fixtureSession();
    expect(session.previousPage()).toBe(0);
    expect(session.goToPage(-4)).toBe(0);
    expect(session.goToPage(99)).toBe(2);
    expect(session.nextPage()).toBe(2);
    session.goToPage(1);
    expect(session.page).toBe(1);
  });

  it("handles the empty session", () => {
    const session = new AnnotationSession([]);
    expect(session.size).toBe(0);
    expect(session.pageCount).toBe(0);
    expect(session.goToPage(5)).toBe(0);
    expect(session.pageRows()).toEqual([]);
    expect(session.exportText()).toBe("");
  });

  it("an exact multiple of the page size has no ragged page", () => {
    const session = fixtureSession(200);
    expect(session.pageCount).toBe(2);
    session.goToPage(1);
    expect(session.pageRows()).toHaveLength(100);
  });
});

describe("tag assignment", () => {
  it("mutates only the tag and sets the dirty flag", () => {
    const session = fixtureSession();
    expect(session.dirty).toBe(false);
    session.setTag(3, "B-LOC");
    expect(session.row(3)).toEqual({ token: "w3", tag: "B-LOC", sentence: 0 });
    expect(session.dirty).toBe(true);
    expect(session.size).toBe(250);
  });

  it("assigning the current tag does not dirty the session", () => {
    const session = fixtureSession();
    session.setTag(0, "O");
    expect(session.dirty).toBe(false);
  });

  it("rejects bad indices and bad tags", () => {
    const session = fixtureSession(5);
    expect(() => session.row(5)).toThrow(RangeError);
    expect(() => session.setTag(-1, "O")).toThrow(RangeError);
    // @ts-expect-error the tag union excludes arbitrary strings
    expect(() => session.setTag(0, "B-GPE")).toThrow(/B-GPE/);
  });

  it("a single change makes the export differ on exactly one line", () => {
    const session = fixtureSession();
    session.setTag(42, "B-DATE");
    const before = fixtureText().split("\n");
    const after = session.exportText().split("\n");
    expect(after).toHaveLength(before.length);
    const changed = before.filter((line, i) => line !== after[i]);
    expect(changed).toEqual(["w42 O"]);
    expect(after[before.indexOf("w42 O")]).toBe("w42 B-DATE");
  });

  it("zero changes export the canonical input byte for byte", () => {
    const session = fixtureSession();
    expect(session.exportText()).toBe(fixtureText());
  });
});

describe("progress", () => {
  it("counts changed rows by default and non-O rows after toggling", () => {
    const rows = parseConll("a B-PER\nb O\nc O\n").rows;
    const session = new AnnotationSession(rows);
    expect(session.progress()).toEqual({ annotated: 0, total: 3, mode: "changed" });
    session.setTag(1, "I-PER");
    expect(session.progress()).toEqual({ annotated: 1, total: 3, mode: "changed" });
    expect(session.toggleMode()).toBe("non-O");
    expect(session.progress()).toEqual({ annotated: 2, total: 3, mode: "non-O" });
    expect(session.toggleMode()).toBe("changed");
  });

  it("reverting a change removes it from the changed count", () => {
    const session = fixtureSession(10);
    session.setTag(2, "B-ORG");
    session.setTag(2, "O");
    expect(session.progress().annotated).toBe(0);
    expect(session.dirty).toBe(true);
  });
});

describe("export bookkeeping", () => {
  it("markExported clears the dirty flag without touching rows", () => {
    const session = fixtureSession(10);
    session.setTag(0, "B-PER");
    session.markExported();
    expect(session.dirty).toBe(false);
    expect(session.row(0).tag).toBe("B-PER");
  });
});

describe("persistence", () => {
  it("toJSON and restore round-trip rows, page, mode, and dirty state", () => {
    const session = fixtureSession();
    session.setTag(7, "I-LOC");
    session.goToPage(2);
    session.toggleMode();
    const restored = AnnotationSession.restore(session.toJSON());
    expect(restored.size).toBe(250);
    expect(restored.row(7).tag).toBe("I-LOC");
    expect(restored.page).toBe(2);
    expect(restored.mode).toBe("non-O");
    expect(restored.dirty).toBe(true);
    expect(restored.progress().annotated).toBe(1);
    expect(restored.exportText()).toBe(session.exportText());
  });

  it("restore clamps an out-of-range saved page", () => {
    const saved = fixtureSession(50).toJSON();
    saved.page = 9;
    expect(AnnotationSession.restore(saved).page).toBe(0);
  });

  it("restore deep-copies: mutating the restored session leaves the snapshot alone", () => {
    const saved = fixtureSession(10).toJSON();
    const restored = AnnotationSession.restore(saved);
    restored.setTag(0, "B-MISC");
    expect(saved.rows[0]?.tag).toBe("O");
  });

  it("saveSession and loadSession round-trip through Storage", () => {
    const storage = memoryStorage();
    const session = fixtureSession(30);
    session.setTag(1, "B-PER");
    saveSession(storage, session.toJSON());
    expect(storage.getItem(STORAGE_KEY)).not.toBeNull();
    const loaded = loadSession(storage);
    expect(loaded).not.toBeNull();
    expect(AnnotationSession.restore(loaded!).row(1).tag).toBe("B-PER");
    clearSession(storage);
    expect(loadSession(storage)).toBeNull();
  });

  it("loadSession rejects malformed payloads instead of throwing", () => {
    const storage = memoryStorage();
    const cases = [
      "not json",
      "42",
      "null",
      JSON.stringify({ rows: "nope", original: [] }),
      JSON.stringify({ rows: [{ token: "a", tag: "O", sentence: 0 }], original: [] }),
      JSON.stringify({ rows: [{ token: "a", tag: "BAD", sentence: 0 }], original: ["O"] }),
      JSON.stringify({ rows: [{ token: 1, tag: "O", sentence: 0 }], original: ["O"] }),
      JSON.stringify({ rows: [{ token: "a", tag: "O" }], original: ["O"] }),
    ];
    for (const raw of cases) {
      storage.setItem(STORAGE_KEY, raw);
      expect(loadSession(storage)).toBeNull();
    }
  });

  it("loadSession defaults page and mode when absent", () => {
    const storage = memoryStorage();
    storage.setItem(
      STORAGE_KEY,
      JSON.stringify({ rows: [{ token: "a", tag: "O", sentence: 0 }], original: ["O"] }),
    );
    const loaded = loadSession(storage);
    expect(loaded).toEqual({
      rows: [{ token: "a", tag: "O", sentence: 0 }],
      original: ["O"],
      page: 0,
      mode: "changed",
    });
  });
});

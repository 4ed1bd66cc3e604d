/**
 * Annotation session state: loaded rows, fixed 100-row pages, dirty flag,
 * and progress counting in two displayed modes. Row order and token
 * surfaces never change; only tags mutate.
 */

import { isLabel, serializeConll } from "./conll.js";
import type { Label, Row } from "./conll.js";

export const ROWS_PER_PAGE = 100;

export type ProgressMode = "changed" | "non-O";

export interface Progress {
  annotated: number;
  total: number;
  mode: ProgressMode;
}

/** JSON shape persisted by the autosave layer. */
export interface SavedSession {
  rows: Row[];
  original: string[];
  page: number;
  mode: ProgressMode;
}

export class AnnotationSession {
  private readonly rows: Row[];
  private readonly original: Label[];
  private pageIndex = 0;
  private dirtyFlag = false;
  private progressMode: ProgressMode = "changed";

  constructor(rows: Row[]) {
    this.rows = rows;
    this.original = rows.map((row) => row.tag);
  }

  get size(): number {
    return this.rows.length;
  }

  get pageCount(): number {
    return Math.ceil(this.rows.length / ROWS_PER_PAGE);
  }

  get page(): number {
    return this.pageIndex;
  }

  get dirty(): boolean {
    return this.dirtyFlag;
  }

  get mode(): ProgressMode {
    return this.progressMode;
  }

  row(index: number): Row {
    const row = this.rows[index];
    if (row === undefined) {
      throw new RangeError(`row ${index} out of range 0..${this.rows.length - 1}`);
    }
    return row;
  }

  /** Rows of the current page with their absolute indices. */
  pageRows(): { index: number; row: Row }[] {
    const start = this.pageIndex * ROWS_PER_PAGE;
    return this.rows
      .slice(start, start + ROWS_PER_PAGE)
      .map((row, offset) => ({ index: start + offset, row }));
  }

  setTag(index: number, tag: Label): void {
    const row = this.row(index);
    if (!isLabel(tag)) {
      throw new RangeError(`unknown tag ${JSON.stringify(tag)}`);
    }
    if (row.tag !== tag) {
      row.tag = tag;
      this.dirtyFlag = true;
    }
  }

  goToPage(page: number): number {
    const last = Math.max(this.pageCount - 1, 0);
    this.pageIndex = Math.min(Math.max(page, 0), last);
    return this.pageIndex;
  }

  nextPage(): number {
    return this.goToPage(this.pageIndex + 1);
  }

  previousPage(): number {
    return this.goToPage(this.pageIndex - 1);
  }

  toggleMode(): ProgressMode {
    this.progressMode = this.progressMode === "changed" ? "non-O" : "changed";
    return this.progressMode;
  }

  progress(): Progress {
    let annotated = 0;
    if (this.progressMode === "changed") {
      annotated = this.rows.filter((row, i) => row.tag !== this.original[i]).length;
    } else {
      annotated = this.rows.filter((row) => row.tag !== "O").length;
    }
    return { annotated, total: this.rows.length, mode: this.progressMode };
  }

  exportText(): string {
    return serializeConll(this.rows);
  }

  /** Called after the user saved the export; clears the unload warning. */
  markExported(): void {
    this.dirtyFlag = false;
  }

  toJSON(): SavedSession {
    return {
      rows: this.rows.map((row) => ({ ...row })),
      original: [...this.original],
      page: this.pageIndex,
      mode: this.progressMode,
    };
  }

  static restore(saved: SavedSession): AnnotationSession {
    const session = new AnnotationSession(saved.rows.map((row) => ({ ...row })));
    saved.original.forEach((tag, i) => {
      if (isLabel(tag) && i < session.original.length) {
        session.original[i] = tag;
      }
    });
    session.goToPage(saved.page);
    session.progressMode = saved.mode === "non-O" ? "non-O" : "changed";
    session.dirtyFlag = session.rows.some((row, i) => row.tag !== session.original[i]);
    return session;
  }
}

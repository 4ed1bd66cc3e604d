/**
 * DOM wiring for the annotation tool: file upload, paged table with RTL
 * token column, dropdown and keyboard tag assignment, autosave, export.
 *
 * The app is a plain function of a root element and a Storage, so tests
 * drive it headlessly; a bootstrap at the bottom mounts it on #app when the
 * page loads normally.
 */

import { LABELS, parseConll } from "./conll.js";
import type { Label, ParseIssue } from "./conll.js";
import { labelForKey } from "./keyboard.js";
import { AnnotationSession, ROWS_PER_PAGE } from "./session.js";
import { loadSession, saveSession } from "./storage.js";

export interface App {
  /** Parse text as an uploaded file and start a fresh session. */
  loadText(text: string): void;
  session(): AnnotationSession;
  focusedRow(): number;
  focusRow(index: number): void;
  assignTag(index: number, tag: Label): void;
  exportText(): string;
  /** Remove document-level listeners (tests create many apps). */
  destroy(): void;
  readonly root: HTMLElement;
}

function element<K extends keyof HTMLElementTagNameMap>(
  doc: Document, tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const el = doc.createElement(tag);
  if (className) {
    el.className = className;
  }
  if (text !== undefined) {
    el.textContent = text;
  }
  return el;
}

export function createApp(root: HTMLElement, storage: Storage): App {
  const doc = root.ownerDocument;
  let session = new AnnotationSession([]);
  let focused = 0;

  root.classList.add("annotator");

  const banner = element(doc, "div", "banner");
  banner.hidden = true;

  const fileLabel = element(doc, "label", "file-label", "Load CoNLL file ");
  const fileInput = element(doc, "input");
  fileInput.type = "file";
  fileInput.accept = ".conll,.txt";
  fileLabel.appendChild(fileInput);

  const toolbar = element(doc, "div", "toolbar");
  const prevButton = element(doc, "button", "prev", "Previous");
  const pageInfo = element(doc, "span", "page-info");
  const nextButton = element(doc, "button", "next", "Next");
  const progressInfo = element(doc, "span", "progress");
  const modeButton = element(doc, "button", "mode", "Progress mode");
  const exportButton = element(doc, "button", "export", "Export");
  toolbar.append(prevButton, pageInfo, nextButton, progressInfo, modeButton, exportButton);

  const table = element(doc, "table", "rows");
  const thead = element(doc, "thead");
  const headRow = element(doc, "tr");
  headRow.append(
    element(doc, "th", undefined, "#"),
    element(doc, "th", undefined, "token"),
    element(doc, "th", undefined, "tag"),
  );
  thead.appendChild(headRow);
  const tbody = element(doc, "tbody");
  table.append(thead, tbody);

  root.append(banner, fileLabel, toolbar, table);

  function autosave(): void {
    saveSession(storage, session.toJSON());
  }

  function showErrors(errors: ParseIssue[]): void {
    banner.hidden = errors.length === 0;
    banner.textContent = errors
      .map((issue) => `line ${issue.line}: ${issue.message}`)
      .join("; ");
  }

  function clampFocus(): void {
    focused = Math.min(Math.max(focused, 0), Math.max(session.size - 1, 0));
  }

  function render(): void {
    const pages = session.pageCount;
    pageInfo.textContent = pages === 0
      ? "no rows"
      : `page ${session.page + 1} of ${pages}`;
    const progress = session.progress();
    progressInfo.textContent =
      `annotated ${progress.annotated}/${progress.total} (${progress.mode})`;
    exportButton.disabled = session.size === 0;
    prevButton.disabled = session.page === 0;
    nextButton.disabled = pages === 0 || session.page === pages - 1;

    tbody.textContent = "";
    for (const { index, row } of session.pageRows()) {
      const tr = element(doc, "tr");
      tr.dataset["index"] = String(index);
      if (index === focused) {
        tr.classList.add("focused");
      }
      if (index > 0 && row.sentence !== session.row(index - 1).sentence) {
        tr.classList.add("sentence-start");
      }
      const numberCell = element(doc, "td", "row-number", String(index + 1));
      const tokenCell = element(doc, "td", "token", row.token);
      tokenCell.dir = "rtl";
      const tagCell = element(doc, "td", "tag");
      const select = element(doc, "select");
      for (const label of LABELS) {
        const option = element(doc, "option", undefined, label);
        option.value = label;
        select.appendChild(option);
      }
      select.value = row.tag;
      select.addEventListener("change", () => {
        assignTag(index, select.value as Label);
      });
      tagCell.appendChild(select);
      tr.append(numberCell, tokenCell, tagCell);
      tr.addEventListener("click", () => {
        focused = index;
        render();
      });
      tbody.appendChild(tr);
    }
  }

  function assignTag(index: number, tag: Label): void {
    session.setTag(index, tag);
    focused = Math.min(index + 1, Math.max(session.size - 1, 0));
    const focusedPage = Math.floor(focused / ROWS_PER_PAGE);
    if (focusedPage !== session.page) {
      session.goToPage(focusedPage);
    }
    autosave();
    render();
  }

  function loadText(text: string): void {
    const result = parseConll(text);
    showErrors(result.errors);
    session = new AnnotationSession(result.rows);
    focused = 0;
    autosave();
    render();
  }

  function onKeyDown(event: KeyboardEvent): void {
    if (event.target instanceof HTMLElement
        && (event.target.tagName === "INPUT" || event.target.tagName === "TEXTAREA")) {
      return;
    }
    const label = labelForKey(event);
    if (label === null || session.size === 0) {
      return;
    }
    event.preventDefault();
    clampFocus();
    assignTag(focused, label);
  }

  function onBeforeUnload(event: BeforeUnloadEvent): void {
    if (session.dirty) {
      event.preventDefault();
      event.returnValue = "";
    }
  }

  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (file) {
      void file.text().then(loadText);
    }
  });
  prevButton.addEventListener("click", () => {
    session.previousPage();
    autosave();
    render();
  });
  nextButton.addEventListener("click", () => {
    session.nextPage();
    autosave();
    render();
  });
  modeButton.addEventListener("click", () => {
    session.toggleMode();
    autosave();
    render();
  });
  exportButton.addEventListener("click", () => {
    const text = session.exportText();
    try {
      const blob = new Blob([text], { type: "text/plain;charset=utf-8" });
      const url = URL.createObjectURL(blob);
      const anchor = element(doc, "a");
      anchor.href = url;
      anchor.download = "annotated.conll";
      anchor.click();
      URL.revokeObjectURL(url);
    } catch {
      // Download plumbing is unavailable in the test DOM; the text itself
      // is still reachable through exportText().
    }
    session.markExported();
    autosave();
    render();
  });
  doc.addEventListener("keydown", onKeyDown);
  doc.defaultView?.addEventListener("beforeunload", onBeforeUnload);

  const saved = loadSession(storage);
  if (saved !== null) {
    session = AnnotationSession.restore(saved);
  }
  render();

  return {
    loadText,
    session: () => session,
    focusedRow: () => focused,
    focusRow: (index: number) => {
      focused = index;
      clampFocus();
      render();
    },
    assignTag,
    exportText: () => session.exportText(),
    destroy: () => {
      doc.removeEventListener("keydown", onKeyDown);
      doc.defaultView?.removeEventListener("beforeunload", onBeforeUnload);
    },
    root,
  };
}

declare global {
  interface Window {
    soraniNerApp?: App;
  }
}

const mount = typeof document !== "undefined" ? document.getElementById("app") : null;
if (mount) {
  window.soraniNerApp = createApp(mount, window.localStorage);
}

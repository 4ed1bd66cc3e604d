/**
 * Client-side CoNLL parsing and serialization.
 *
 * The grammar mirrors the toolkit's corpus module: one `token TAG` pair per
 * line split on any whitespace run, blank lines separating sentences, the
 * closed 11-tag IOB2 set. Serialization is canonical (single space, LF,
 * one blank line between sentences, trailing newline) so an unchanged
 * session exports byte-identically and any export parses on the CLI side.
 */

export const LABELS = [
  "O",
  "B-PER",
  "I-PER",
  "B-LOC",
  "I-LOC",
  "B-ORG",
  "I-ORG",
  "B-DATE",
  "I-DATE",
  "B-MISC",
  "I-MISC",
] as const;

export type Label = (typeof LABELS)[number];

export function isLabel(tag: string): tag is Label {
  return (LABELS as readonly string[]).includes(tag);
}

export interface Row {
  token: string;
  tag: Label;
  /** 0-based sentence index; drives separators in export and display. */
  sentence: number;
}

export interface ParseIssue {
  /** 1-based line number in the uploaded file. */
  line: number;
  message: string;
}

export interface ParseResult {
  rows: Row[];
  errors: ParseIssue[];
}

/**
 * Parse file contents. Malformed lines are reported with their line number
 * and skipped; every well-formed line still loads.
 */
export function parseConll(text: string): ParseResult {
  const rows: Row[] = [];
  const errors: ParseIssue[] = [];
  let sentence = 0;
  let sentenceOpen = false;
  const lines = text.split(/\r\n|\r|\n/);
  for (let i = 0; i < lines.length; i += 1) {
    const line = (lines[i] ?? "").trim();
    if (line === "") {
      if (sentenceOpen) {
        sentence += 1;
        sentenceOpen = false;
      }
      continue;
    }
    const fields = line.split(/\s+/);
    if (fields.length !== 2) {
      errors.push({ line: i + 1, message: `expected 2 columns, got ${fields.length}` });
      continue;
    }
    const token = fields[0] as string;
    const tag = fields[1] as string;
    if (!isLabel(tag)) {
      errors.push({ line: i + 1, message: `unknown tag ${JSON.stringify(tag)}` });
      continue;
    }
    rows.push({ token, tag, sentence });
    sentenceOpen = true;
  }
  return { rows, errors };
}

/** Canonical serialization; empty input gives the empty string. */
export function serializeConll(rows: readonly Row[]): string {
  if (rows.length === 0) {
    return "";
  }
  const lines: string[] = [];
  for (let i = 0; i < rows.length; i += 1) {
    const row = rows[i] as Row;
    if (i > 0 && row.sentence !== (rows[i - 1] as Row).sentence) {
      lines.push("");
    }
    lines.push(`${row.token} ${row.tag}`);
  }
  return lines.join("\n") + "\n";
}

/** Canonical CoNLL fixture text: `rows` tokens, ten per sentence, all O. */
export function fixtureText(rows = 250): string {
  const lines: string[] = [];
  for (let i = 0; i < rows; i += 1) {
    if (i > 0 && i % 10 === 0) {
      lines.push("");
    }
    lines.push(`w${i} O`);
  }
  return lines.join("\n") + "\n";
}

/** In-memory Storage for tests that should not share happy-dom state. */
export function memoryStorage(): Storage {
  const map = new Map<string, string>();
  return {
    get length(): number {
      return map.size;
    },
    clear: () => map.clear(),
    getItem: (key: string) => map.get(key) ?? null,
    key: (index: number) => [...map.keys()][index] ?? null,
    removeItem: (key: string) => {
      map.delete(key);
    },
    setItem: (key: string, value: string) => {
      map.set(key, String(value));
    },
  };
}

import { readFileSync, writeFileSync } from "node:fs";

// Readers for the CLI's CSV artifacts. Same conventions as the native side:
// blank lines and #-comments are skipped, `# config_hash=` is informational.

interface Table {
  header: string[];
  rows: string[][];
}

function readTable(path: string): Table {
  let header: string[] | undefined;
  const rows: string[][] = [];
  for (const raw of readFileSync(path, "utf8").split("\n")) {
    const line = raw.trim();
    if (!line || line.startsWith("#")) continue;
    if (header === undefined) header = line.split(",");
    else rows.push(line.split(","));
  }
  if (header === undefined) throw new Error(`${path}: empty table`);
  return { header, rows };
}

/** Score CSV (`simplex_id,score`) as parallel flat arrays. */
export function readScores(path: string): { ids: number[]; scores: number[] } {
  const t = readTable(path);
  if (t.header[0] !== "simplex_id" || t.header[1] !== "score") {
    throw new Error(`${path}: expected header simplex_id,score`);
  }
  return {
    ids: t.rows.map((r) => Number(r[0])),
    scores: t.rows.map((r) => Number(r[1])),
  };
}

/** Rank CSV (`rank,simplex_id,score`), already ordered best first. */
export function readRank(path: string): { ids: number[]; scores: number[] } {
  const t = readTable(path);
  if (t.header.join(",") !== "rank,simplex_id,score") {
    throw new Error(`${path}: expected header rank,simplex_id,score`);
  }
  return {
    ids: t.rows.map((r) => Number(r[1])),
    scores: t.rows.map((r) => Number(r[2])),
  };
}

/** Feature CSV as a flat row-major matrix plus its column names. */
export function readFeatures(path: string): {
  ids: number[];
  columns: string[];
  values: number[];
} {
  const t = readTable(path);
  if (t.header[0] !== "simplex_id") {
    throw new Error(`${path}: expected first column simplex_id`);
  }
  const columns = t.header.slice(1);
  const ids: number[] = [];
  const values: number[] = [];
  for (const row of t.rows) {
    ids.push(Number(row[0]));
    for (let c = 1; c < row.length; c++) values.push(Number(row[c]));
  }
  return { ids, columns, values };
}

/**
 * Write a score CSV the native loader accepts. JS number formatting is
 * shortest-round-trip, so every value reparses to the identical double.
 */
export function writeScoresCsv(path: string, ids: readonly number[], scores: readonly number[]): void {
  const lines = ["simplex_id,score"];
  for (let k = 0; k < ids.length; k++) lines.push(`${ids[k]},${scores[k]}`);
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
}

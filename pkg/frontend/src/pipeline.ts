import { mkdtempSync, readdirSync, rmSync, statSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { runCli } from "./cli.js";
import { BoundComplexHandle } from "./complex.js";
import { readFeatures, readRank, readScores, writeScoresCsv } from "./tables.js";

export interface LabelOptions {
  beta_ratio?: number;
  beta2_ratio?: number;
  gamma?: number;
  runs?: number;
  seed?: number;
  threads?: number;
}

export type TrainValue = number | boolean | string;

function commonArgv(handle: BoundComplexHandle, subcommand: string, hubOrder: number): string[] {
  return [
    subcommand,
    "--input", handle.inputPath,
    "--format", "edges",
    "--out", handle.dir,
    "--hub-order", String(hubOrder),
    "--max-order", String(handle.maxOrder),
  ];
}

/** Per-simplex centrality features for one hub order (flat row-major). */
export function features(
  handle: BoundComplexHandle,
  hub_order: number,
): { ids: number[]; columns: string[]; values: number[] } {
  handle.assertUsable();
  runCli(commonArgv(handle, "features", hub_order));
  return readFeatures(join(handle.dir, `features_h${hub_order}.csv`));
}

function artifactStamps(dir: string, pattern: RegExp): Map<string, string> {
  const seen = new Map<string, string>();
  for (const name of readdirSync(dir)) {
    if (!pattern.test(name)) continue;
    const st = statSync(join(dir, name));
    seen.set(name, `${st.mtimeMs}:${st.size}`);
  }
  return seen;
}

/**
 * Monte-Carlo infection-ability labels for the hub layer.
 *
 * Delegates to the native `label` subcommand; omitted options fall back to
 * the native defaults. Returns the observed (id, score) rows as parallel
 * arrays. Deterministic for a fixed seed.
 */
export function generate_labels(
  handle: BoundComplexHandle,
  hub_order: number,
  opts: LabelOptions = {},
): { ids: number[]; scores: number[] } {
  handle.assertUsable();
  const argv = commonArgv(handle, "label", hub_order);
  const flags: Record<keyof LabelOptions, string> = {
    beta_ratio: "--beta-ratio",
    beta2_ratio: "--beta2-ratio",
    gamma: "--gamma",
    runs: "--runs",
    seed: "--seed",
    threads: "--threads",
  };
  for (const [key, value] of Object.entries(opts)) {
    const flag = flags[key as keyof LabelOptions];
    if (flag === undefined) throw new TypeError(`unknown label option ${key}`);
    if (typeof value !== "number") throw new TypeError(`label option ${key} must be a number`);
    argv.push(flag, String(value));
  }
  // The artifact name embeds %g-formatted ratios; rather than reimplement
  // that formatting, identify the file the run touched by stat diff.
  const pattern = new RegExp(`^labels_h${hub_order}_.*\\.csv$`);
  const before = artifactStamps(handle.dir, pattern);
  runCli(argv);
  const after = artifactStamps(handle.dir, pattern);
  const touched = [...after.keys()].filter((name) => before.get(name) !== after.get(name));
  if (touched.length !== 1) {
    throw new Error(`expected one label artifact, found ${touched.length}`);
  }
  return readScores(join(handle.dir, touched[0]));
}

// config keys that do not live in the [train] section
const SECTION_OF: Record<string, string> = {
  seed: "run",
  threads: "run",
  max_order: "complex",
};
const SECTION_ORDER = ["run", "complex", "train"];

function tomlScalar(key: string, value: unknown): string {
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") {
    if (!Number.isFinite(value)) throw new TypeError(`config value ${key} must be finite`);
    return String(value);
  }
  if (typeof value === "string") return JSON.stringify(value);
  throw new TypeError(`config value ${key} must be a number, boolean, or string`);
}

function writeTrainConfig(path: string, config: Record<string, TrainValue>): void {
  const sections = new Map<string, string[]>();
  for (const [key, value] of Object.entries(config)) {
    if (key === "hub_order") {
      throw new TypeError("pass the hub order as the h argument, not in config");
    }
    // unrouted keys land in [train]; the native side owns validation and
    // rejects unknown ones with its own error text
    const section = SECTION_OF[key] ?? "train";
    const lines = sections.get(section) ?? [];
    lines.push(`${key} = ${tomlScalar(key, value)}`);
    sections.set(section, lines);
  }
  const out: string[] = [];
  for (const section of SECTION_ORDER) {
    const lines = sections.get(section);
    if (!lines) continue;
    out.push(`[${section}]`, ...lines, "");
  }
  writeFileSync(path, out.join("\n"), "utf8");
}

/**
 * Train the ranking model on host-provided labels and rank the hub layer.
 *
 * `labels` carries observed (id, score) pairs as parallel flat arrays;
 * unlisted ids stay unobserved. `config` is a flat dict of scalars: `seed`
 * and `threads` adjust the run, everything else is a training knob
 * (`epochs`, `hidden_width`, `embed_dim`, `cheb_order`, `learning_rate`,
 * `pair_sample`, `patience`, `ensemble`). Unknown keys are rejected by the
 * native config validator.
 *
 * Returns the ranked ids (best first) with their scores. Output is
 * identical to the native CLI pipeline run with the same seed and config.
 *
 * A layer holding a single simplex cannot support training (the native
 * side wants at least 4 labels), yet its ranking is degenerate anyway; the
 * call returns that lone id immediately with the neutral score 0.5.
 */
export function train_rank(
  handle: BoundComplexHandle,
  h: number,
  labels: { ids: readonly number[]; scores: readonly number[] },
  config: Record<string, TrainValue> = {},
): { ids: number[]; scores: number[] } {
  handle.assertUsable();
  const n = handle.n(h);
  if (labels.ids.length !== labels.scores.length) {
    throw new TypeError("labels.ids and labels.scores must have the same length");
  }
  for (let k = 0; k < labels.ids.length; k++) {
    if (!Number.isInteger(labels.ids[k])) throw new TypeError("label ids must be integers");
    if (!Number.isFinite(labels.scores[k])) throw new TypeError("label scores must be finite");
  }
  if (n === 1) {
    return { ids: [0], scores: [0.5] };
  }

  const labelsPath = join(handle.dir, `host_labels_h${h}.csv`);
  writeScoresCsv(labelsPath, labels.ids, labels.scores);
  const configPath = join(handle.dir, `host_config_h${h}.toml`);
  writeTrainConfig(configPath, config);

  // drop stale checkpoints so a smaller ensemble cannot pick up old members
  for (const name of readdirSync(handle.dir)) {
    if (name.startsWith(`model_h${h}_m`)) rmSync(join(handle.dir, name));
  }

  runCli([
    ...commonArgv(handle, "train", h),
    "--config", configPath,
    "--labels", labelsPath,
  ]);
  runCli([...commonArgv(handle, "rank", h), "--config", configPath]);
  return readRank(join(handle.dir, `rank_h${h}.csv`));
}

/**
 * Kendall tau between two equal-length score vectors, computed by the
 * native `evaluate` subcommand. Tied pairs count as neither concordant nor
 * discordant against the full pair count.
 */
export function kendall_tau(pred: readonly number[], truth: readonly number[]): number {
  if (pred.length !== truth.length) {
    throw new TypeError("pred and truth must have the same length");
  }
  const ids = Array.from(pred, (_, i) => i);
  const dir = mkdtempSync(join(tmpdir(), "simplexrank-tau-"));
  try {
    const predPath = join(dir, "pred.csv");
    const truthPath = join(dir, "truth.csv");
    writeScoresCsv(predPath, ids, pred);
    writeScoresCsv(truthPath, ids, truth);
    const stdout = runCli([
      "evaluate",
      "--pred", predPath,
      "--truth", truthPath,
      "--out", dir,
    ]);
    const match = /^tau=(\S+)$/m.exec(stdout);
    if (!match) throw new Error(`evaluate printed no tau line: ${JSON.stringify(stdout)}`);
    return Number(match[1]);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

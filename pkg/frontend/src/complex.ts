import { mkdirSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { runCli } from "./cli.js";

interface ComplexManifest {
  nodes: number;
  max_order: number;
  layer_counts: Record<string, number>;
  labels: string[] | null;
  config_hash: string | null;
}

/**
 * Opaque handle to an immutable lifted complex persisted by the native CLI.
 *
 * The handle owns a working directory holding the edge input, the persisted
 * complex, and any artifacts later pipeline calls drop next to it. Every
 * accessor returns a fresh copy; nothing handed out aliases native state, and
 * no operation on one handle can touch another handle's directory.
 */
export class BoundComplexHandle {
  /** Working directory owning the persisted complex and derived artifacts. */
  readonly dir: string;
  /** Edge file the complex was lifted from (inside `dir`). */
  readonly inputPath: string;
  /** Highest simplex order the lift was asked for. */
  readonly maxOrder: number;
  /** Number of vertices after densifying input ids. */
  readonly nodes: number;

  private readonly counts: Record<string, number>;
  private closed = false;

  constructor(dir: string, inputPath: string, maxOrder: number, manifest: ComplexManifest) {
    this.dir = dir;
    this.inputPath = inputPath;
    this.maxOrder = maxOrder;
    this.nodes = manifest.nodes;
    this.counts = { ...manifest.layer_counts };
  }

  /** Per-order simplex counts, as a fresh plain object on every access. */
  get n_h(): Record<string, number> {
    this.assertUsable();
    return { ...this.counts };
  }

  /** Count of simplices of one order. */
  n(order: number): number {
    this.assertUsable();
    const c = this.counts[String(order)];
    if (c === undefined) throw new RangeError(`complex has no layer of order ${order}`);
    return c;
  }

  /**
   * Vertex rows of one layer as a flat array, `order + 1` entries per
   * simplex in dense id order. Re-read from disk on every call, so the
   * returned array is always the caller's to mutate.
   */
  simplices(order: number): number[] {
    this.n(order); // validates order and handle state
    const flat: number[] = [];
    const text = readFileSync(join(this.dir, "complex", `layer_${order}.csv`), "utf8");
    for (const line of text.split("\n")) {
      const s = line.trim();
      if (!s) continue;
      for (const v of s.split(",")) flat.push(Number(v));
    }
    return flat;
  }

  get disposed(): boolean {
    return this.closed;
  }

  /** Delete the working directory; the handle is unusable afterwards. */
  dispose(): void {
    if (this.closed) return;
    this.closed = true;
    rmSync(this.dir, { recursive: true, force: true });
  }

  assertUsable(): void {
    if (this.closed) throw new Error("complex handle was disposed");
  }
}

/**
 * Build a simplicial complex from a flat edge array by delegating to the
 * native `lift` subcommand.
 *
 * `edges` lists vertex pairs flattened as [u0, v0, u1, v1, ...]. Input ids
 * may be arbitrary non-negative integers; the native side densifies them.
 * Anything the native parser rejects (self-loops, negatives, an empty list)
 * surfaces here as a CliError carrying the native message.
 *
 * `workDir` pins the working directory (created if missing); by default a
 * fresh temp directory is used. Pass max_order as the highest clique order
 * to close under.
 */
export function lift(edges: readonly number[], max_order: number, workDir?: string): BoundComplexHandle {
  if (!Array.isArray(edges)) throw new TypeError("edges must be a flat array of numbers");
  if (edges.length % 2 !== 0) {
    throw new TypeError(`edges must hold (u, v) pairs; got ${edges.length} values`);
  }
  if (!Number.isInteger(max_order) || max_order < 0) {
    throw new RangeError("max_order must be a non-negative integer");
  }
  let dir: string;
  if (workDir === undefined) {
    dir = mkdtempSync(join(tmpdir(), "simplexrank-"));
  } else {
    mkdirSync(workDir, { recursive: true });
    dir = workDir;
  }
  const inputPath = join(dir, "input.edges");
  const lines: string[] = [];
  for (let k = 0; k < edges.length; k += 2) lines.push(`${edges[k]} ${edges[k + 1]}`);
  writeFileSync(inputPath, lines.join("\n") + (lines.length ? "\n" : ""), "utf8");

  runCli([
    "lift",
    "--input", inputPath,
    "--format", "edges",
    "--max-order", String(max_order),
    "--out", dir,
  ]);
  const manifest = JSON.parse(
    readFileSync(join(dir, "complex", "manifest.json"), "utf8"),
  ) as ComplexManifest;
  return new BoundComplexHandle(dir, inputPath, max_order, manifest);
}

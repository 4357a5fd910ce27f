import { spawnSync } from "node:child_process";

/**
 * Raised when the native CLI exits nonzero. The message carries the native
 * stderr verbatim so callers see the same diagnostics a terminal user would;
 * `exitCode` distinguishes runtime failures (1) from config rejections (3).
 */
export class CliError extends Error {
  readonly exitCode: number;
  readonly stderr: string;

  constructor(subcommand: string, exitCode: number, stderr: string) {
    super(`simplexrank ${subcommand} failed (exit ${exitCode}): ${stderr.trim()}`);
    this.name = "CliError";
    this.exitCode = exitCode;
    this.stderr = stderr;
  }
}

const BIN = process.env.SIMPLEXRANK_BIN ?? "simplexrank";

/** Run one native subcommand to completion and return its stdout. */
export function runCli(argv: readonly string[]): string {
  const res = spawnSync(BIN, argv as string[], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (res.error) {
    // the process never started; nothing native to report
    throw new Error(
      `cannot execute ${BIN}: ${res.error.message}; install the simplexrank ` +
        `Python package or point SIMPLEXRANK_BIN at it`,
    );
  }
  if (res.status !== 0) {
    throw new CliError(argv[0] ?? "?", res.status ?? -1, res.stderr ?? "");
  }
  return res.stdout ?? "";
}

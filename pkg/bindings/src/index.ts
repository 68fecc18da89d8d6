/**
 * Node bindings for the toolcall-rl completion scorer.
 *
 * Nothing is re-implemented here: every call shells out to the Python CLI,
 * so the numbers a JS training loop sees are bit-identical to what the core
 * engine produces. Calls are async subprocesses and can overlap freely.
 */

import { spawn } from "node:child_process";
import { mkdtemp, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { delimiter, dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

export const version = "0.1.0";

/** Flat mirror of the core reward breakdown. */
export interface RewardResult {
  r_json: number;
  r_fn: number;
  r_args: number;
  r_fn_scaled: number;
  r_args_scaled: number;
  r_final: number;
  outcome: string;
  /** True when the completion arrived as bytes with invalid UTF-8 sequences
   *  that were replaced with U+FFFD before scoring. */
  invalid_utf8_replaced: boolean;
}

export type Weights = [number, number, number];

export interface ScoreOptions {
  /** Python interpreter to run; defaults to $TOOLCALL_RL_PYTHON or python3. */
  pythonPath?: string;
  /** Checkout/install root containing src/toolcall_rl; defaults to the
   *  directory this bindings package sits in. */
  packageRoot?: string;
  /** w_json, w_fn, w_args; the CLI default is 0.125, 0.375, 0.5. */
  weights?: Weights;
}

const BINDINGS_ROOT = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");

function decodeUtf8(raw: string | Uint8Array): { text: string; replaced: boolean } {
  if (typeof raw === "string") {
    return { text: raw, replaced: false };
  }
  try {
    return { text: new TextDecoder("utf-8", { fatal: true }).decode(raw), replaced: false };
  } catch {
    return { text: new TextDecoder("utf-8").decode(raw), replaced: true };
  }
}

function parseExpected(expectedJson: string, label = "expected_json"): unknown[] {
  let parsed: unknown;
  try {
    parsed = JSON.parse(expectedJson);
  } catch (error) {
    const message = error instanceof Error ? error.message : String(error);
    const at = /position (\d+)/.exec(message);
    throw new Error(`invalid ${label} at offset ${at ? at[1] : 0}: ${message}`);
  }
  if (!Array.isArray(parsed)) {
    throw new Error(`invalid ${label}: must be a JSON array of call objects`);
  }
  return parsed;
}

function runCli(args: string[], options: ScoreOptions): Promise<string> {
  const pythonPath = options.pythonPath ?? process.env.TOOLCALL_RL_PYTHON ?? "python3";
  const packageRoot = options.packageRoot ?? resolve(BINDINGS_ROOT, "..");
  const srcPath = join(resolve(packageRoot), "src");
  const pythonpath = process.env.PYTHONPATH
    ? srcPath + delimiter + process.env.PYTHONPATH
    : srcPath;
  return new Promise((resolvePromise, rejectPromise) => {
    const child = spawn(pythonPath, ["-m", "toolcall_rl", ...args], {
      env: { ...process.env, PYTHONPATH: pythonpath },
      stdio: ["ignore", "pipe", "pipe"],
    });
    const out: Buffer[] = [];
    const err: Buffer[] = [];
    child.stdout.on("data", (chunk) => out.push(chunk));
    child.stderr.on("data", (chunk) => err.push(chunk));
    child.on("error", rejectPromise);
    child.on("close", (code) => {
      if (code === 0) {
        resolvePromise(Buffer.concat(out).toString("utf-8"));
      } else {
        rejectPromise(
          new Error(`scorer exited with code ${code}: ${Buffer.concat(err).toString("utf-8")}`),
        );
      }
    });
  });
}

interface RawBreakdown {
  r_json: number;
  r_fn: number;
  r_args: number;
  r_fn_scaled: number;
  r_args_scaled: number;
  r_final: number;
  outcome: string;
}

function toResult(payload: RawBreakdown, replaced: boolean): RewardResult {
  return {
    r_json: payload.r_json,
    r_fn: payload.r_fn,
    r_args: payload.r_args,
    r_fn_scaled: payload.r_fn_scaled,
    r_args_scaled: payload.r_args_scaled,
    r_final: payload.r_final,
    outcome: payload.outcome,
    invalid_utf8_replaced: replaced,
  };
}

function weightArgs(options: ScoreOptions): string[] {
  return options.weights ? ["--weights", options.weights.join(",")] : [];
}

/** Score one raw completion against an expected answer (a JSON array of
 *  {name, arguments} objects). */
export async function score(
  raw: string | Uint8Array,
  expectedJson: string,
  options: ScoreOptions = {},
): Promise<RewardResult> {
  const { text, replaced } = decodeUtf8(raw);
  parseExpected(expectedJson);
  const dir = await mkdtemp(join(tmpdir(), "toolcall-rl-"));
  try {
    const completionPath = join(dir, "completion.txt");
    const expectedPath = join(dir, "expected.json");
    await writeFile(completionPath, text, "utf-8");
    await writeFile(expectedPath, expectedJson, "utf-8");
    const stdout = await runCli(
      [
        "score",
        "--completion-file",
        completionPath,
        "--expected-file",
        expectedPath,
        ...weightArgs(options),
      ],
      options,
    );
    return toResult(JSON.parse(stdout) as RawBreakdown, replaced);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

/** Score many completions in one subprocess; results come back in input
 *  order. Lengths of the two lists must match. */
export async function scoreBatch(
  raws: Array<string | Uint8Array>,
  expectedJsons: string[],
  options: ScoreOptions = {},
): Promise<RewardResult[]> {
  if (raws.length !== expectedJsons.length) {
    throw new Error(
      `size mismatch: ${raws.length} completions vs ${expectedJsons.length} answer lists`,
    );
  }
  if (raws.length === 0) {
    return [];
  }
  const decoded = raws.map((raw) => decodeUtf8(raw));
  const answers = expectedJsons.map((json, index) => parseExpected(json, `expected_jsons[${index}]`));
  const lines = decoded.map((entry, index) =>
    JSON.stringify({ completion: entry.text, answers: answers[index] }),
  );
  const dir = await mkdtemp(join(tmpdir(), "toolcall-rl-"));
  try {
    const batchPath = join(dir, "batch.jsonl");
    await writeFile(batchPath, lines.join("\n") + "\n", "utf-8");
    const stdout = await runCli(["score", "--batch", batchPath, ...weightArgs(options)], options);
    const rows = stdout.trim().split("\n");
    if (rows.length !== raws.length) {
      throw new Error(`scorer returned ${rows.length} rows for ${raws.length} inputs`);
    }
    return rows.map((row, index) =>
      toResult(JSON.parse(row) as RawBreakdown, decoded[index].replaced),
    );
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

/** Version string reported by the underlying CLI. */
export async function coreVersion(options: ScoreOptions = {}): Promise<string> {
  const stdout = await runCli(["--version"], options);
  return stdout.trim();
}

import assert from "node:assert/strict";
import { spawn } from "node:child_process";
import { delimiter, join, resolve } from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { coreVersion, score, scoreBatch, version, type RewardResult } from "../src/index.js";
import { lcg, randomCallList, randomCompletion } from "./fuzz.js";

const PACKAGE_ROOT = resolve(fileURLToPath(new URL(".", import.meta.url)), "..", "..", "..");

const GOLDEN_EXPECTED = JSON.stringify([
  { name: "qr_code_image", arguments: { size: 7, url: "example.com" } },
  { name: "ec", arguments: { password: "Secure123", penalty: 0.3, format: "json" } },
]);
const GOLDEN_BASE = JSON.stringify([
  { name: "qr_code_image_generator", arguments: { url: "example.com" } },
  { name: "ec", arguments: { password: "Secure123", penalty: 0.3, format: "json" } },
]);

/** Independent CLI invocation: talks to the scorer without the bindings. */
function cliScoreDirect(completion: string, expectedJson: string): Promise<RewardResult> {
  const env = {
    ...process.env,
    PYTHONPATH: join(PACKAGE_ROOT, "src") + (process.env.PYTHONPATH ? delimiter + process.env.PYTHONPATH : ""),
  };
  return new Promise((resolvePromise, rejectPromise) => {
    const child = spawn(
      process.env.TOOLCALL_RL_PYTHON ?? "python3",
      [
        "-m",
        "toolcall_rl",
        "score",
        "--completion",
        completion === "" ? "" : completion,
        "--expected",
        expectedJson,
      ],
      { env, stdio: ["ignore", "pipe", "pipe"] },
    );
    const out: Buffer[] = [];
    const err: Buffer[] = [];
    child.stdout.on("data", (chunk) => out.push(chunk));
    child.stderr.on("data", (chunk) => err.push(chunk));
    child.on("error", rejectPromise);
    child.on("close", (code) => {
      if (code !== 0) {
        rejectPromise(new Error(Buffer.concat(err).toString("utf-8")));
        return;
      }
      const payload = JSON.parse(Buffer.concat(out).toString("utf-8"));
      resolvePromise({ ...payload, invalid_utf8_replaced: false } as RewardResult);
    });
  });
}

const FIELDS = ["r_json", "r_fn", "r_args", "r_fn_scaled", "r_args_scaled", "r_final", "outcome"] as const;

function sameBreakdown(actual: RewardResult, reference: RewardResult, label: string): void {
  for (const field of FIELDS) {
    assert.deepEqual(actual[field], reference[field], `${label}: field ${field}`);
  }
}

async function mapLimit<T, R>(items: T[], limit: number, fn: (item: T, index: number) => Promise<R>): Promise<R[]> {
  const results = new Array<R>(items.length);
  let cursor = 0;
  async function worker(): Promise<void> {
    while (cursor < items.length) {
      const index = cursor++;
      results[index] = await fn(items[index], index);
    }
  }
  await Promise.all(Array.from({ length: Math.min(limit, items.length) }, worker));
  return results;
}

test("golden pair scores 0.5625 through the bindings", async () => {
  const result = await score(GOLDEN_BASE, GOLDEN_EXPECTED);
  assert.equal(result.r_final, 0.5625);
  assert.equal(result.r_json, 0.125);
  assert.equal(result.r_fn_scaled, 0.1875);
  assert.equal(result.r_args_scaled, 0.25);
  assert.equal(result.outcome, "calls");
  assert.equal(result.invalid_utf8_replaced, false);
});

test("extraneous text is a hard zero", async () => {
  const result = await score("Sure! " + GOLDEN_BASE, GOLDEN_EXPECTED);
  assert.equal(result.r_final, 0);
  assert.equal(result.outcome, "extraneous_text");
});

test("100 fuzz cases: batch bindings equal direct CLI output field-for-field", async () => {
  const next = lcg(20240817);
  const completions: string[] = [];
  const expectedJsons: string[] = [];
  for (let i = 0; i < 100; i++) {
    completions.push(randomCompletion(next));
    expectedJsons.push(JSON.stringify(randomCallList(next)));
  }
  const viaBindings = await scoreBatch(completions, expectedJsons);
  assert.equal(viaBindings.length, 100);
  const direct = await mapLimit(completions, 8, (completion, index) =>
    cliScoreDirect(completion, expectedJsons[index]),
  );
  for (let i = 0; i < 100; i++) {
    sameBreakdown(viaBindings[i], direct[i], `case ${i}`);
  }
});

test("single-call score agrees with the batch path", async () => {
  const next = lcg(7);
  const completions = Array.from({ length: 6 }, () => randomCompletion(next));
  const expected = Array.from({ length: 6 }, () => JSON.stringify(randomCallList(next)));
  const batch = await scoreBatch(completions, expected);
  const singles = await mapLimit(completions, 6, (completion, index) =>
    score(completion, expected[index]),
  );
  singles.forEach((single, index) => sameBreakdown(single, batch[index], `case ${index}`));
});

test("batch preserves input order", async () => {
  const perfect = GOLDEN_EXPECTED;
  const results = await scoreBatch(
    [perfect, "see: " + perfect, "broken [", perfect, ""],
    Array(5).fill(GOLDEN_EXPECTED),
  );
  assert.deepEqual(
    results.map((r) => r.r_final),
    [1, 0, 0, 1, 0],
  );
  assert.deepEqual(
    results.map((r) => r.outcome),
    ["calls", "extraneous_text", "invalid_json", "calls", "empty"],
  );
});

test("empty batch returns an empty array without spawning", async () => {
  assert.deepEqual(await scoreBatch([], []), []);
});

test("mismatched batch lengths are rejected", async () => {
  await assert.rejects(() => scoreBatch(["[]"], []), /size mismatch/);
});

test("malformed expected JSON reports the offset", async () => {
  await assert.rejects(() => score("[]", '[{"name": '), /invalid expected_json at offset \d+/);
  await assert.rejects(() => score("[]", '{"name": "f"}'), /must be a JSON array/);
  await assert.rejects(
    () => scoreBatch(["[]", "[]"], ["[]", "{oops"]),
    /expected_jsons\[1\] at offset \d+/,
  );
});

test("invalid UTF-8 bytes are replaced and flagged, never fault", async () => {
  const bytes = new Uint8Array([0xff, 0xfe, 0x20, 0x5b, 0x5d]); // junk + " []"
  const result = await score(bytes, "[]");
  assert.equal(result.invalid_utf8_replaced, true);
  assert.equal(result.r_final, 0);
  assert.equal(result.outcome, "extraneous_text");

  const clean = new TextEncoder().encode("[]");
  const cleanResult = await score(clean, "[]");
  assert.equal(cleanResult.invalid_utf8_replaced, false);
  assert.equal(cleanResult.r_final, 1);
});

test("binding version matches the core version", async () => {
  assert.equal(version, await coreVersion());
});

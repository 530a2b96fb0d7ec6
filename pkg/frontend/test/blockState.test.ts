/** Block state machine: run, reset/undo timing, staleness. */

import { describe, expect, it } from "vitest";

import {
  UNDO_WINDOW_MS,
  editCode,
  expireUndo,
  initialState,
  isStale,
  resetBlock,
  runBlock,
  undoAvailable,
  undoReset,
} from "../src/blockState.js";
import { solverExecutor } from "../src/hydrate.js";

const CODE = "(declare-const p Bool)\n(assert p)\n(check-sat)\n";

function fresh(manifestOutput?: string) {
  return initialState("doc.md#0", CODE, { manifestOutput });
}

describe("staleness", () => {
  it("manifest output starts fresh, editing makes it stale", () => {
    let state = fresh("sat\n");
    expect(isStale(state)).toBe(false);
    state = editCode(state, CODE + "(get-model)\n");
    expect(isStale(state)).toBe(true);
  });

  it("editing back to the producing code clears staleness", () => {
    let state = fresh("sat\n");
    state = editCode(state, CODE + "x");
    expect(isStale(state)).toBe(true);
    state = editCode(state, CODE);
    expect(isStale(state)).toBe(false);
  });

  it("running clears staleness and replaces output", () => {
    let state = fresh("sat\n");
    state = editCode(state, "(declare-const q Bool)\n(assert (not q))\n(check-sat)\n");
    expect(isStale(state)).toBe(true);
    state = runBlock(state, solverExecutor, "sat\n");
    expect(isStale(state)).toBe(false);
    expect(state.output?.text).toBe("sat\n");
    expect(state.output?.status).toBe("success");
  });
});

describe("run", () => {
  it("unmodified block with no solver falls back to manifest output byte-for-byte", () => {
    const manifest = "sat\n(\n  (define-fun p () Bool true)\n)\n";
    let state = fresh(manifest);
    state = runBlock(state, null, manifest);
    expect(state.output?.text).toBe(manifest);
    expect(state.output?.status).toBe("success");
  });

  it("unmodified block with live solver reproduces manifest output byte-for-byte", () => {
    const manifest = solverExecutor(CODE).text; // what the build would store
    let state = fresh(manifest);
    state = runBlock(state, solverExecutor, manifest);
    expect(state.output?.text).toBe(manifest);
  });

  it("edited block with no solver surfaces guidance, stays editable", () => {
    let state = fresh("sat\n");
    state = editCode(state, "(check-sat)");
    state = runBlock(state, null, "sat\n");
    expect(state.output?.status).toBe("error");
    expect(state.readOnly).toBe(false);
  });

  it("solver errors are classified, not thrown", () => {
    let state = fresh();
    state = editCode(state, "(assert");
    state = runBlock(state, solverExecutor, undefined);
    expect(state.output?.status).toBe("error");
    expect(state.output?.text).toContain("unclosed parenthesis");
  });

  it("read-only blocks never run or edit", () => {
    let state = initialState("doc.md#1", CODE, { readOnly: true });
    state = editCode(state, "changed");
    expect(state.currentCode).toBe(CODE);
    state = runBlock(state, solverExecutor, undefined);
    expect(state.output).toBeNull();
  });
});

describe("reset and undo window", () => {
  it("undo is present immediately after reset and gone at 3.5s", () => {
    let state = fresh();
    state = editCode(state, "edited work");
    const t0 = 10_000;
    state = resetBlock(state, t0);
    expect(state.currentCode).toBe(CODE);
    expect(undoAvailable(state, t0)).toBe(true);               // t = 0
    expect(undoAvailable(state, t0 + UNDO_WINDOW_MS - 1)).toBe(true);
    expect(undoAvailable(state, t0 + 3500)).toBe(false);       // t = 3.5 s
  });

  it("undo within 3s restores the pre-reset code", () => {
    let state = fresh();
    state = editCode(state, "precious edits");
    const t0 = 5_000;
    state = resetBlock(state, t0);
    state = undoReset(state, t0 + 2_999);
    expect(state.currentCode).toBe("precious edits");
    expect(undoAvailable(state, t0 + 2_999)).toBe(false); // window consumed
  });

  it("undo after expiry is a no-op", () => {
    let state = fresh();
    state = editCode(state, "late edits");
    const t0 = 5_000;
    state = resetBlock(state, t0);
    state = expireUndo(state, t0 + UNDO_WINDOW_MS);
    const after = undoReset(state, t0 + UNDO_WINDOW_MS + 1);
    expect(after.currentCode).toBe(CODE);
    expect(after.undoSavedCode).toBeNull();
  });

  it("a second reset restarts the window", () => {
    let state = fresh();
    state = editCode(state, "first");
    state = resetBlock(state, 1_000);
    state = expireUndo(state, 1_000 + UNDO_WINDOW_MS);
    state = editCode(state, "second");
    state = resetBlock(state, 20_000);
    expect(undoAvailable(state, 20_001)).toBe(true);
    expect(undoReset(state, 20_500).currentCode).toBe("second");
  });
});

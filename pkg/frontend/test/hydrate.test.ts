// @vitest-environment happy-dom
/** DOM hydration: editors, toolbar controls, read-only rendering. */

import { beforeEach, describe, expect, it } from "vitest";

import { hydrateBlocks } from "../src/hydrate.js";
import type { Manifest } from "../src/manifest.js";

const MANIFEST: Manifest = {
  "doc.md#0": {
    codeDigest: "x", label: "z3", readOnly: false, alwaysEditable: false,
    output: "sat\n",
  },
  "doc.md#1": {
    codeDigest: "y", label: "python", readOnly: true, alwaysEditable: false,
  },
};

function blockHtml(id: string, extra: string, code: string, output?: string): string {
  const outputHtml = output !== undefined
    ? `<pre class="smt-output" data-status="success">${output}</pre>` : "";
  return `<div class="smt-block" data-snippet-id="${id}" data-label="z3" ${extra}>
    <pre class="smt-code">${code}</pre>${outputHtml}</div>`;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("interactive blocks", () => {
  it("editable block gets an editor, line-number gutter, Run, and controls", () => {
    document.body.innerHTML = blockHtml(
      "doc.md#0",
      'data-read-only="false" data-show-line-numbers="true" '
        + 'data-discuss-url="https://example.org/forum"',
      "(declare-const p Bool)\n(assert p)\n(check-sat)", "sat\n");
    hydrateBlocks(MANIFEST);
    const block = document.querySelector(".smt-block") as HTMLElement;
    expect(block.getAttribute("data-hydrated")).toBe("interactive");
    const editor = block.querySelector("textarea.smt-editor") as HTMLTextAreaElement;
    expect(editor).not.toBeNull();
    expect(editor.value).toContain("(check-sat)");
    const gutter = block.querySelector(".smt-gutter") as HTMLElement;
    expect(gutter.textContent).toBe("1\n2\n3");
    expect(block.querySelector("button.smt-run")?.textContent).toBe("Run");
    expect(block.querySelector("button.smt-copy")).not.toBeNull();
    expect(block.querySelector("button.smt-reset")?.textContent).toBe("Reset");
    expect(block.querySelector("button.smt-discuss")).not.toBeNull();
  });

  it("running an unmodified block shows the manifest output byte-for-byte", () => {
    document.body.innerHTML = blockHtml(
      "doc.md#0", 'data-read-only="false" data-show-line-numbers="false"',
      "(declare-const p Bool)\n(assert p)\n(check-sat)\n");
    hydrateBlocks(MANIFEST);
    (document.querySelector("button.smt-run") as HTMLButtonElement).click();
    const output = document.querySelector(".smt-output") as HTMLElement;
    expect(output.textContent).toBe("sat\n");
    expect(output.classList.contains("stale")).toBe(false);
  });

  it("editing fades the displayed output until rerun", () => {
    document.body.innerHTML = blockHtml(
      "doc.md#0", 'data-read-only="false" data-show-line-numbers="false"',
      "(declare-const p Bool)\n(assert p)\n(check-sat)\n", "sat\n");
    hydrateBlocks(MANIFEST);
    const editor = document.querySelector("textarea.smt-editor") as HTMLTextAreaElement;
    editor.value += "(get-model)\n";
    editor.dispatchEvent(new Event("input"));
    const output = document.querySelector(".smt-output") as HTMLElement;
    expect(output.classList.contains("stale")).toBe(true);
    (document.querySelector("button.smt-run") as HTMLButtonElement).click();
    expect(output.classList.contains("stale")).toBe(false);
    expect(output.textContent).toContain("define-fun p () Bool true");
  });

  it("reset flips the control to Undo and back on use", () => {
    document.body.innerHTML = blockHtml(
      "doc.md#0", 'data-read-only="false" data-show-line-numbers="false"',
      "original");
    hydrateBlocks(MANIFEST);
    const editor = document.querySelector("textarea.smt-editor") as HTMLTextAreaElement;
    const reset = document.querySelector("button.smt-reset") as HTMLButtonElement;
    editor.value = "edited";
    editor.dispatchEvent(new Event("input"));
    reset.click();
    expect(editor.value).toBe("original");
    expect(reset.textContent).toBe("Undo");
    reset.click(); // undo within the window
    expect(editor.value).toBe("edited");
    expect(reset.textContent).toBe("Reset");
  });

  it("read-only entries keep static code and get no Run button", () => {
    document.body.innerHTML = blockHtml(
      "doc.md#1", 'data-read-only="true" data-show-line-numbers="true"',
      "print(1)");
    hydrateBlocks(MANIFEST);
    const block = document.querySelector(".smt-block") as HTMLElement;
    expect(block.getAttribute("data-hydrated")).toBe("read-only");
    expect(block.querySelector("textarea")).toBeNull();
    expect(block.querySelector("button.smt-run")).toBeNull();
    expect(block.querySelector("pre.smt-code")?.textContent).toBe("print(1)");
    expect(block.querySelector("button.smt-copy")).not.toBeNull();
  });
});

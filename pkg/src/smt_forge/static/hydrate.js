/** DOM wiring for interactive blocks and game editors.
 *
 * Pages arrive fully rendered with precomputed outputs; this layer
 * swaps live editors in, keeping every interaction client-side: Run
 * feeds the embedded solver, Copy uses the clipboard, Reset flips to
 * Undo for three seconds, Discuss opens the configured forum. No
 * request ever leaves for anything but the site's own static files.
 */
import { UNDO_WINDOW_MS, editCode, initialState, isStale, resetBlock, runBlock, undoAvailable, undoReset, } from "./blockState.js";
import { runScript } from "./solver.js";
import { decodeSecret, fetchGame } from "./manifest.js";
import { judge, renderModel } from "./game.js";
const DEFAULT_RUN_TIMEOUT_MS = 30000;
/** Client-side run budget mirrors the build-time budget the page carries. */
export function solverExecutor(code, timeoutMs = DEFAULT_RUN_TIMEOUT_MS) {
    const result = runScript(code, { timeoutMs });
    return {
        text: result.output,
        status: result.timedOut ? "timeout" : result.hadError ? "error" : "success",
    };
}
function el(tag, className, text) {
    const node = document.createElement(tag);
    if (className)
        node.className = className;
    if (text !== undefined)
        node.textContent = text;
    return node;
}
function renderGutter(gutter, code) {
    const lines = Math.max(code.split("\n").length, 1);
    gutter.textContent = Array.from({ length: lines }, (_, i) => `${i + 1}`).join("\n");
}
class BlockView {
    constructor(container, manifest) {
        this.container = container;
        this.gutter = null;
        this.undoTimer = null;
        const snippetId = container.dataset.snippetId ?? "";
        const codePre = container.querySelector(".smt-code");
        const code = codePre?.textContent ?? "";
        const entry = manifest[snippetId];
        this.state = initialState(snippetId, code, {
            manifestOutput: entry?.output,
            readOnly: container.dataset.readOnly === "true",
            alwaysEditable: container.dataset.alwaysEditable === "true",
        });
        this.editor = el("textarea", "smt-editor");
        this.editor.value = code;
        this.editor.spellcheck = false;
        this.editor.rows = Math.max(code.split("\n").length, 2);
        this.editor.addEventListener("input", () => {
            this.state = editCode(this.state, this.editor.value);
            this.refresh();
        });
        const editorRow = el("div", "smt-editor-row");
        if (container.dataset.showLineNumbers === "true") {
            this.gutter = el("pre", "smt-gutter");
            renderGutter(this.gutter, code);
            editorRow.appendChild(this.gutter);
        }
        editorRow.appendChild(this.editor);
        this.outputPane = (container.querySelector(".smt-output")
            ?? el("pre", "smt-output"));
        const toolbar = el("div", "smt-toolbar");
        if (!this.state.readOnly) {
            const runButton = el("button", "smt-run", "Run");
            runButton.addEventListener("click", () => this.run(manifest));
            toolbar.appendChild(runButton);
        }
        const hover = el("div", "smt-hover-controls");
        const copyButton = el("button", "smt-copy", "Copy");
        copyButton.addEventListener("click", () => {
            void navigator.clipboard?.writeText(this.editor.value);
        });
        hover.appendChild(copyButton);
        this.resetButton = el("button", "smt-reset", "Reset");
        if (!this.state.readOnly) {
            this.resetButton.addEventListener("click", () => this.resetOrUndo());
            hover.appendChild(this.resetButton);
        }
        const discussUrl = container.dataset.discussUrl;
        if (discussUrl) {
            const discuss = el("button", "smt-discuss", "Discuss");
            discuss.addEventListener("click", () => {
                window.open(discussUrl, "_blank", "noopener");
            });
            hover.appendChild(discuss);
        }
        if (this.state.readOnly) {
            container.appendChild(hover);
            container.setAttribute("data-hydrated", "read-only");
            return; // keep the static highlighted <pre>, no editor, no Run
        }
        codePre.replaceWith(editorRow);
        container.appendChild(toolbar);
        container.appendChild(hover);
        if (!this.outputPane.isConnected && this.state.output) {
            container.appendChild(this.outputPane);
        }
        container.setAttribute("data-hydrated", "interactive");
        this.refresh();
    }
    run(manifest) {
        const entry = manifest[this.state.snippetId];
        const timeoutMs = Number(this.container.dataset.timeoutMs)
            || DEFAULT_RUN_TIMEOUT_MS;
        this.state = runBlock(this.state, (code) => solverExecutor(code, timeoutMs), entry?.output);
        this.refresh();
    }
    resetOrUndo() {
        const now = Date.now();
        if (undoAvailable(this.state, now)) {
            this.state = undoReset(this.state, now);
            this.editor.value = this.state.currentCode;
            this.clearUndoTimer();
        }
        else {
            this.state = resetBlock(this.state, now);
            this.editor.value = this.state.currentCode;
            this.clearUndoTimer();
            this.undoTimer = setTimeout(() => {
                this.state = { ...this.state, undoExpiresAt: null, undoSavedCode: null };
                this.refresh();
            }, UNDO_WINDOW_MS);
        }
        this.refresh();
    }
    clearUndoTimer() {
        if (this.undoTimer !== null) {
            clearTimeout(this.undoTimer);
            this.undoTimer = null;
        }
    }
    refresh() {
        this.resetButton.textContent =
            undoAvailable(this.state, Date.now()) ? "Undo" : "Reset";
        if (this.gutter)
            renderGutter(this.gutter, this.editor.value);
        const output = this.state.output;
        if (output) {
            if (!this.outputPane.isConnected)
                this.container.appendChild(this.outputPane);
            this.outputPane.textContent = output.text;
            this.outputPane.dataset.status = output.status;
            this.outputPane.classList.toggle("stale", isStale(this.state));
        }
    }
}
export function hydrateBlocks(manifest, root = document) {
    root.querySelectorAll(".smt-block").forEach((container) => {
        new BlockView(container, manifest);
    });
}
function verdictTable(rows) {
    const table = el("table", "verdict-table");
    const thead = table.createTHead();
    const headRow = thead.insertRow();
    for (const text of ["Model", "Satisfies your formula?",
        "Satisfies the secret formula?"]) {
        const th = document.createElement("th");
        th.textContent = text;
        headRow.appendChild(th);
    }
    const body = table.createTBody();
    for (const row of rows) {
        const tr = body.insertRow();
        tr.insertCell().textContent = row.model;
        tr.insertCell().textContent = row.user ? "✔" : "✘";
        tr.insertCell().textContent = row.secret ? "✔" : "✘";
    }
    return table;
}
export async function hydrateGames(prefix, root = document) {
    const editors = [...root.querySelectorAll(".game-editor")];
    for (const holder of editors) {
        const gameId = holder.dataset.gameId;
        if (!gameId)
            continue;
        const game = await fetchGame(prefix, gameId);
        const secret = decodeSecret(game);
        const hint = el("p", "game-hint", "Declared constants: "
            + game.declarations.map((d) => `${d.name} : ${d.sort}`).join(", "));
        const editor = el("textarea", "smt-editor game-guess");
        editor.rows = 3;
        editor.spellcheck = false;
        editor.placeholder = "(your formula here)";
        const button = el("button", "smt-run", "Run");
        const result = el("div", "game-result");
        button.addEventListener("click", () => {
            result.textContent = "";
            let verdict;
            try {
                verdict = judge(editor.value, secret, game.declarations, game.maxRows);
            }
            catch (err) {
                result.appendChild(el("p", "game-error", String(err)));
                return;
            }
            if (verdict.kind === "equivalent") {
                result.appendChild(el("p", "game-win", "Equivalent: your formula matches the secret formula."));
            }
            else {
                result.appendChild(el("p", "game-miss", "Not yet: these models tell your formula and the secret apart."));
                result.appendChild(verdictTable(verdict.rows.map((row) => ({
                    model: renderModel(row.model),
                    user: row.satisfiesUser,
                    secret: row.satisfiesSecret,
                }))));
            }
        });
        holder.appendChild(hint);
        holder.appendChild(editor);
        holder.appendChild(button);
        holder.appendChild(result);
        holder.setAttribute("data-hydrated", "game");
    }
}

/** Editor-block state: run, reset with a 3-second undo window, staleness.
 *
 * Pure state transitions with an injectable clock, so the timing
 * contract is testable without timers: after a reset the control acts
 * as "undo" for exactly UNDO_WINDOW_MS, then reverts to "reset";
 * displayed output is stale exactly when the current code no longer
 * matches the code that produced it.
 */

export const UNDO_WINDOW_MS = 3000;

export interface BlockOutput {
  text: string;
  status: string;        // success | error | timeout
  producedBy: string;    // code that generated this output
}

export interface BlockState {
  snippetId: string;
  originalCode: string;
  currentCode: string;
  output: BlockOutput | null;
  undoExpiresAt: number | null;  // clock ms; null = no undo window
  undoSavedCode: string | null;
  readOnly: boolean;
  alwaysEditable: boolean;
}

export type Clock = () => number;

export function initialState(snippetId: string, code: string, options: {
  manifestOutput?: string;
  readOnly?: boolean;
  alwaysEditable?: boolean;
} = {}): BlockState {
  return {
    snippetId,
    originalCode: code,
    currentCode: code,
    output: options.manifestOutput !== undefined
      ? { text: options.manifestOutput, status: "success", producedBy: code }
      : null,
    undoExpiresAt: null,
    undoSavedCode: null,
    readOnly: options.readOnly ?? false,
    alwaysEditable: options.alwaysEditable ?? false,
  };
}

export function isStale(state: BlockState): boolean {
  return state.output !== null && state.output.producedBy !== state.currentCode;
}

export function editCode(state: BlockState, code: string): BlockState {
  if (state.readOnly) return state;
  return { ...state, currentCode: code };
}

export interface RunOutcome {
  text: string;
  status: string;
}

export type Executor = (code: string) => RunOutcome;

/** Run the block. `executor` is the in-browser solver; when it is
 * unavailable and the code is unmodified, the precomputed manifest
 * output stands in (the fallback path). */
export function runBlock(state: BlockState, executor: Executor | null,
                         manifestOutput: string | undefined): BlockState {
  if (state.readOnly) return state;
  if (executor === null) {
    if (state.currentCode === state.originalCode && manifestOutput !== undefined) {
      return {
        ...state,
        output: { text: manifestOutput, status: "success",
                  producedBy: state.currentCode },
      };
    }
    return {
      ...state,
      output: {
        text: "The in-browser solver failed to load; this block can only "
          + "replay its precomputed output in its original form.",
        status: "error",
        producedBy: state.currentCode,
      },
    };
  }
  const outcome = executor(state.currentCode);
  return {
    ...state,
    output: { text: outcome.text, status: outcome.status,
              producedBy: state.currentCode },
  };
}

export function resetBlock(state: BlockState, now: number): BlockState {
  return {
    ...state,
    undoSavedCode: state.currentCode,
    currentCode: state.originalCode,
    undoExpiresAt: now + UNDO_WINDOW_MS,
  };
}

export function undoAvailable(state: BlockState, now: number): boolean {
  return state.undoExpiresAt !== null && now < state.undoExpiresAt;
}

export function undoReset(state: BlockState, now: number): BlockState {
  if (!undoAvailable(state, now) || state.undoSavedCode === null) return state;
  return {
    ...state,
    currentCode: state.undoSavedCode,
    undoSavedCode: null,
    undoExpiresAt: null,
  };
}

/** Called when the window lapses (timer or reexamination). */
export function expireUndo(state: BlockState, now: number): BlockState {
  if (state.undoExpiresAt !== null && now >= state.undoExpiresAt) {
    return { ...state, undoExpiresAt: null, undoSavedCode: null };
  }
  return state;
}

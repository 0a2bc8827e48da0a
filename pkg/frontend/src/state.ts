// Workbench state and its URL-hash codec.
//
// Everything needed to reconstruct a view lives either on the server or in
// the URL, so any view is shareable as a link. Ephemeral interaction state
// (hover, pending queue preview) is deliberately excluded from the hash.

import type { SampleId } from "./types.js";

export interface WorkbenchState {
  dataset: string | null;
  layout: string | null;
  session: string | null;
  selection: SampleId[];
  labelFilter: string[];
  colorBy: "label" | "code";
  hover: SampleId | null;
  queuePreview: SampleId[];
}

export function initialState(): WorkbenchState {
  return {
    dataset: null,
    layout: null,
    session: null,
    selection: [],
    labelFilter: [],
    colorBy: "label",
    hover: null,
    queuePreview: [],
  };
}

export function encodeStateToHash(state: WorkbenchState): string {
  const params = new URLSearchParams();
  if (state.dataset) params.set("dataset", state.dataset);
  if (state.layout) params.set("layout", state.layout);
  if (state.session) params.set("session", state.session);
  if (state.selection.length) params.set("select", state.selection.map(String).join(","));
  if (state.labelFilter.length) params.set("labels", state.labelFilter.join(","));
  if (state.colorBy !== "label") params.set("color", state.colorBy);
  const encoded = params.toString();
  return encoded ? `#${encoded}` : "";
}

function parseSampleId(raw: string): SampleId {
  const n = Number(raw);
  return Number.isInteger(n) && raw.trim() !== "" ? n : raw;
}

export function decodeStateFromHash(hash: string): WorkbenchState {
  const state = initialState();
  const trimmed = hash.startsWith("#") ? hash.slice(1) : hash;
  if (!trimmed) return state;
  const params = new URLSearchParams(trimmed);
  state.dataset = params.get("dataset");
  state.layout = params.get("layout");
  state.session = params.get("session");
  const selection = params.get("select");
  if (selection) state.selection = selection.split(",").map(parseSampleId);
  const labels = params.get("labels");
  if (labels) state.labelFilter = labels.split(",");
  state.colorBy = params.get("color") === "code" ? "code" : "label";
  return state;
}

/** Selection must only reference points of the active layout. */
export function pruneSelection(state: WorkbenchState, layoutIds: Set<SampleId>): WorkbenchState {
  const selection = state.selection.filter((id) => layoutIds.has(id));
  if (selection.length === state.selection.length) return state;
  return { ...state, selection };
}

export function toggleSelection(state: WorkbenchState, id: SampleId): WorkbenchState {
  const selection = state.selection.includes(id)
    ? state.selection.filter((existing) => existing !== id)
    : [...state.selection, id];
  return { ...state, selection };
}

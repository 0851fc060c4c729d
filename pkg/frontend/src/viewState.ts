// UI state shared across the panes. Kept as a plain object plus pure
// update helpers so invariants (single selection, throttle budget) are
// enforceable in tests without a DOM.

export interface ViewState {
  selectedPoint: string | null;
  dragInProgress: boolean;
  lastFeasiblePosition: [number, number] | null;
  prolineTopK: number;
  feasibilityOverlay: boolean;
  expandedHistograms: Set<string>;
}

export function initialViewState(): ViewState {
  return {
    selectedPoint: null,
    dragInProgress: false,
    lastFeasiblePosition: null,
    prolineTopK: 8,
    feasibilityOverlay: false,
    expandedHistograms: new Set(),
  };
}

/** Selecting a point replaces any previous selection (at most one). */
export function selectPoint(state: ViewState, pointId: string | null): ViewState {
  if (state.dragInProgress) return state; // selection is frozen mid-drag
  return {
    ...state,
    selectedPoint: pointId,
    lastFeasiblePosition: null,
    expandedHistograms: pointId === state.selectedPoint ? state.expandedHistograms : new Set(),
  };
}

export function beginDrag(state: ViewState, start: [number, number]): ViewState {
  return { ...state, dragInProgress: true, lastFeasiblePosition: start };
}

export function recordFeasible(state: ViewState, position: [number, number]): ViewState {
  return { ...state, lastFeasiblePosition: position };
}

export function endDrag(state: ViewState): ViewState {
  return { ...state, dragInProgress: false };
}

export function toggleOverlay(state: ViewState): ViewState {
  return { ...state, feasibilityOverlay: !state.feasibilityOverlay };
}

export function setTopK(state: ViewState, topK: number): ViewState {
  return { ...state, prolineTopK: Math.max(1, Math.round(topK)) };
}

export function toggleHistogram(state: ViewState, feature: string): ViewState {
  const expanded = new Set(state.expandedHistograms);
  if (expanded.has(feature)) expanded.delete(feature);
  else expanded.add(feature);
  return { ...state, expandedHistograms: expanded };
}

// Query state lives in the URL so an investigation step can be restored or
// shared: gallery id, mode, k, wanted colour, multi-probe ids, weights.

export interface QueryState {
  gallery: string
  mode: string
  k: number
  wantedColour: string | null
  probeIds: string[]
  wShape: number | null
}

export const DEFAULT_STATE: QueryState = {
  gallery: 'demo',
  mode: 'shape',
  k: 10,
  wantedColour: null,
  probeIds: [],
  wShape: null,
}

export function stateToParams(state: QueryState): URLSearchParams {
  const params = new URLSearchParams()
  params.set('gallery', state.gallery)
  params.set('mode', state.mode)
  params.set('k', String(state.k))
  if (state.wantedColour) params.set('colour', state.wantedColour)
  if (state.probeIds.length > 0) params.set('probes', state.probeIds.join(','))
  if (state.wShape !== null) params.set('w_shape', String(state.wShape))
  return params
}

export function stateFromParams(params: URLSearchParams): QueryState {
  const k = Number(params.get('k'))
  const wShape = params.get('w_shape')
  return {
    gallery: params.get('gallery') ?? DEFAULT_STATE.gallery,
    mode: params.get('mode') ?? DEFAULT_STATE.mode,
    k: Number.isFinite(k) && k >= 1 ? k : DEFAULT_STATE.k,
    wantedColour: params.get('colour'),
    probeIds: (params.get('probes') ?? '').split(',').filter((s) => s.length > 0),
    wShape: wShape !== null && Number.isFinite(Number(wShape)) ? Number(wShape) : null,
  }
}

export function pushState(state: QueryState): void {
  const url = `${window.location.pathname}?${stateToParams(state)}`
  window.history.replaceState(null, '', url)
}

export function restoreState(): QueryState {
  return stateFromParams(new URLSearchParams(window.location.search))
}

// Search panel: gallery id, mode, k, fusion weight, multi-probe toggle.

import type { QueryState } from '../state.js'

export interface SearchPanelHandlers {
  onChanged: (state: QueryState) => void
  onSearch: () => void
}

export function renderSearchPanel(
  container: HTMLElement,
  state: QueryState,
  multiProbeAvailable: boolean,
  handlers: SearchPanelHandlers,
): void {
  container.textContent = ''
  const panel = document.createElement('section')
  panel.className = 'search-panel'

  const gallery = document.createElement('input')
  gallery.type = 'text'
  gallery.className = 'panel-gallery'
  gallery.value = state.gallery
  gallery.addEventListener('change', () =>
    handlers.onChanged({ ...state, gallery: gallery.value }),
  )
  panel.append(labelled('Gallery', gallery))

  const mode = document.createElement('select')
  mode.className = 'panel-mode'
  for (const m of ['shape', 'colour', 'fused']) {
    const opt = document.createElement('option')
    opt.value = m
    opt.textContent = m
    if (m === state.mode) opt.selected = true
    mode.append(opt)
  }
  mode.addEventListener('change', () => handlers.onChanged({ ...state, mode: mode.value }))
  panel.append(labelled('Mode', mode))

  const k = document.createElement('input')
  k.type = 'number'
  k.className = 'panel-k'
  k.min = '1'
  k.value = String(state.k)
  k.addEventListener('change', () =>
    handlers.onChanged({ ...state, k: Math.max(1, Number(k.value) || 1) }),
  )
  panel.append(labelled('Top k', k))

  const wShape = document.createElement('input')
  wShape.type = 'number'
  wShape.className = 'panel-w-shape'
  wShape.min = '0'
  wShape.max = '1'
  wShape.step = '0.01'
  wShape.value = state.wShape === null ? '' : String(state.wShape)
  wShape.placeholder = 'service default'
  wShape.disabled = state.mode !== 'fused'
  wShape.addEventListener('change', () =>
    handlers.onChanged({
      ...state,
      wShape: wShape.value === '' ? null : Math.min(1, Math.max(0, Number(wShape.value))),
    }),
  )
  panel.append(labelled('Shape weight (fused)', wShape))

  const multiNote = document.createElement('p')
  multiNote.className = 'panel-multi-note'
  multiNote.textContent = multiProbeAvailable
    ? `Multi-probe: ${state.probeIds.length} enrolled records fused by max score`
    : 'Single probe'
  panel.append(multiNote)

  const go = document.createElement('button')
  go.type = 'button'
  go.className = 'panel-search'
  go.textContent = 'Search'
  go.addEventListener('click', () => handlers.onSearch())
  panel.append(go)

  container.append(panel)
}

function labelled(text: string, control: HTMLElement): HTMLLabelElement {
  const label = document.createElement('label')
  label.className = 'panel-field'
  const span = document.createElement('span')
  span.textContent = text
  label.append(span, control)
  return label
}

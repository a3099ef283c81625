// Application shell: wires the probe picker, search panel, mix-mode bar,
// results grid, and detection drawer to the /v1 service. The UI does no
// scoring or filtering of its own; every refinement is a fresh service
// query, and superseded searches are dropped client-side.

import { ApiClient, ApiError } from './api.js'
import { DEFAULT_STATE, pushState, restoreState, type QueryState } from './state.js'
import type { ProbeSource, RankedItem, SearchRequestBody, SearchResponse } from './types.js'
import { renderDetectionDrawer } from './views/detectionDrawer.js'
import { renderMixModeBar } from './views/mixModeBar.js'
import { renderProbePicker } from './views/probePicker.js'
import { renderResultsGrid } from './views/resultsGrid.js'
import { renderSearchPanel } from './views/searchPanel.js'

export interface AppElements {
  probe: HTMLElement
  panel: HTMLElement
  mixMode: HTMLElement
  results: HTMLElement
  drawer: HTMLElement
  error: HTMLElement
}

export class App {
  state: QueryState
  probe: ProbeSource | null = null
  lastResponse: SearchResponse | null = null
  private searchEpoch = 0

  constructor(
    private api: ApiClient,
    private el: AppElements,
  ) {
    this.state = restoreState()
    if (this.state.probeIds.length > 0) {
      this.probe = { kind: 'ids', ids: this.state.probeIds }
    }
  }

  static mount(api: ApiClient, root: HTMLElement): App {
    root.textContent = ''
    const make = (cls: string) => {
      const div = document.createElement('div')
      div.className = cls
      root.append(div)
      return div
    }
    const app = new App(api, {
      error: make('pane-error'),
      probe: make('pane-probe'),
      panel: make('pane-panel'),
      mixMode: make('pane-mixmode'),
      results: make('pane-results'),
      drawer: make('pane-drawer'),
    })
    app.renderAll()
    return app
  }

  buildRequest(): SearchRequestBody {
    if (this.probe === null) {
      throw new Error('pick a probe first')
    }
    const body: SearchRequestBody = {
      mode: this.state.wantedColour !== null ? 'shape' : this.state.mode,
      k: this.state.k,
    }
    if (this.probe.kind === 'record') {
      body.probe = this.probe.record
    } else {
      body.probe_ids = this.probe.ids
    }
    if (this.state.wantedColour !== null) {
      body.wanted_colour = this.state.wantedColour
    }
    if (body.mode === 'fused' && this.state.wShape !== null) {
      body.weights = {
        w_shape: this.state.wShape,
        w_colour: 1 - this.state.wShape,
        mode: 'weighted_sum',
        calibration: null,
      }
    }
    return body
  }

  async runSearch(): Promise<void> {
    const epoch = ++this.searchEpoch
    this.showError(null)
    let response: SearchResponse
    try {
      response = await this.api.search(this.state.gallery, this.buildRequest())
    } catch (err) {
      if (epoch === this.searchEpoch) this.showError(err)
      return
    }
    if (epoch !== this.searchEpoch) return // superseded by a newer query
    this.lastResponse = response
    pushState(this.state)
    this.renderResults()
  }

  async openDrawer(item: RankedItem): Promise<void> {
    try {
      const response = await this.api.detections(this.state.gallery, item.record_id)
      renderDetectionDrawer(this.el.drawer, response)
    } catch (err) {
      this.showError(err)
    }
  }

  selectColour(colour: string | null): void {
    // a colour selection is a new service query, never a local filter
    this.state = { ...this.state, wantedColour: colour }
    this.renderMixMode()
    void this.runSearch()
  }

  setProbe(probe: ProbeSource | null): void {
    this.probe = probe
    this.state = {
      ...this.state,
      probeIds: probe?.kind === 'ids' ? probe.ids : [],
    }
    this.renderProbe()
    this.renderPanel()
  }

  setState(state: QueryState): void {
    this.state = state
    pushState(state)
    this.renderPanel()
  }

  showError(err: unknown): void {
    this.el.error.textContent = ''
    if (err === null) return
    const box = document.createElement('div')
    box.className = 'error-box'
    const text = document.createElement('span')
    if (err instanceof ApiError) {
      text.textContent = `${err.body.code}: ${err.body.message}`
    } else {
      text.textContent = String(err instanceof Error ? err.message : err)
    }
    const retry = document.createElement('button')
    retry.type = 'button'
    retry.className = 'error-retry'
    retry.textContent = 'Retry'
    retry.addEventListener('click', () => void this.runSearch())
    box.append(text, retry)
    this.el.error.append(box)
  }

  renderAll(): void {
    this.renderProbe()
    this.renderPanel()
    this.renderMixMode()
    this.renderResults()
    renderDetectionDrawer(this.el.drawer, null)
  }

  private renderProbe(): void {
    renderProbePicker(this.el.probe, this.probe, {
      onProbeChanged: (probe) => this.setProbe(probe),
    })
  }

  private renderPanel(): void {
    renderSearchPanel(this.el.panel, this.state, (this.probe?.kind === 'ids' && this.probe.ids.length > 1) === true, {
      onChanged: (state) => this.setState(state),
      onSearch: () => void this.runSearch(),
    })
  }

  private renderMixMode(): void {
    renderMixModeBar(this.el.mixMode, this.state.wantedColour, {
      onColourSelected: (colour) => this.selectColour(colour),
    })
  }

  private renderResults(): void {
    if (this.lastResponse === null) {
      this.el.results.textContent = ''
      return
    }
    renderResultsGrid(this.el.results, this.lastResponse, {
      onSelect: (item) => void this.openDrawer(item),
    })
  }
}

export function defaultState(): QueryState {
  return { ...DEFAULT_STATE }
}

// Ranked best-shot grid. Renders the service response exactly as received:
// same order, same ranks, same score digits. No client-side re-ranking.

import type { RankedItem, SearchResponse } from '../types.js'

export interface ResultsGridHandlers {
  onSelect: (item: RankedItem) => void
}

export function renderResultsGrid(
  container: HTMLElement,
  response: SearchResponse,
  handlers: ResultsGridHandlers,
): void {
  container.textContent = ''
  const grid = document.createElement('div')
  grid.className = 'results-grid'

  for (const item of response.results) {
    const card = document.createElement('button')
    card.type = 'button'
    card.className = 'result-card'
    card.dataset.recordId = item.record_id
    card.dataset.rank = String(item.rank)

    const rank = document.createElement('span')
    rank.className = 'result-rank'
    rank.textContent = `#${item.rank}`

    const rid = document.createElement('span')
    rid.className = 'result-id'
    rid.textContent = item.record_id

    const score = document.createElement('span')
    score.className = 'result-score'
    score.textContent = item.score.toString()

    card.append(rank, rid, score)

    if (item.colour) {
      const colour = document.createElement('span')
      colour.className = 'result-colour'
      colour.dataset.label = item.colour.label
      colour.textContent = item.colour.label
      card.append(colour)
    }

    const modalities = document.createElement('span')
    modalities.className = 'result-modalities'
    modalities.textContent = Object.entries(item.per_modality_scores)
      .map(([m, s]) => `${m} ${s.toString()}`)
      .join(' · ')
    card.append(modalities)

    card.addEventListener('click', () => handlers.onSelect(item))
    grid.append(card)
  }

  const summary = document.createElement('p')
  summary.className = 'results-summary'
  const d = response.diagnostics
  const parts = [`${response.results.length} results`, `mode ${response.mode}`]
  if (response.wanted_colour) parts.push(`colour ${response.wanted_colour}`)
  if (d.excluded_no_colour_template !== undefined) {
    parts.push(`${d.excluded_no_colour_template} without colour template excluded`)
  }
  summary.textContent = parts.join(' — ')

  container.append(grid, summary)
}

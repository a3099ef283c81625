// The grid must render the service's recorded response exactly: same order,
// same ranks, same score digits. A deliberately shuffled response must come
// out shuffled, proving there is no client-side re-ranking.

import { describe, expect, it } from 'vitest'

import { renderResultsGrid } from '../src/views/resultsGrid.js'
import type { SearchResponse } from '../src/types.js'

import searchShape from './fixtures/search_shape.json'
import mixmodeWhite from './fixtures/search_mixmode_white.json'

function render(response: SearchResponse): HTMLElement {
  const container = document.createElement('div')
  renderResultsGrid(container, response, { onSelect: () => {} })
  return container
}

describe('ResultsGrid', () => {
  it('renders the recorded shape response verbatim', () => {
    const response = searchShape as SearchResponse
    const container = render(response)
    const cards = [...container.querySelectorAll<HTMLElement>('.result-card')]
    expect(cards.length).toBe(response.results.length)
    cards.forEach((card, i) => {
      const item = response.results[i]
      expect(card.dataset.recordId).toBe(item.record_id)
      expect(card.querySelector('.result-rank')?.textContent).toBe(`#${item.rank}`)
      expect(card.querySelector('.result-score')?.textContent).toBe(item.score.toString())
      expect(card.querySelector('.result-colour')?.textContent).toBe(item.colour?.label)
    })
  })

  it('preserves the response order even when it is not score-sorted', () => {
    const response = searchShape as SearchResponse
    const shuffled: SearchResponse = {
      ...response,
      results: [...response.results].reverse(),
    }
    const cards = [...render(shuffled).querySelectorAll<HTMLElement>('.result-card')]
    expect(cards.map((c) => c.dataset.recordId)).toEqual(
      shuffled.results.map((r) => r.record_id),
    )
  })

  it('renders mix-mode results with their colour decisions and exclusions', () => {
    const response = mixmodeWhite as SearchResponse
    const container = render(response)
    const labels = [...container.querySelectorAll<HTMLElement>('.result-colour')]
    expect(labels.map((l) => l.textContent)).toEqual(
      response.results.map((r) => r.colour?.label),
    )
    expect(labels.every((l) => l.textContent === 'white')).toBe(true)
    expect(container.querySelector('.results-summary')?.textContent).toContain(
      'colour white',
    )
  })

  it('clicking a card reports the exact response item', () => {
    const response = searchShape as SearchResponse
    const selected: string[] = []
    const container = document.createElement('div')
    renderResultsGrid(container, response, {
      onSelect: (item) => selected.push(item.record_id),
    })
    const cards = [...container.querySelectorAll<HTMLElement>('.result-card')]
    cards[2].click()
    expect(selected).toEqual([response.results[2].record_id])
  })
})

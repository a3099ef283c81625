import { describe, expect, it } from 'vitest'

import { MIX_MODE_COLOURS, renderMixModeBar } from '../src/views/mixModeBar.js'

describe('MixModeBar', () => {
  it('renders one chip per colour plus the any chip', () => {
    const container = document.createElement('div')
    renderMixModeBar(container, null, { onColourSelected: () => {} })
    const chips = [...container.querySelectorAll<HTMLElement>('.colour-chip')]
    expect(chips.map((c) => c.dataset.colour)).toEqual(['', ...MIX_MODE_COLOURS])
    expect(chips[0].classList.contains('active')).toBe(true)
  })

  it('marks the active colour', () => {
    const container = document.createElement('div')
    renderMixModeBar(container, 'white', { onColourSelected: () => {} })
    const active = [...container.querySelectorAll<HTMLElement>('.colour-chip.active')]
    expect(active.map((c) => c.dataset.colour)).toEqual(['white'])
  })

  it('selecting a chip reports the colour; any reports null', () => {
    const picked: Array<string | null> = []
    const container = document.createElement('div')
    renderMixModeBar(container, null, { onColourSelected: (c) => picked.push(c) })
    const chips = [...container.querySelectorAll<HTMLElement>('.colour-chip')]
    chips.find((c) => c.dataset.colour === 'grey')?.click()
    chips.find((c) => c.dataset.colour === '')?.click()
    expect(picked).toEqual(['grey', null])
  })
})

import { describe, expect, it } from 'vitest'

import { stateFromParams, stateToParams, type QueryState } from '../src/state.js'

describe('URL state', () => {
  it('round-trips every field', () => {
    const state: QueryState = {
      gallery: 'cam4',
      mode: 'fused',
      k: 25,
      wantedColour: 'white',
      probeIds: ['cam2:trk-1', 'cam2:trk-2'],
      wShape: 0.7,
    }
    expect(stateFromParams(stateToParams(state))).toEqual(state)
  })

  it('falls back to defaults on an empty query string', () => {
    const state = stateFromParams(new URLSearchParams(''))
    expect(state.gallery).toBe('demo')
    expect(state.mode).toBe('shape')
    expect(state.k).toBe(10)
    expect(state.wantedColour).toBeNull()
    expect(state.probeIds).toEqual([])
  })

  it('ignores garbage k values', () => {
    const state = stateFromParams(new URLSearchParams('k=banana'))
    expect(state.k).toBe(10)
  })
})

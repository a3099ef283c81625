// Mix-Mode colour bar: a row of colour chips over the results. Selecting a
// colour does not filter locally; it asks the app to issue a fresh service
// query with wanted_colour set, and "any" clears the filter.

export interface MixModeHandlers {
  onColourSelected: (colour: string | null) => void
}

export const MIX_MODE_COLOURS = [
  'black',
  'white',
  'grey',
  'red',
  'blue',
  'green',
  'yellow',
  'orange',
  'brown',
  'beige',
]

export function renderMixModeBar(
  container: HTMLElement,
  active: string | null,
  handlers: MixModeHandlers,
  colours: string[] = MIX_MODE_COLOURS,
): void {
  container.textContent = ''
  const bar = document.createElement('div')
  bar.className = 'mix-mode-bar'

  const label = document.createElement('span')
  label.className = 'mix-mode-label'
  label.textContent = 'Mix-Mode colour:'
  bar.append(label)

  const anyChip = document.createElement('button')
  anyChip.type = 'button'
  anyChip.className = 'colour-chip'
  anyChip.dataset.colour = ''
  anyChip.textContent = 'any'
  if (active === null) anyChip.classList.add('active')
  anyChip.addEventListener('click', () => handlers.onColourSelected(null))
  bar.append(anyChip)

  for (const colour of colours) {
    const chip = document.createElement('button')
    chip.type = 'button'
    chip.className = 'colour-chip'
    chip.dataset.colour = colour
    chip.textContent = colour
    if (colour === active) chip.classList.add('active')
    chip.addEventListener('click', () => handlers.onColourSelected(colour))
    bar.append(chip)
  }

  container.append(bar)
}

// Detection drawer: every detection behind the selected best-shot, straight
// from the detections endpoint.

import type { DetectionsResponse } from '../types.js'

export function renderDetectionDrawer(
  container: HTMLElement,
  response: DetectionsResponse | null,
): void {
  container.textContent = ''
  const drawer = document.createElement('aside')
  drawer.className = 'detection-drawer'

  if (response === null) {
    const hint = document.createElement('p')
    hint.className = 'drawer-hint'
    hint.textContent = 'Select a best-shot to inspect its detections.'
    drawer.append(hint)
    container.append(drawer)
    return
  }

  const title = document.createElement('h3')
  title.textContent = `Detections of ${response.record_id}`
  drawer.append(title)

  const meta = document.createElement('p')
  meta.className = 'drawer-meta'
  meta.textContent =
    response.track_id === null
      ? `camera ${response.camera}, no track recorded`
      : `camera ${response.camera}, track ${response.track_id}`
  drawer.append(meta)

  const list = document.createElement('ol')
  list.className = 'detection-list'
  for (const det of response.detections) {
    const row = document.createElement('li')
    row.className = 'detection-row'
    row.dataset.frame = String(det.frame_index)
    row.textContent = `frame ${det.frame_index} — quality ${det.quality.toString()}`
    list.append(row)
  }
  drawer.append(list)

  if (response.detections.length === 0) {
    const empty = document.createElement('p')
    empty.className = 'drawer-hint'
    empty.textContent = 'No detections recorded for this best-shot.'
    drawer.append(empty)
  }

  container.append(drawer)
}

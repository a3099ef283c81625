// Probe picker: upload an embedding-record file (a JSON VehicleRecord, e.g.
// exported from the CLI or a representative-image record) or reference
// enrolled records by id. The UI never extracts features itself.

import type { ProbeSource } from '../types.js'

export interface ProbePickerHandlers {
  onProbeChanged: (probe: ProbeSource | null) => void
}

export function renderProbePicker(
  container: HTMLElement,
  current: ProbeSource | null,
  handlers: ProbePickerHandlers,
): void {
  container.textContent = ''
  const panel = document.createElement('section')
  panel.className = 'probe-picker'

  const title = document.createElement('h3')
  title.textContent = 'Probe'
  panel.append(title)

  const status = document.createElement('p')
  status.className = 'probe-status'
  if (current === null) {
    status.textContent = 'No probe selected.'
  } else if (current.kind === 'record') {
    status.textContent = `Embedding record: ${current.label}`
  } else {
    status.textContent = `Enrolled records: ${current.ids.join(', ')}`
  }
  panel.append(status)

  // upload a record file
  const file = document.createElement('input')
  file.type = 'file'
  file.className = 'probe-file'
  file.accept = '.json,.jsonl,application/json'
  file.addEventListener('change', async () => {
    const chosen = file.files?.[0]
    if (!chosen) return
    const text = await chosen.text()
    const firstLine = text.trim().split('\n')[0]
    try {
      const record = JSON.parse(firstLine) as Record<string, unknown>
      handlers.onProbeChanged({
        kind: 'record',
        record,
        label: String(record['record_id'] ?? chosen.name),
      })
    } catch {
      handlers.onProbeChanged(null)
    }
  })
  panel.append(file)

  // or reference enrolled record ids (comma-separated enables multi-probe)
  const idsInput = document.createElement('input')
  idsInput.type = 'text'
  idsInput.className = 'probe-ids'
  idsInput.placeholder = 'or enrolled record ids, comma-separated'
  if (current?.kind === 'ids') idsInput.value = current.ids.join(',')
  idsInput.addEventListener('change', () => {
    const ids = idsInput.value
      .split(',')
      .map((s) => s.trim())
      .filter((s) => s.length > 0)
    handlers.onProbeChanged(ids.length > 0 ? { kind: 'ids', ids } : null)
  })
  panel.append(idsInput)

  container.append(panel)
}

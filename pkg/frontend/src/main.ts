// Entry point: the only configuration is the service base URL.

import { ApiClient } from './api.js'
import { App } from './app.js'

declare global {
  interface Window {
    REVID_SERVICE_URL?: string
  }
}

document.addEventListener('DOMContentLoaded', () => {
  const base = window.REVID_SERVICE_URL ?? 'http://127.0.0.1:8750'
  const root = document.getElementById('app')
  if (root === null) throw new Error('missing #app mount point')
  App.mount(new ApiClient(base), root)
})

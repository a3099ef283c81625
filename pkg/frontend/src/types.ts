// Wire types of the /v1 service. The UI renders these verbatim; it never
// rescores or reorders.

export interface ColourDecision {
  label: string
  confidence: number
  runner_up: string
  margin: number
}

export interface RankedItem {
  record_id: string
  score: number
  per_modality_scores: Record<string, number>
  rank: number
  colour?: ColourDecision
}

export interface SearchDiagnostics {
  snapshot_version: number
  probes?: number
  eligible_records?: number
  total_records?: number
  shape_candidates?: number
  excluded_no_colour_template?: number
}

export interface SearchResponse {
  mode: string
  wanted_colour?: string
  results: RankedItem[]
  diagnostics: SearchDiagnostics
}

export interface DetectionItem {
  camera: string
  track_id: string
  frame_index: number
  quality: number
  shape_template: string | null
  colour_template: string | null
}

export interface DetectionsResponse {
  record_id: string
  camera: string
  track_id: string | null
  detections: DetectionItem[]
}

export interface HealthResponse {
  status: string
  galleries: string[]
}

export interface ServiceError {
  code: string
  message: string
  detail: unknown
}

export interface FusionWeightsBody {
  w_shape: number
  w_colour: number
  mode: 'weighted_sum' | 'plain_sum'
  calibration: null
}

// Probe source: an inline record (uploaded embedding file / representative
// image record) or ids of enrolled records (multi-probe uses several).
export type ProbeSource =
  | { kind: 'record'; record: Record<string, unknown>; label: string }
  | { kind: 'ids'; ids: string[] }

export interface SearchRequestBody {
  probe?: Record<string, unknown>
  probe_ids?: string[]
  mode: string
  k: number
  wanted_colour?: string
  weights?: FusionWeightsBody
}

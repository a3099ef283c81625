// Thin fetch client for the /v1 endpoints. Errors come back as the
// service's {code, message, detail} body, surfaced verbatim.

import type {
  DetectionsResponse,
  HealthResponse,
  SearchRequestBody,
  SearchResponse,
  ServiceError,
} from './types.js'

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ServiceError,
  ) {
    super(`${body.code}: ${body.message}`)
  }
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl + path, init)
    const body = await resp.json()
    if (!resp.ok) {
      throw new ApiError(resp.status, body as ServiceError)
    }
    return body as T
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>('/v1/health')
  }

  search(galleryId: string, body: SearchRequestBody): Promise<SearchResponse> {
    return this.request<SearchResponse>(
      `/v1/galleries/${encodeURIComponent(galleryId)}/search`,
      {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(body),
      },
    )
  }

  detections(galleryId: string, recordId: string): Promise<DetectionsResponse> {
    return this.request<DetectionsResponse>(
      `/v1/galleries/${encodeURIComponent(galleryId)}/records/${encodeURIComponent(recordId)}/detections`,
    )
  }
}

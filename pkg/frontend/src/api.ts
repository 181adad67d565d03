import type {
  DocumentInfo,
  ExportPayload,
  GuidelineTree,
  SuggestionsPayload,
  Verdict,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

/** Thin typed client over the review service endpoints. */
export class ApiClient {
  constructor(
    private readonly baseUrl = '',
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(`service unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { error?: string };
        if (body.error) detail = body.error;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  listDocuments(): Promise<DocumentInfo[]> {
    return this.request('/api/documents');
  }

  suggestions(documentId: string, method?: string): Promise<SuggestionsPayload> {
    const query = method ? `?method=${encodeURIComponent(method)}` : '';
    return this.request(`/api/documents/${encodeURIComponent(documentId)}/suggestions${query}`);
  }

  guideline(): Promise<GuidelineTree> {
    return this.request('/api/guideline');
  }

  postDecision(documentId: string, categoryId: string, verdict: Verdict): Promise<unknown> {
    return this.request(`/api/documents/${encodeURIComponent(documentId)}/decisions`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ category_id: categoryId, verdict }),
    });
  }

  exportClassification(): Promise<ExportPayload> {
    return this.request('/api/export');
  }
}

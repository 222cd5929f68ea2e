/**
 * Typed client for the JSON endpoints under /api.
 *
 * The interfaces mirror the server payloads field for field; the test suite
 * pins them against captured responses so drift shows up as a type or
 * assertion failure here rather than as a blank page.
 */

export interface RetrievedChunk {
  vector_id: number;
  score: number;
  doc_id: string;
  chunk_id: string;
  text: string;
  metadata: Record<string, string>;
}

export interface CitedCase {
  doc_id: string;
  case_name: string;
  date: string;
  outcome: string;
  citations: string[];
  provisions: string[];
  judgment_summary: string;
}

export interface QueryResponse {
  query: string;
  answer_text: string;
  degraded: boolean;
  parse_miss: boolean;
  cited_cases: CitedCase[];
  retrieved: RetrievedChunk[];
  timings: Record<string, number>;
}

export interface CaseRecord {
  doc_id: string;
  case_name: string;
  date: string;
  appellant: string;
  respondent: string;
  judges: string[];
  citations: string[];
  related_provisions: string[];
  case_type: string;
  judgement: string;
  summary: string;
  outcome_of_appellant: string;
}

export interface CaseDetail extends CaseRecord {
  generated_summary: string;
}

export interface CasePage {
  cases: CaseRecord[];
  total: number;
  page: number;
  page_size: number;
}

export type Stats = Record<string, number>;

export interface QueryRequest {
  query: string;
  k?: number;
  filters?: Record<string, string>;
}

/** Error carrying the HTTP status and the server's detail message. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(path, init);
  if (!res.ok) {
    let detail = `request failed with status ${res.status}`;
    try {
      const body = await res.json();
      if (typeof body.detail === "string") {
        detail = body.detail;
      }
    } catch {
      // non-JSON error body; keep the generic message
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export function postQuery(req: QueryRequest): Promise<QueryResponse> {
  return request<QueryResponse>("/api/query", {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(req),
  });
}

export function fetchCases(page = 1, caseType?: string): Promise<CasePage> {
  const params = new URLSearchParams({ page: String(page) });
  if (caseType) {
    params.set("type", caseType);
  }
  return request<CasePage>(`/api/cases?${params.toString()}`);
}

export function fetchCase(docId: string): Promise<CaseDetail> {
  return request<CaseDetail>(`/api/cases/${encodeURIComponent(docId)}`);
}

export function fetchStats(): Promise<Stats> {
  return request<Stats>("/api/stats");
}

import type {
  DocumentRecord,
  QueryResponse,
  RollupsResponse,
  SubtopicsResponse,
} from "./types.js";

/** What the session needs from the backend; the UI performs zero scoring. */
export interface ApiClient {
  document(id: string): Promise<DocumentRecord>;
  rollups(entity: string, depth?: number): Promise<RollupsResponse>;
  query(concepts: string[], k?: number): Promise<QueryResponse>;
  subtopics(concepts: string[], k?: number): Promise<SubtopicsResponse>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export function createHttpClient(baseUrl: string): ApiClient {
  const base = baseUrl.replace(/\/$/, "");
  return {
    document: (id) => request(`${base}/api/documents/${encodeURIComponent(id)}`),
    rollups: (entity, depth = 2) =>
      request(
        `${base}/api/entities/${encodeURIComponent(entity)}/rollups?depth=${depth}`,
      ),
    query: (concepts, k = 10) =>
      request(`${base}/api/query`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ concepts, k }),
      }),
    subtopics: (concepts, k = 10) =>
      request(`${base}/api/subtopics`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ concepts, k }),
      }),
  };
}

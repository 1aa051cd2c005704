import type {
  AnnotationEvent,
  AnnotationResponse,
  Batch,
  Judgment,
  LevelInfo,
  Round,
  Sentence,
  UnificationRecord,
  ValidateResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** 409 on POST /annotations: someone saved a newer version of this row. */
export class ConflictError extends ApiError {
  constructor(
    status: number,
    detail: string,
    public latest: AnnotationEvent | null,
  ) {
    super(status, detail);
  }
}

/** fetch() rejected: offline, refused connection, aborted. */
export class NetworkError extends Error {}

export interface ValidateRequest {
  candidate_level: number;
  sentence_id?: string;
  text?: string;
  asserted_features?: string[];
}

export interface AnnotationRequest {
  sentence_id: string;
  annotator: string;
  version: number;
  level?: number | null;
  asserted_features?: string[];
  flags?: string[];
  note?: string;
}

export class MiqyasClient {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        headers: { "Content-Type": "application/json" },
        ...init,
      });
    } catch (err) {
      throw new NetworkError(String(err));
    }
    if (!response.ok) {
      let detail: unknown = response.statusText;
      try {
        detail = (await response.json()).detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      if (response.status === 409 && detail && typeof detail === "object") {
        const d = detail as { detail?: string; latest?: AnnotationEvent | null };
        throw new ConflictError(409, d.detail ?? "conflict", d.latest ?? null);
      }
      throw new ApiError(response.status, typeof detail === "string" ? detail : JSON.stringify(detail));
    }
    return (await response.json()) as T;
  }

  levels(): Promise<LevelInfo[]> {
    return this.request("/levels");
  }

  sentence(id: string): Promise<Sentence> {
    return this.request(`/sentences/${encodeURIComponent(id)}`);
  }

  batchesFor(annotator: string): Promise<Batch[]> {
    return this.request(`/batches/${encodeURIComponent(annotator)}`);
  }

  createBatch(req: {
    annotator: string;
    size?: number;
    seed?: number;
    allow_partial?: boolean;
    include_annotated?: boolean;
  }): Promise<Batch> {
    return this.request("/batches", { method: "POST", body: JSON.stringify(req) });
  }

  submitBatch(batchId: string): Promise<Batch> {
    return this.request(`/batches/${encodeURIComponent(batchId)}/submit`, { method: "POST" });
  }

  validate(req: ValidateRequest): Promise<ValidateResponse> {
    return this.request("/validate", { method: "POST", body: JSON.stringify(req) });
  }

  submitAnnotation(req: AnnotationRequest): Promise<AnnotationResponse> {
    return this.request("/annotations", { method: "POST", body: JSON.stringify(req) });
  }

  openRound(sentenceIds: string[], annotators: string[]): Promise<Round> {
    return this.request("/unification/rounds", {
      method: "POST",
      body: JSON.stringify({ sentence_ids: sentenceIds, annotators }),
    });
  }

  getRound(roundId: string): Promise<Round> {
    return this.request(`/unification/rounds/${encodeURIComponent(roundId)}`);
  }

  recordUl(roundId: string, sentenceId: string, ul: number, rationale = ""): Promise<UnificationRecord> {
    return this.request(`/unification/${encodeURIComponent(roundId)}/ul`, {
      method: "POST",
      body: JSON.stringify({ sentence_id: sentenceId, ul, rationale }),
    });
  }
}

export type { Judgment };

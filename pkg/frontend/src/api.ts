// Typed client for the workbench service. All server interaction in the UI
// goes through this module and the five documented /api endpoints.

export interface Candidate {
  cnl: string;
  score: number;
  valid: boolean;
  parse_error: string | null;
}

export interface TranslateResponse {
  candidates: Candidate[];
  constraint_exhausted: boolean;
  max_length_exceeded: boolean;
}

export interface ValidateError {
  position: number;
  expected: string[];
  found: string | null;
  message: string;
}

export interface AstSummary {
  condition: string;
  actions: string[];
  normalized: string;
}

export type ValidateResponse =
  | { valid: true; ast: AstSummary }
  | { valid: false; error: ValidateError };

export interface RuleProgram {
  name: string;
  when: unknown;
  then: Array<Record<string, unknown>>;
}

export interface PredicateOutcome {
  key: string;
  op: string;
  value: unknown;
  outcome: boolean;
  missing: boolean;
}

export interface ExecutionTrace {
  fired: boolean;
  predicates?: PredicateOutcome[];
  missing?: string[];
  applied?: Array<Record<string, unknown>>;
  decision?: string | null;
  messages?: string[];
  record_after?: Record<string, unknown> | null;
  error?: string;
}

export interface CorpusStats {
  n_pairs: number;
  splits: Record<string, number>;
  grammar_bound: boolean;
  trie_scope: string;
}

export class ApiError extends Error {
  constructor(message: string, readonly status: number, readonly detail?: unknown) {
    super(message);
  }
}

/** What the session needs from the server; ApiClient is the real one. */
export interface WorkbenchApi {
  translate(nl: string, maxCandidates?: number): Promise<TranslateResponse>;
  validate(cnl: string): Promise<ValidateResponse>;
  transpile(cnl: string): Promise<RuleProgram>;
  execute(program: RuleProgram, record: Record<string, unknown>): Promise<ExecutionTrace>;
  stats(): Promise<CorpusStats>;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient implements WorkbenchApi {
  constructor(
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
    private readonly base: string = "",
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchImpl(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    const payload = await response.json().catch(() => null);
    if (!response.ok) {
      const detail = payload && (payload as { detail?: unknown }).detail;
      throw new ApiError(`${path}: HTTP ${response.status}`, response.status, detail);
    }
    return payload as T;
  }

  translate(nl: string, maxCandidates = 5): Promise<TranslateResponse> {
    return this.post<TranslateResponse>("/api/translate", {
      nl,
      max_candidates: maxCandidates,
    });
  }

  validate(cnl: string): Promise<ValidateResponse> {
    return this.post<ValidateResponse>("/api/validate", { cnl });
  }

  transpile(cnl: string): Promise<RuleProgram> {
    return this.post<RuleProgram>("/api/transpile", { cnl });
  }

  execute(program: RuleProgram, record: Record<string, unknown>): Promise<ExecutionTrace> {
    return this.post<ExecutionTrace>("/api/execute", { program, record });
  }

  async stats(): Promise<CorpusStats> {
    const response = await this.fetchImpl(this.base + "/api/corpus/stats");
    const payload = await response.json().catch(() => null);
    if (!response.ok) {
      throw new ApiError(`/api/corpus/stats: HTTP ${response.status}`, response.status);
    }
    return payload as CorpusStats;
  }
}

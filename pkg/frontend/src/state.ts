// Client-side authoring session: NL draft, translation candidates, the CNL
// under review, the transpiled program, and test-run traces. All state lives
// here (the server is stateless); the UI layer renders snapshots of it.

import {
  AstSummary,
  Candidate,
  ExecutionTrace,
  RuleProgram,
  ValidateError,
  WorkbenchApi,
} from "./api.js";

export type ValidationState =
  | { kind: "unknown" }
  | { kind: "pending" }
  | { kind: "valid"; ast: AstSummary }
  | { kind: "invalid"; error: ValidateError };

export interface TraceRow {
  record: Record<string, unknown>;
  trace: ExecutionTrace | null;
  error: string | null; // TypeMismatch or transport problem for this row
}

export interface Scheduler {
  set(fn: () => void, ms: number): number;
  clear(id: number): void;
}

const windowScheduler: Scheduler = {
  set: (fn, ms) => setTimeout(fn, ms) as unknown as number,
  clear: (id) => clearTimeout(id),
};

/** Splits CNL text like the server tokenizer: whitespace, quotes bind. */
export function tokenizeCnl(text: string): string[] {
  const tokens: string[] = [];
  let buf = "";
  let inQuote = false;
  for (const ch of text) {
    if (ch === '"') {
      inQuote = !inQuote;
      buf += ch;
    } else if (/\s/.test(ch) && !inQuote) {
      if (buf) {
        tokens.push(buf);
        buf = "";
      }
    } else {
      buf += ch;
    }
  }
  if (buf) tokens.push(buf);
  return tokens;
}

export class AuthoringSession {
  nl = "";
  candidates: Candidate[] = [];
  selectedCandidate: number | null = null;
  translating = false;
  translateError: string | null = null;
  constraintExhausted = false;

  cnl = "";
  validation: ValidationState = { kind: "unknown" };

  program: RuleProgram | null = null;
  transpileError: string | null = null;

  recordsText = '{"customer.age": 25, "customer.credit_score": 700}\n' +
    '{"customer.age": 17, "customer.credit_score": 700}';
  traces: TraceRow[] = [];
  runError: string | null = null;

  private translateSeq = 0;
  private validateSeq = 0;
  private debounceId: number | null = null;

  constructor(
    private readonly api: WorkbenchApi,
    private readonly onChange: () => void = () => {},
    private readonly debounceMs = 300,
    private readonly scheduler: Scheduler = windowScheduler,
  ) {}

  private emit(): void {
    this.onChange();
  }

  setNl(text: string): void {
    this.nl = text;
    this.emit();
  }

  get canSubmit(): boolean {
    return this.nl.trim().length > 0;
  }

  /** Translate the NL draft; stale responses (superseded drafts) are dropped. */
  async submitNl(): Promise<void> {
    if (!this.canSubmit) return;
    const seq = ++this.translateSeq;
    this.translating = true;
    this.translateError = null;
    this.emit();
    try {
      const response = await this.api.translate(this.nl);
      if (seq !== this.translateSeq) return; // superseded, discard
      this.candidates = response.candidates;
      this.constraintExhausted = response.constraint_exhausted;
      this.selectedCandidate = null;
      this.translating = false;
      this.emit();
    } catch (err) {
      if (seq !== this.translateSeq) return;
      this.translating = false;
      this.translateError = err instanceof Error ? err.message : String(err);
      this.emit(); // NL text untouched: the retry affordance resubmits it
    }
  }

  selectCandidate(index: number): void {
    const candidate = this.candidates[index];
    if (!candidate) return;
    this.selectedCandidate = index;
    this.cnl = candidate.cnl;
    this.program = null;
    this.traces = [];
    this.emit();
    void this.validateNow();
  }

  /** Edit the CNL under review; validation is debounced. */
  editCnl(text: string): void {
    this.cnl = text;
    this.program = null; // a stale program must never outlive its CNL
    this.validation = { kind: "pending" };
    this.emit();
    if (this.debounceId !== null) this.scheduler.clear(this.debounceId);
    this.debounceId = this.scheduler.set(() => {
      this.debounceId = null;
      void this.validateNow();
    }, this.debounceMs);
  }

  async validateNow(): Promise<void> {
    if (this.debounceId !== null) {
      this.scheduler.clear(this.debounceId);
      this.debounceId = null;
    }
    if (!this.cnl.trim()) {
      this.validation = { kind: "unknown" };
      this.emit();
      return;
    }
    const seq = ++this.validateSeq;
    this.validation = { kind: "pending" };
    this.emit();
    try {
      const response = await this.api.validate(this.cnl);
      if (seq !== this.validateSeq) return;
      this.validation = response.valid
        ? { kind: "valid", ast: response.ast }
        : { kind: "invalid", error: response.error };
    } catch (err) {
      if (seq !== this.validateSeq) return;
      this.validation = {
        kind: "invalid",
        error: {
          position: 0,
          expected: [],
          found: null,
          message: err instanceof Error ? err.message : String(err),
        },
      };
    }
    this.emit();
  }

  /** Completion hints: the expected-token set at the error position. */
  get hints(): string[] {
    return this.validation.kind === "invalid" ? this.validation.error.expected : [];
  }

  /** Insert a hinted token at the error's token position and revalidate. */
  insertHint(token: string): void {
    if (this.validation.kind !== "invalid") return;
    const tokens = tokenizeCnl(this.cnl);
    const at = Math.min(this.validation.error.position, tokens.length);
    tokens.splice(at, 0, token);
    this.cnl = tokens.join(" ");
    this.program = null;
    this.emit();
    void this.validateNow();
  }

  get canTranspile(): boolean {
    return this.validation.kind === "valid";
  }

  /** Transpile the reviewed CNL; refuses anything not currently valid. */
  async transpile(): Promise<void> {
    if (!this.canTranspile) {
      throw new Error("transpile requires a valid CNL statement");
    }
    this.transpileError = null;
    try {
      this.program = await this.api.transpile(this.cnl);
      this.traces = [];
    } catch (err) {
      this.program = null;
      this.transpileError = err instanceof Error ? err.message : String(err);
    }
    this.emit();
  }

  programJson(): string {
    return this.program ? JSON.stringify(this.program, null, 2) : "";
  }

  /** data: URL for downloading the program as a JSON file. */
  downloadHref(): string {
    return "data:application/json;charset=utf-8," + encodeURIComponent(this.programJson() + "\n");
  }

  setRecordsText(text: string): void {
    this.recordsText = text;
    this.emit();
  }

  parseRecords(): Array<Record<string, unknown>> {
    const records: Array<Record<string, unknown>> = [];
    for (const line of this.recordsText.split("\n")) {
      if (!line.trim()) continue;
      const doc = JSON.parse(line);
      if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
        throw new Error(`record must be a JSON object: ${line}`);
      }
      records.push(doc as Record<string, unknown>);
    }
    return records;
  }

  /** Run every sample record through the program; row errors stay inline. */
  async run(): Promise<void> {
    if (!this.program) return;
    this.runError = null;
    let records: Array<Record<string, unknown>>;
    try {
      records = this.parseRecords();
    } catch (err) {
      this.runError = err instanceof Error ? err.message : String(err);
      this.emit();
      return;
    }
    const rows: TraceRow[] = [];
    for (const record of records) {
      try {
        const trace = await this.api.execute(this.program, record);
        rows.push({ record, trace, error: trace.error ?? null });
      } catch (err) {
        rows.push({
          record,
          trace: null,
          error: err instanceof Error ? err.message : String(err),
        });
      }
    }
    this.traces = rows;
    this.emit();
  }
}

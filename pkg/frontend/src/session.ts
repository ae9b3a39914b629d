import type { ApiClient } from "./api.js";
import type {
  DocumentRecord,
  QueryResponse,
  SubtopicsResponse,
} from "./types.js";

/**
 * Exploration session state machine.
 *
 * The query is an ordered list of concept chips; the navigation history is a
 * stack of query states whose top always equals the current query. Results
 * and suggestions always correspond to the displayed query: editing the
 * query clears them, running refetches them, and responses that arrive for a
 * superseded query (tracked by per-view sequence numbers) are discarded.
 * Request failures surface as a dismissible banner and leave state untouched.
 */

export interface SessionState {
  document: DocumentRecord | null;
  query: readonly string[];
  results: QueryResponse | null;
  suggestions: SubtopicsResponse | null;
  history: readonly (readonly string[])[];
  historyDepth: number;
  banner: string | null;
  pending: number;
}

type Listener = (state: SessionState) => void;

function message(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}

export class SessionStore {
  private document: DocumentRecord | null = null;
  private history: string[][] = [[]];
  private results: QueryResponse | null = null;
  private suggestions: SubtopicsResponse | null = null;
  private banner: string | null = null;
  private pending = 0;
  private documentSeq = 0;
  private querySeq = 0;
  private subtopicsSeq = 0;
  private listeners: Listener[] = [];

  constructor(
    private readonly client: ApiClient,
    private readonly k: number = 10,
  ) {}

  get query(): readonly string[] {
    return this.history[this.history.length - 1];
  }

  get state(): SessionState {
    return {
      document: this.document,
      query: [...this.query],
      results: this.results,
      suggestions: this.suggestions,
      history: this.history.map((q) => [...q]),
      historyDepth: this.history.length,
      banner: this.banner,
      pending: this.pending,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    listener(this.state);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    const snapshot = this.state;
    for (const listener of this.listeners) listener(snapshot);
  }

  canRun(): boolean {
    return this.query.length > 0;
  }

  canUndo(): boolean {
    return this.history.length > 1;
  }

  dismissBanner(): void {
    this.banner = null;
    this.emit();
  }

  async openDocument(id: string): Promise<void> {
    const seq = ++this.documentSeq;
    this.pending++;
    this.emit();
    try {
      const record = await this.client.document(id);
      if (seq === this.documentSeq) this.document = record;
    } catch (error) {
      this.banner = `could not open document ${id}: ${message(error)}`;
    } finally {
      this.pending--;
      this.emit();
    }
  }

  /** Add a rolled-up concept chip to the query (results no longer apply). */
  addConcept(concept: string): void {
    if (this.query.includes(concept)) return;
    this.history[this.history.length - 1] = [...this.query, concept];
    this.results = null;
    this.suggestions = null;
    this.emit();
  }

  removeConcept(concept: string): void {
    if (!this.query.includes(concept)) return;
    this.history[this.history.length - 1] = this.query.filter((c) => c !== concept);
    this.results = null;
    this.suggestions = null;
    this.emit();
  }

  /** Run the current query: fetch results and drill-down suggestions. */
  async runQuery(): Promise<void> {
    if (!this.canRun()) return;
    await this.refetch();
  }

  /** Append a suggested subtopic, push history, and rerun. */
  async drillDown(concept: string): Promise<void> {
    if (this.query.includes(concept)) return;
    this.history.push([...this.query, concept]);
    this.results = null;
    this.suggestions = null;
    this.emit();
    await this.refetch();
  }

  /** Pop history, restore the previous query, and refetch its views. */
  async undo(): Promise<void> {
    if (!this.canUndo()) return;
    this.history.pop();
    this.results = null;
    this.suggestions = null;
    this.emit();
    if (this.canRun()) {
      await this.refetch();
    }
  }

  private async refetch(): Promise<void> {
    const concepts = [...this.query];
    const querySeq = ++this.querySeq;
    const subtopicsSeq = ++this.subtopicsSeq;
    this.pending++;
    this.emit();
    try {
      const [results, suggestions] = await Promise.all([
        this.client.query(concepts, this.k),
        this.client.subtopics(concepts, this.k),
      ]);
      if (querySeq === this.querySeq) this.results = results;
      if (subtopicsSeq === this.subtopicsSeq) this.suggestions = suggestions;
    } catch (error) {
      this.banner = `query failed: ${message(error)}`;
    } finally {
      this.pending--;
      this.emit();
    }
  }
}

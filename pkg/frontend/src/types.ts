/** Wire types for the query service, mirroring its JSON field names. */

export interface ConceptMenuItem {
  concept: string;
  instance_count: number;
  specificity: number | null;
}

export interface DocumentMention {
  entity: string;
  count: number;
  concepts: ConceptMenuItem[];
}

export interface DocumentRecord {
  id: string;
  title: string;
  body: string | null;
  mentions: DocumentMention[];
}

export interface RollupsResponse {
  entity: string;
  depth: number;
  concepts: ConceptMenuItem[];
}

export interface ConceptExplanation {
  cdr: number;
  pivot: string;
  matched_entities: string[];
}

export interface QueryResult {
  document: string;
  title: string | null;
  rel: number;
  per_concept: Record<string, ConceptExplanation>;
}

export interface QueryResponse {
  concepts: string[];
  k: number;
  match_count: number;
  warnings: string[];
  results: QueryResult[];
}

export interface SubtopicSuggestion {
  concept: string;
  sbr: number;
  coverage: number;
  specificity: number;
  diversity: number;
  support_docs: number;
}

export interface SubtopicsResponse {
  concepts: string[];
  k: number;
  suggestions: SubtopicSuggestion[];
}

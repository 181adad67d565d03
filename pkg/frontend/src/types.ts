export type Decision = 'undecided' | 'accepted' | 'rejected' | 'added';
export type Verdict = 'accepted' | 'rejected' | 'added';

export interface SuggestionRow {
  category_id: string;
  text: string;
  kind: string;
  ka_title: string;
  ku_title: string;
  score: number;
  rank: number;
  decision: Decision;
}

export interface SuggestionsPayload {
  document_id: string;
  method: string;
  entries: SuggestionRow[];
}

export interface DocumentInfo {
  document_id: string;
  methods: Record<string, number>;
}

export interface GuidelineItem {
  id: string;
  kind: string;
  text: string;
  level?: string;
}

export interface GuidelineUnit {
  id: string;
  title: string;
  items: GuidelineItem[];
}

export interface GuidelineArea {
  id: string;
  title: string;
  units: GuidelineUnit[];
}

export interface GuidelineTree {
  name: string;
  areas: GuidelineArea[];
}

/** Final classification, one category-id list per document. */
export type ExportPayload = Record<string, string[]>;

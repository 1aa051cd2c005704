// Payload shapes of the annotation service API.

export interface LevelInfo {
  index: number;
  name: string;
  grade: string;
  readership: string;
  collapsed: Record<string, number>;
}

export interface TraceStep {
  rule: string;
  dimension: string;
  rule_floor: number;
  floor_after: number;
}

export type ViolationKind =
  | "below_floor"
  | "word_count_ceiling"
  | "not_levelable"
  | "dimension_info";

export interface Violation {
  kind: ViolationKind;
  severity: "advisory" | "info";
  message: string;
}

export interface Judgment {
  floor: number;
  floor_name: string;
  trace: TraceStep[];
  violations: Violation[];
}

export interface ValidateResponse {
  word_count: number;
  judgment: Judgment;
}

export interface Batch {
  batch_id: string;
  annotator: string;
  sentence_ids: string[];
  status: "open" | "submitted" | "unified";
  created?: string | null;
  submitted?: string | null;
}

export interface Sentence {
  sentence_id: string;
  doc_id: string;
  text: string;
  word_count: number;
  split: string;
  flags: string[];
  excluded: boolean;
}

export interface AnnotationEvent {
  seq: number;
  ts: string;
  sentence_id: string;
  annotator: string;
  batch_id: string;
  level: number | null;
  asserted_features: string[];
  flags: string[];
  note: string;
  version: number;
}

export interface AnnotationResponse {
  event: AnnotationEvent;
  word_count: number;
  judgment: Judgment | null;
}

export interface RoundSentence {
  sentence_id: string;
  text: string;
  labels: Record<string, number>;
  max_min: number;
  al_suggestion: number | null;
  ul: number | null;
}

export interface Round {
  round_id: string;
  status: string;
  annotators: string[];
  sentences: RoundSentence[];
}

export interface UnificationRecord {
  sentence_id: string;
  labels: Record<string, number>;
  ul: number;
  al: number;
  max_min: number;
  within_range: boolean;
  matches_annotator: boolean;
}

export const FLAG_OPTIONS = ["spelling_error", "colloquial", "sensitive", "other"] as const;
export type Flag = (typeof FLAG_OPTIONS)[number];

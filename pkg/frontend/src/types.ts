// Wire types mirroring the review service's JSON bodies.

export interface MatchInfo {
  code: string;
  distance: number;
}

export interface SiblingSpan {
  start: number;
  end: number;
  kind: string;
}

export interface SpanContext {
  sentence_index: number;
  tokens: string[];
  start: number;
  end: number;
  siblings: SiblingSpan[];
}

export interface Alternative {
  code: string;
  label: string;
  coarse: string;
  distance: number;
}

export type Status = "pending" | "accepted" | "corrected" | "flagged-missing";

export interface ReviewItem {
  span_id: string;
  surface: string;
  kind: string;
  silver_label: string;
  missing: boolean;
  match: MatchInfo | null;
  context: SpanContext | null;
  alternatives: Alternative[];
  status: Status;
  gold_label: string | null;
  decided_by: string | null;
  decided_at: string | null;
}

export interface ItemsPage {
  items: ReviewItem[];
  total: number;
  offset: number;
  limit: number;
}

export interface Progress {
  total: number;
  decided: number;
  by_status: Record<Status, number>;
}

export interface LabelSet {
  labels: string[];
  groups: Record<string, string[]>;
}

export type DecisionAction = "accept" | "correct" | "flag-missing";

export interface DecisionBody {
  label: string | null;
  action: DecisionAction;
  reviewer_id: string;
}

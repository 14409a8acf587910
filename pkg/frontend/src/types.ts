// Wire types mirroring the tutoring service API (see docs/api.md in the
// service repository). The UI renders these verbatim and never fabricates
// plan or scaffold state client-side.

export type ScaffoldLevel = "HighSupport" | "Guided" | "Low";
export type StepStatus = "Pending" | "Active" | "Completed" | "Deferred";

export interface PlanStep {
  index: number;
  title: string;
  objective: string;
  status: StepStatus;
}

export interface PlanSnapshot {
  plan_id: string;
  topic: string;
  steps: PlanStep[];
  created_turn: number;
  revision: number;
}

export interface PendingCheck {
  question: string;
  step_index: number;
  expected_concepts: string[];
}

export interface CitationDetail {
  chunk_id: string;
  title: string;
  excerpt: string;
}

export interface AgentResponse {
  response_id: string;
  text: string;
  citations: string[];
  citation_details?: CitationDetail[];
  plan_snapshot: PlanSnapshot | null;
  scaffold_used: ScaffoldLevel;
  check: PendingCheck | null;
  trace: {
    intent: string;
    plan_action: string;
    retrieval_ids: string[];
    scaffold_decision: [string, string] | string[];
    timings: Record<string, number>;
  };
}

export interface SessionMessage {
  turn_index: number;
  user_message: string;
  agent_text: string;
  intent: string;
  scaffold_used: ScaffoldLevel;
  citations: CitationDetail[];
  timestamp: number;
}

export interface SessionView {
  session_id: string;
  learner: { learner_id: string; role: string; familiarity: string };
  scaffold: ScaffoldLevel;
  scaffold_phase: string;
  plan: PlanSnapshot | null;
  pending_check: PendingCheck | null;
  messages: SessionMessage[];
  assessments: { verdict: string; gaps: string[]; rationale: string }[];
}

export interface ApiErrorBody {
  error: string;
  message: string;
}

// The six rating metrics, in display order. The widget renders exactly
// these rows; the submit body carries only the metrics the user rated.
export const METRICS = [
  "response_speed",
  "ease_of_use",
  "accuracy",
  "relevance",
  "practicality",
  "visual_appeal",
] as const;

export type MetricName = (typeof METRICS)[number];

export const METRIC_LABELS: Record<MetricName, string> = {
  response_speed: "Response Speed",
  ease_of_use: "Ease of Use",
  accuracy: "Accuracy",
  relevance: "Relevance",
  practicality: "Practicality",
  visual_appeal: "Visual Appeal",
};

export const PHASE_LABELS: Record<ScaffoldLevel, string> = {
  HighSupport: "I Do",
  Guided: "We Do",
  Low: "You Do",
};

/** Payload shapes returned by the /api/v1 REST service. */

export interface ProjectSummary {
  project_id: string;
  name: string;
  state: string;
}

export interface ProjectList {
  items: ProjectSummary[];
  total: number;
}

export interface ProjectStatus {
  project_id: string;
  state: string;
  progress: number;
  failure_reason: string | null;
}

export interface SizeHistogram {
  /** Bucket edges; the final open bucket's upper edge serializes as null. */
  edges: (number | null)[];
  counts: number[];
}

export interface TopSalientConcept {
  concept_id: number;
  label: string;
  relevance: number;
  size: number;
}

export interface Overview {
  concept_count: number;
  alignment_coverage: Record<string, number>;
  size_histogram: SizeHistogram;
  top_salient_concepts: TopSalientConcept[];
  class_distribution: Record<string, number>;
}

export interface ConceptAlignment {
  tagset: string;
  tag: string;
  score: number;
}

export interface ConceptRow {
  concept_id: number;
  label: string;
  size: number;
  alignment: ConceptAlignment | null;
  purity: number | null;
  dominant_class: string | null;
  relevance: number;
}

export interface ConceptList {
  items: ConceptRow[];
  total: number;
  page: number;
  per_page: number;
  sort_key: string;
  sort_order: string;
}

export interface MemberContext {
  before: string;
  word: string;
  after: string;
}

export interface ConceptMember {
  occurrence_id: number;
  sentence_id: number;
  position: number;
  surface: string;
  context: MemberContext;
}

export interface ConceptLabel {
  auto_label: string;
  user_label: string | null;
  display: string;
}

export interface ConceptAffinity {
  distribution: Record<string, number>;
  dominant_class: string | null;
  purity: number;
}

export interface ConceptDetail {
  concept_id: number;
  size: number;
  label: ConceptLabel;
  members: ConceptMember[];
  alignments: ConceptAlignment[];
  affinity: ConceptAffinity | null;
  relevance: number;
}

export interface SentenceRow {
  sentence_id: number;
  text: string;
  gold_label: string | null;
  predicted_class: string | null;
  has_attribution: boolean;
}

export interface SentenceList {
  items: SentenceRow[];
  total: number;
  page: number;
  per_page: number;
}

export interface WordSaliency {
  position: number;
  surface: string;
  /** Normalized per sentence to [-1, 1]; the top word has |score| = 1. */
  score: number;
}

export interface MatchedConcept {
  concept_id: number;
  label: string;
  trigger_positions: number[];
  contribution: number;
}

export interface Explanation {
  sentence_id: number;
  predicted_class: string;
  class_probabilities: Record<string, number>;
  word_saliencies: WordSaliency[];
  top_word: number;
  matched_concepts: MatchedConcept[];
}

export interface LabelUpdate {
  concept_id: number;
  auto_label: string;
  user_label: string | null;
  display: string;
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

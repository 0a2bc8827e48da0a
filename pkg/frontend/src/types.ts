// Wire types mirroring the service API responses.

export type SampleId = number | string;

export interface LayoutPoint {
  id: SampleId;
  x: number;
  y: number;
  label: string;
  coded_as?: string;
}

export interface DatasetInfo {
  id: string;
  kind: "text" | "image";
  versions?: string[];
  splits?: string[];
}

export interface LayoutInfo {
  id: string;
  points: number;
  final_kl: number | null;
  provenance: Record<string, unknown>;
}

export interface DocumentView {
  id: number;
  label: string;
  headers: [string, string][];
  body: string[];
  quote_flags: boolean[];
}

export interface CodeInfo {
  name: string;
  description: string;
  matches_category: boolean;
  created_at: number;
}

export interface AssignmentInfo {
  sample: SampleId;
  code: string;
  memo: string;
  ordinal: number;
}

export interface SessionView {
  id: string;
  dataset: string;
  label: string;
  strategy: Record<string, unknown>;
  queue: SampleId[];
  dequeued: SampleId[];
  codebook: CodeInfo[];
  assignments: AssignmentInfo[];
  summary: {
    codes: number;
    coded_samples: number;
    counts: Record<string, number>;
    category_fit: number;
  };
  saturation: { new_codes_in_window: number; saturated: boolean };
  ordinal: number;
}

export interface EventAck {
  ordinal: number;
  result: Record<string, unknown>;
}

export interface ApiErrorBody {
  status: number;
  code: string;
  message: string;
}

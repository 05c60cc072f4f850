/** Wire types mirrored from the HTTP service. */

export type LensSpec =
  | {
      type: "global_lens";
      dimension: string;
      n_segments: number;
      strategy: "regular" | "balanced";
      circular: boolean;
    }
  | {
      type: "global_mask" | "local_mask";
      dimensions: string[];
      metric: "euclidean" | "cosine" | "correlation";
      mask_neighbors: number;
    };

export interface DatasetInfo {
  dataset_id: string;
  columns: string[];
  n_rows: number;
}

export interface JobStatus {
  status: "pending" | "running" | "done" | "failed";
  progress: number;
  result_id: string | null;
  message: string | null;
}

export interface EmbeddingPayload {
  model_id: string;
  init_mode: string;
  points: [number, number][];
}

export interface EdgesPayload {
  n_edges: number;
  edges: [number, number][];
  weights: number[];
}

export interface HistoryEntry {
  model_id: string;
  spec: LensSpec | null;
  ready: boolean;
}

export interface ContrastFeature {
  name: string;
  d: number;
  p: number;
  significant: boolean;
}

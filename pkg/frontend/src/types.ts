// Shapes of the service responses, mirroring the JSON schema documents
// shipped with the engine. The UI renders these verbatim; it never derives
// scores or weights of its own.

export type WeightedMap = Record<string, number>;

export type RoleTarget = { instance: number } | { new_instance: WeightedMap } | null;

export interface Candidate {
  score: number;
  verbs: WeightedMap;
  roles: { subject: RoleTarget; object: RoleTarget };
  supporters: { vi: number; support: number }[];
}

export interface InstanceView {
  id: number;
  overlay: WeightedMap;
  salience: number;
  created_tick: number;
  last_referenced_tick: number;
}

export interface ViView {
  id: number;
  verbs: WeightedMap;
  subject: number;
  object: number | null;
  tick: number;
  story_id: number;
  provenance: "narrated" | "confabulated";
  salience: number;
}

export interface FocusResponse {
  instances: InstanceView[];
  vis: ViView[];
}

export interface ShadowResponse {
  owner: number;
  entries: { id: number; weight: number }[];
}

// Raw episodic records as served by /api/memory. Weighted maps appear as
// [name, weight] pairs in this view.
export interface MemoryRecord {
  type: "instance" | "vi";
  id: number;
  demoted: boolean;
  overlay?: [string, number][];
  verbs?: [string, number][];
  subject?: number;
  object?: number | null;
  tick?: number;
  story_id?: number;
  provenance?: "narrated" | "confabulated";
}

export interface MemoryResponse {
  records: MemoryRecord[];
}

export interface NarrateResponse {
  inserted: number[];
  diagnostics: unknown[];
}

export interface ConfabulateResponse {
  inserted: number[];
}

export interface ClozeResponse {
  candidates: Candidate[];
}

export interface HlsResponse {
  candidates: Candidate[];
}

export interface StateHashResponse {
  hash: string;
}

export interface ApiErrorBody {
  error: {
    code: string;
    message: string;
    location: { line: number | null; col: number | null } | null;
  };
  inserted?: number[];
}

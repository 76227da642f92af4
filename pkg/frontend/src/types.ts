/** Wire types exchanged with the workbench API. */

export interface GraphNode {
  id: string;
  kind: string;
  label: string;
  tooltip: Record<string, string>;
}

export interface GraphEdge {
  from: string;
  to: string;
}

export interface GraphJson {
  nodes: GraphNode[];
  edges: GraphEdge[];
  root: string | null;
  truncated: boolean;
}

export interface BlobRefJson {
  content_hash: string;
  size_bytes: number;
}

export interface DatasetJson {
  dataset_id: string;
  owner_entry: string;
  dataset_type: string;
  blob: BlobRefJson;
  original_filename: string;
  vendor: string;
  unified_metadata: Record<string, unknown> | null;
  preview: BlobRefJson | null;
  registered_at: string;
}

export interface ObjectJson {
  perm_id: string;
  type_name: string;
  properties: Record<string, unknown>;
  parents: string[];
  children: string[];
  space: string;
  registered_at: string;
  datasets?: string[];
}

export interface RawEntryJson {
  key: string;
  value: number | string;
  unit: string | null;
}

/** Response of a dry-run upload: extraction result without registration. */
export interface ParseResultJson {
  dry_run?: boolean;
  vendor: string;
  raw: { entries: RawEntryJson[] };
  unified: Record<string, unknown>;
  warnings: string[];
}

export interface VocabularyTermJson {
  code: string;
  label: string;
  description: string;
}

export interface VocabularyJson {
  name: string;
  terms: VocabularyTermJson[];
}

export type ParserChoice = "VendorA" | "VendorB" | "VendorC" | "none";

export type Direction = "up" | "down" | "both";

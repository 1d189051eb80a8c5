// Response shapes of the devrec HTTP API. The UI renders these fields
// verbatim; it never derives a score on its own.

export interface SearchRequestEcho {
  readonly q: string;
  readonly user: string | null;
  readonly k: number;
  readonly beta: number;
  readonly strict: boolean;
  readonly tau: number;
  readonly expand: boolean;
  readonly original_terms: string[];
  readonly expansion_terms: Record<string, number>;
}

export interface ResultRow {
  readonly rank: number;
  readonly artifact_id: string;
  readonly title: string;
  readonly kind: string;
  readonly url: string | null;
  readonly created_at: string | null;
  readonly final_score: number;
  readonly cosine: number;
  readonly interest_overlap: number;
  readonly matched_terms: string[];
  readonly concepts: string[];
  readonly best_interest?: string | null;
}

export interface SearchResponse {
  readonly request: SearchRequestEcho;
  readonly results: ResultRow[];
}

export interface RecommendResponse {
  readonly request: { user: string; k: number; cold_start: boolean };
  readonly results: ResultRow[];
}

export interface InterestEntry {
  readonly weight: number;
  readonly last_updated: string;
}

export interface ProfileResponse {
  readonly user_id: string;
  readonly personal: {
    age: number | null;
    location: string | null;
    job_title: string | null;
    years_experience: number | null;
    social_ids: string[];
  };
  readonly domain_of_interest: {
    dev_domains: string[];
    app_methods: string[];
    methodologies: string[];
    repo_hosts: string[];
    languages: string[];
    ides: string[];
  };
  readonly software_project: {
    requirements: string[];
    modeling: string[];
    paradigm: string[];
    frontend_tools: string[];
    backend_tools: string[];
  };
  readonly dev_environment: {
    infrastructure: string[];
    backend_servers: string[];
    testing_tools: string[];
    debugging_tools: string[];
  };
  readonly security: { pseudonymous: boolean; share_social: boolean };
  readonly interests: Record<string, InterestEntry>;
  readonly delivery: { default_k: number; strict_filter: boolean };
  readonly quality: { last_eval: Record<string, number> | null };
  readonly seen_artifacts: string[];
  readonly updated_at: string;
  readonly top_interests: { concept: string; weight: number }[];
}

export interface DecayResponse {
  readonly request: {
    user: string;
    now: string;
    half_life_days: number;
    dry_run: boolean;
  };
  readonly dry_run: boolean;
  readonly interests: Record<string, InterestEntry>;
}

export interface HealthResponse {
  readonly status: string;
  readonly indexed: number;
}

export interface FeedbackResponse {
  readonly request: { user: string; artifact: string; signal: string };
  readonly interests: Record<string, InterestEntry>;
}

export interface ApiError {
  readonly error: string;
  readonly detail: string;
}

export type FeedbackSignal = "relevant" | "not_relevant";

export interface SearchOptions {
  user?: string;
  k?: number;
  beta?: number;
  strict?: boolean;
  tau?: number;
  expand?: boolean;
}

// Typed JSON client for the steering service. Every displayed number in the
// UI originates from one of these responses; the front end never projects,
// solves or decodes anything locally.

export interface FeatureStats {
  name: string;
  mean: number;
  std: number;
  min: number;
  max: number;
}

export interface DatasetInfo {
  dataset_id: string;
  n: number;
  d: number;
  feature_names: string[];
  ids: string[];
  stats: FeatureStats[];
}

export interface PlaneBounds {
  xmin: number;
  xmax: number;
  ymin: number;
  ymax: number;
}

export interface ModelInfo {
  model_id: string;
  dataset_id: string;
  method: string;
  positions: [number, number][];
  plane_bounds: PlaneBounds;
}

export interface ScatterState {
  model_id: string;
  positions: [number, number][];
  touched: string[];
}

export interface ForwardResponse {
  point_id: string;
  position: [number, number];
  delta_y: [number, number];
}

export interface ConstraintViolation {
  feature: number;
  kind: "lock" | "lower" | "upper";
  value: number;
  limit: number;
}

export interface BackwardResponse {
  point_id: string;
  features: number[];
  position_feasible: boolean;
  residual: number;
  snapped_position: [number, number];
  violations: ConstraintViolation[];
}

export interface ProlineSample {
  feature_value: number;
  position: [number, number];
}

export interface ProlineJson {
  point_id: string;
  feature_index: number;
  feature_name: string;
  samples: ProlineSample[];
  mean_index: number;
  sigma_lo_index: number | null;
  sigma_hi_index: number | null;
  current_index: number;
  green_range: [number, number] | null;
  red_range: [number, number] | null;
}

export interface ProjectionMark {
  feature_index: number;
  direction: number;
  position: [number, number];
}

export interface ProlinesResponse {
  point_id: string;
  prolines: ProlineJson[];
  lengths: [number, number][];
  marks: ProjectionMark[];
}

export interface FeatureConstraint {
  locked?: boolean;
  lock_value?: number;
  lower?: number;
  upper?: number;
}

export type ConstraintDoc = Record<string, FeatureConstraint>;

export interface FeasibilityResponse {
  point_id: string;
  plane_bounds: PlaneBounds;
  resolution: [number, number];
  mask: boolean[][];
  residuals: number[][];
}

export interface KnnResponse {
  point_id: string;
  k: number;
  neighbors: { id: string; distance: number }[];
}

export interface PointStateResponse {
  point_id: string;
  touched: boolean;
  features: number[];
  position: [number, number];
  original_features: number[];
  original_position: [number, number];
  constraints: ConstraintDoc;
}

export interface ResetResponse {
  point_id: string;
  features: number[];
  position: [number, number];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: unknown,
  ) {
    super(message);
  }
}

/** Minimal transport seam so tests can swap HTTP for a scripted double. */
export interface Transport {
  request(method: string, path: string, body?: unknown): Promise<unknown>;
}

export class HttpTransport implements Transport {
  constructor(private baseUrl: string) {}

  async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      if (typeof body === "string") {
        init.body = body;
        init.headers = { "content-type": "text/csv" };
      } else {
        init.body = JSON.stringify(body);
        init.headers = { "content-type": "application/json" };
      }
    }
    const response = await fetch(this.baseUrl + path, init);
    if (response.status === 204) return null;
    const payload = await response.json();
    if (!response.ok) {
      const err = payload as { code?: string; message?: string; details?: unknown };
      throw new ApiError(
        response.status,
        err.code ?? "unknown",
        err.message ?? response.statusText,
        err.details ?? {},
      );
    }
    return payload;
  }
}

export class SteerClient {
  constructor(private transport: Transport) {}

  uploadDataset(csv: string, idColumn?: string): Promise<DatasetInfo> {
    const query = idColumn ? `?id_column=${encodeURIComponent(idColumn)}` : "";
    return this.transport.request("POST", `/datasets${query}`, csv) as Promise<DatasetInfo>;
  }

  dataset(datasetId: string): Promise<DatasetInfo & { values: number[][] }> {
    return this.transport.request("GET", `/datasets/${datasetId}`) as Promise<
      DatasetInfo & { values: number[][] }
    >;
  }

  fitModel(
    datasetId: string,
    method: "pca" | "autoencoder",
    options: Record<string, unknown> = {},
  ): Promise<ModelInfo> {
    return this.transport.request("POST", `/datasets/${datasetId}/models`, {
      method,
      ...options,
    }) as Promise<ModelInfo>;
  }

  scatter(modelId: string): Promise<ScatterState> {
    return this.transport.request("GET", `/models/${modelId}`) as Promise<ScatterState>;
  }

  forward(modelId: string, pointId: string, features: Record<string, number>): Promise<ForwardResponse> {
    return this.transport.request("POST", `/models/${modelId}/forward`, {
      point_id: pointId,
      features,
    }) as Promise<ForwardResponse>;
  }

  backward(
    modelId: string,
    pointId: string,
    target: [number, number],
    constrained = true,
  ): Promise<BackwardResponse> {
    return this.transport.request("POST", `/models/${modelId}/backward`, {
      point_id: pointId,
      target_position: target,
      constrained,
    }) as Promise<BackwardResponse>;
  }

  prolines(modelId: string, pointId: string, topK?: number, c?: number): Promise<ProlinesResponse> {
    const params = new URLSearchParams({ point_id: pointId });
    if (topK !== undefined) params.set("top_k", String(topK));
    if (c !== undefined) params.set("c", String(c));
    return this.transport.request(
      "GET",
      `/models/${modelId}/prolines?${params}`,
    ) as Promise<ProlinesResponse>;
  }

  putConstraints(modelId: string, pointId: string, constraints: ConstraintDoc): Promise<null> {
    return this.transport.request("PUT", `/models/${modelId}/constraints`, {
      point_id: pointId,
      constraints,
    }) as Promise<null>;
  }

  getConstraints(modelId: string, pointId: string): Promise<{ point_id: string; features: ConstraintDoc }> {
    return this.transport.request(
      "GET",
      `/models/${modelId}/constraints?point_id=${encodeURIComponent(pointId)}`,
    ) as Promise<{ point_id: string; features: ConstraintDoc }>;
  }

  feasibility(
    modelId: string,
    pointId: string,
    resolution?: [number, number],
  ): Promise<FeasibilityResponse> {
    const body: Record<string, unknown> = { point_id: pointId };
    if (resolution) body.resolution = resolution;
    return this.transport.request(
      "POST",
      `/models/${modelId}/feasibility`,
      body,
    ) as Promise<FeasibilityResponse>;
  }

  knn(modelId: string, pointId: string, k = 10): Promise<KnnResponse> {
    return this.transport.request(
      "GET",
      `/models/${modelId}/knn?point_id=${encodeURIComponent(pointId)}&k=${k}`,
    ) as Promise<KnnResponse>;
  }

  state(modelId: string, pointId: string): Promise<PointStateResponse> {
    return this.transport.request(
      "GET",
      `/models/${modelId}/state?point_id=${encodeURIComponent(pointId)}`,
    ) as Promise<PointStateResponse>;
  }

  reset(modelId: string, pointId: string): Promise<ResetResponse> {
    return this.transport.request("POST", `/models/${modelId}/reset`, {
      point_id: pointId,
    }) as Promise<ResetResponse>;
  }
}

// Wire types mirroring the scatteropt service JSON API.

export interface SamplerInfo {
    name: string;
    categories: string[];
}

export interface Capabilities {
    samplers: SamplerInfo[];
    rates: number[];
    point_areas: number[];
    opacities: number[];
    default_top_k: number;
    default_seed: number;
}

export interface DatasetInfo {
    id: string;
    name: string;
    n: number;
}

export interface RangePair {
    lo: number;
    hi: number;
}

export interface JobProgress {
    evaluated: number;
    total: number;
}

export interface JobView {
    id: string;
    dataset_id: string;
    state: "queued" | "running" | "done" | "failed";
    progress: JobProgress;
    error: string | null;
}

export interface PlotBar {
    count: number;
    t_min: number;
    t_max: number;
    saliency: number;
}

export interface ThresholdPlotDoc {
    bars: PlotBar[];
    domain_max: number;
    auc: number;
}

export interface DesignParamsDoc {
    sampler: string;
    rate: number;
    point_area: number;
    opacity: number;
    seed: number;
}

export interface RankedResult {
    params: DesignParamsDoc;
    score: { value: number; count: number };
    plot: ThresholdPlotDoc;
    timings?: { sample_ms: number; render_ms: number; topo_ms: number };
}

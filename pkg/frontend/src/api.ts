// Thin fetch client for the scatteropt service. Error bodies surface
// verbatim so the UI can show exactly what the server said.

import { Capabilities, DatasetInfo, JobView, RangePair, RankedResult } from "./types.js";

export class ApiError extends Error {
    constructor(public status: number, detail: string) {
        super(detail);
    }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
        resp = await fetch(path, init);
    } catch (err) {
        throw new ApiError(0, `server unreachable: ${String(err)}`);
    }
    if (!resp.ok) {
        let detail = `${resp.status} ${resp.statusText}`;
        try {
            const body = await resp.json();
            if (body && body.detail) detail = String(body.detail);
        } catch {
            // non-JSON error body; keep the status line
        }
        throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
}

export interface JobRequest {
    dataset_id: string;
    ranges: {
        rate: [number, number];
        point_area: [number, number];
        opacity: [number, number];
        clusters: [number, number] | null;
    };
    samplers: string[] | null;
    top_k: number;
    seed: number;
}

export class Api {
    capabilities(): Promise<Capabilities> {
        return request("/capabilities");
    }

    datasets(): Promise<DatasetInfo[]> {
        return request("/datasets");
    }

    async uploadDataset(file: File, xCol: string, yCol: string, name: string): Promise<{ dataset_id: string }> {
        const form = new FormData();
        form.append("file", file);
        form.append("x_col", xCol);
        form.append("y_col", yCol);
        form.append("name", name);
        return request("/datasets", { method: "POST", body: form });
    }

    submitJob(req: JobRequest): Promise<{ job_id: string }> {
        return request("/jobs", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(req),
        });
    }

    job(jobId: string): Promise<JobView> {
        return request(`/jobs/${jobId}`);
    }

    results(jobId: string): Promise<RankedResult[]> {
        return request(`/jobs/${jobId}/results`);
    }
}

export function jobRequest(
    datasetId: string,
    rate: RangePair,
    area: RangePair,
    opacity: RangePair,
    clusters: RangePair | null,
    samplers: string[] | null,
    topK: number,
    seed: number,
): JobRequest {
    return {
        dataset_id: datasetId,
        ranges: {
            rate: [rate.lo, rate.hi],
            point_area: [area.lo, area.hi],
            opacity: [opacity.lo, opacity.hi],
            clusters: clusters ? [clusters.lo, clusters.hi] : null,
        },
        samplers,
        top_k: topK,
        seed,
    };
}

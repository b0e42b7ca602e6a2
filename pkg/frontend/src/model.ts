// Pure view-model logic: everything the UI displays is derived here from
// server responses, never recomputed. Scores shown to 6 decimals, ordering
// exactly as served.

import {
    Capabilities,
    PlotBar,
    RangePair,
    RankedResult,
    ThresholdPlotDoc,
} from "./types.js";

export function formatScore(value: number): string {
    return value.toFixed(6);
}

export function formatParams(result: RankedResult): string {
    const p = result.params;
    const pct = (v: number) => `${Math.round(v * 100)}%`;
    return `${p.sampler} · rate ${pct(p.rate)} · area ${p.point_area}px² · opacity ${pct(p.opacity)}`;
}

export interface Card {
    rank: number;
    paramsLabel: string;
    scoreLabel: string;
    clusterCount: number;
    plot: ThresholdPlotDoc;
    imageUrl: string;
}

export function renderUrl(datasetId: string, result: RankedResult): string {
    const p = result.params;
    const q = new URLSearchParams({
        dataset: datasetId,
        sampler: p.sampler,
        rate: String(p.rate),
        point_area: String(p.point_area),
        opacity: String(p.opacity),
        seed: String(p.seed),
    });
    return `/render?${q.toString()}`;
}

/** Cards mirror the served results: same order, same numbers. */
export function buildCards(datasetId: string, results: RankedResult[]): Card[] {
    return results.map((r, i) => ({
        rank: i + 1,
        paramsLabel: formatParams(r),
        scoreLabel: formatScore(r.score.value),
        clusterCount: r.score.count,
        plot: r.plot,
        imageUrl: renderUrl(datasetId, r),
    }));
}

/** Clamp a requested [lo, hi] onto the server-advertised grid values. */
export function clampRange(grid: number[], lo: number, hi: number): RangePair {
    const inside = grid.filter((v) => v >= lo && v <= hi);
    if (inside.length === 0) {
        const nearest = grid.reduce((a, b) => (Math.abs(b - lo) < Math.abs(a - lo) ? b : a));
        return { lo: nearest, hi: nearest };
    }
    return { lo: inside[0], hi: inside[inside.length - 1] };
}

export function defaultRanges(caps: Capabilities) {
    return {
        rate: { lo: caps.rates[0], hi: caps.rates[caps.rates.length - 1] },
        point_area: { lo: caps.point_areas[0], hi: caps.point_areas[caps.point_areas.length - 1] },
        opacity: { lo: caps.opacities[0], hi: caps.opacities[caps.opacities.length - 1] },
    };
}

// ---------------------------------------------------------------------------
// Threshold-plot geometry: horizontal segments per bar, the saliency-maximal
// in-band bar highlighted, and the user's cluster range drawn as a band.
// ---------------------------------------------------------------------------

export interface Segment {
    bar: PlotBar;
    x0: number;
    x1: number;
    y: number;
    highlighted: boolean;
    inBand: boolean;
}

export interface PlotGeometry {
    segments: Segment[];
    band: { y0: number; y1: number } | null;
    maxCount: number;
}

/**
 * Lay bars out in unit coordinates (x: persistence 0..domain_max, y: count
 * scaled to the tallest bar). Highlighting matches the optimizer's rule:
 * longest bar wins, ties toward the smaller cluster count, and only bars
 * inside the cluster range qualify when one is set.
 */
export function plotGeometry(
    plot: ThresholdPlotDoc,
    clusterRange: RangePair | null = null,
): PlotGeometry {
    if (plot.bars.length === 0 || plot.domain_max <= 0) {
        return { segments: [], band: null, maxCount: 0 };
    }
    const maxCount = Math.max(...plot.bars.map((b) => b.count));
    const within = (b: PlotBar) =>
        clusterRange === null || (b.count >= clusterRange.lo && b.count <= clusterRange.hi);
    let best: PlotBar | null = null;
    for (const b of plot.bars) {
        if (!within(b)) continue;
        if (best === null || b.saliency > best.saliency || (b.saliency === best.saliency && b.count < best.count)) {
            best = b;
        }
    }
    const segments = plot.bars.map((bar) => ({
        bar,
        x0: bar.t_min / plot.domain_max,
        x1: bar.t_max / plot.domain_max,
        y: bar.count / maxCount,
        highlighted: bar === best,
        inBand: within(bar),
    }));
    const band =
        clusterRange === null
            ? null
            : {
                  y0: Math.min(clusterRange.lo, maxCount) / maxCount,
                  y1: Math.min(clusterRange.hi, maxCount) / maxCount,
              };
    return { segments, band, maxCount };
}

// ---------------------------------------------------------------------------
// Poll bookkeeping: one in-flight job per tab; stale responses are dropped.
// ---------------------------------------------------------------------------

export class PollGate {
    private activeJob: string | null = null;

    watch(jobId: string): void {
        this.activeJob = jobId;
    }

    /** True when a poll response for jobId should still be applied. */
    accepts(jobId: string): boolean {
        return this.activeJob === jobId;
    }

    stop(): void {
        this.activeJob = null;
    }
}

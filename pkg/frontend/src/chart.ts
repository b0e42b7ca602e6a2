// SVG step chart for threshold plots: one horizontal segment per bar, the
// winning bar emphasized, the cluster-count band drawn behind.

import { PlotGeometry } from "./model.js";

const W = 300;
const H = 150;
const PAD = 12;

function sx(u: number): number {
    return PAD + u * (W - 2 * PAD);
}

function sy(u: number): number {
    return H - PAD - u * (H - 2 * PAD);
}

export function chartSvg(geom: PlotGeometry): string {
    const parts: string[] = [
        `<svg viewBox="0 0 ${W} ${H}" xmlns="http://www.w3.org/2000/svg" class="threshold-chart">`,
    ];
    if (geom.band !== null) {
        const top = sy(geom.band.y1);
        const height = Math.max(2, sy(geom.band.y0) - top);
        parts.push(
            `<rect x="${PAD}" y="${top.toFixed(1)}" width="${W - 2 * PAD}" height="${height.toFixed(1)}" class="cluster-band"/>`,
        );
    }
    parts.push(
        `<line x1="${PAD}" y1="${sy(0)}" x2="${W - PAD}" y2="${sy(0)}" class="axis"/>`,
        `<line x1="${PAD}" y1="${sy(0)}" x2="${PAD}" y2="${sy(1)}" class="axis"/>`,
    );
    if (geom.segments.length === 0) {
        parts.push(`<text x="${W / 2}" y="${H / 2}" text-anchor="middle" class="empty">no clusters</text>`);
    }
    for (const seg of geom.segments) {
        const cls = seg.highlighted ? "bar best" : seg.inBand ? "bar" : "bar muted";
        parts.push(
            `<line x1="${sx(seg.x0).toFixed(1)}" y1="${sy(seg.y).toFixed(1)}" ` +
                `x2="${sx(seg.x1).toFixed(1)}" y2="${sy(seg.y).toFixed(1)}" class="${cls}">` +
                `<title>${seg.bar.count} clusters, saliency ${seg.bar.saliency.toFixed(6)}</title></line>`,
        );
    }
    parts.push("</svg>");
    return parts.join("");
}

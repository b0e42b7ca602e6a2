// DOM wiring for the optimizer UI: dataset picker, grid-bounded range
// sliders, job submission with polled progress, and ranked result cards.

import { Api, ApiError, jobRequest } from "./api.js";
import { chartSvg } from "./chart.js";
import { buildCards, clampRange, plotGeometry, PollGate } from "./model.js";
import { Capabilities, RangePair } from "./types.js";

const POLL_INTERVAL_MS = 1000;

interface SliderPair {
    lo: HTMLInputElement;
    hi: HTMLInputElement;
    grid: number[];
    label: HTMLElement;
    format: (v: number) => string;
}

export class App {
    private api = new Api();
    private caps: Capabilities | null = null;
    private gate = new PollGate();
    private sliders: Record<string, SliderPair> = {};

    constructor(private root: Document) {}

    async start(): Promise<void> {
        try {
            this.caps = await this.api.capabilities();
        } catch (err) {
            this.showError(err, () => this.start());
            return;
        }
        this.buildSliders(this.caps);
        this.buildSamplerChecklist(this.caps);
        await this.refreshDatasets();
        this.el("upload-form").addEventListener("submit", (e) => {
            e.preventDefault();
            void this.upload();
        });
        this.el("run").addEventListener("click", () => void this.submit());
    }

    private el(id: string): HTMLElement {
        const node = this.root.getElementById(id);
        if (!node) throw new Error(`missing element #${id}`);
        return node;
    }

    private showError(err: unknown, retry: (() => void) | null): void {
        const box = this.el("error");
        box.hidden = false;
        const detail = err instanceof ApiError ? err.message : String(err);
        box.textContent = detail;
        if (retry) {
            const btn = this.root.createElement("button");
            btn.textContent = "retry";
            btn.addEventListener("click", () => {
                box.hidden = true;
                retry();
            });
            box.append(" ", btn);
        }
    }

    private clearError(): void {
        this.el("error").hidden = true;
    }

    // ------------------------------------------------------------------ UI

    private buildSliders(caps: Capabilities): void {
        const pct = (v: number) => `${Math.round(v * 100)}%`;
        const defs: [string, number[], (v: number) => string][] = [
            ["rate", caps.rates, pct],
            ["point_area", caps.point_areas, (v) => `${v}px²`],
            ["opacity", caps.opacities, pct],
        ];
        for (const [name, grid, format] of defs) {
            const lo = this.el(`${name}-lo`) as HTMLInputElement;
            const hi = this.el(`${name}-hi`) as HTMLInputElement;
            for (const input of [lo, hi]) {
                input.min = "0";
                input.max = String(grid.length - 1);
                input.step = "1";
            }
            lo.value = "0";
            hi.value = String(grid.length - 1);
            const pair: SliderPair = { lo, hi, grid, label: this.el(`${name}-label`), format };
            this.sliders[name] = pair;
            const sync = () => this.syncSlider(pair);
            lo.addEventListener("input", sync);
            hi.addEventListener("input", sync);
            sync();
        }
    }

    private syncSlider(pair: SliderPair): void {
        let a = Number(pair.lo.value);
        let b = Number(pair.hi.value);
        if (a > b) [a, b] = [b, a];
        pair.label.textContent = `${pair.format(pair.grid[a])} – ${pair.format(pair.grid[b])}`;
    }

    private sliderRange(name: string): RangePair {
        const pair = this.sliders[name];
        const a = Number(pair.lo.value);
        const b = Number(pair.hi.value);
        const [lo, hi] = a <= b ? [a, b] : [b, a];
        return clampRange(pair.grid, pair.grid[lo], pair.grid[hi]);
    }

    private buildSamplerChecklist(caps: Capabilities): void {
        const list = this.el("samplers");
        for (const s of caps.samplers) {
            const label = this.root.createElement("label");
            const box = this.root.createElement("input");
            box.type = "checkbox";
            box.value = s.name;
            box.checked = true;
            label.append(box, ` ${s.name} `);
            label.title = s.categories.join(", ");
            list.append(label);
        }
    }

    private selectedSamplers(): string[] | null {
        const boxes = Array.from(this.el("samplers").querySelectorAll("input"));
        const picked = boxes.filter((b) => b.checked).map((b) => b.value);
        return picked.length === boxes.length ? null : picked;
    }

    private clusterRange(): RangePair | null {
        const lo = Number((this.el("clusters-lo") as HTMLInputElement).value);
        const hi = Number((this.el("clusters-hi") as HTMLInputElement).value);
        if (!lo && !hi) return null;
        return { lo: lo || 1, hi: hi || Math.max(lo, 1) };
    }

    private async refreshDatasets(): Promise<void> {
        const select = this.el("dataset") as HTMLSelectElement;
        const datasets = await this.api.datasets();
        select.innerHTML = "";
        for (const d of datasets) {
            const opt = this.root.createElement("option");
            opt.value = d.id;
            opt.textContent = `${d.name} (n=${d.n})`;
            select.append(opt);
        }
    }

    private async upload(): Promise<void> {
        this.clearError();
        const fileInput = this.el("csv-file") as HTMLInputElement;
        const file = fileInput.files && fileInput.files[0];
        if (!file) return;
        const col = (id: string) => (this.el(id) as HTMLInputElement).value || "x";
        try {
            await this.api.uploadDataset(file, col("x-col"), col("y-col"), file.name.replace(/\.csv$/, ""));
            await this.refreshDatasets();
        } catch (err) {
            this.showError(err, null);
        }
    }

    // ----------------------------------------------------------------- jobs

    private async submit(): Promise<void> {
        if (!this.caps) return;
        this.clearError();
        const datasetId = (this.el("dataset") as HTMLSelectElement).value;
        if (!datasetId) {
            this.showError(new Error("select a dataset first"), null);
            return;
        }
        const req = jobRequest(
            datasetId,
            this.sliderRange("rate"),
            this.sliderRange("point_area"),
            this.sliderRange("opacity"),
            this.clusterRange(),
            this.selectedSamplers(),
            this.caps.default_top_k,
            this.caps.default_seed,
        );
        try {
            const { job_id } = await this.api.submitJob(req);
            this.gate.watch(job_id);
            this.el("progress-wrap").hidden = false;
            this.el("cards").innerHTML = "";
            void this.poll(job_id, datasetId);
        } catch (err) {
            this.showError(err, () => void this.submit());
        }
    }

    private async poll(jobId: string, datasetId: string): Promise<void> {
        let job;
        try {
            job = await this.api.job(jobId);
        } catch (err) {
            if (this.gate.accepts(jobId)) this.showError(err, () => void this.poll(jobId, datasetId));
            return;
        }
        if (!this.gate.accepts(jobId)) return; // superseded by a newer submit
        const bar = this.el("progress") as HTMLProgressElement;
        bar.max = job.progress.total;
        bar.value = job.progress.evaluated;
        this.el("progress-text").textContent =
            `${job.state}: ${job.progress.evaluated}/${job.progress.total}`;
        if (job.state === "failed") {
            this.showError(new Error(job.error ?? "job failed"), null);
            return;
        }
        if (job.state !== "done") {
            setTimeout(() => void this.poll(jobId, datasetId), POLL_INTERVAL_MS);
            return;
        }
        const results = await this.api.results(jobId);
        if (!this.gate.accepts(jobId)) return;
        this.renderCards(datasetId, results);
    }

    private renderCards(datasetId: string, results: Parameters<typeof buildCards>[1]): void {
        const host = this.el("cards");
        host.innerHTML = "";
        const band = this.clusterRange();
        for (const card of buildCards(datasetId, results)) {
            const div = this.root.createElement("div");
            div.className = "card";
            div.innerHTML =
                `<h3>#${card.rank} · saliency ${card.scoreLabel}</h3>` +
                `<p class="params">${card.paramsLabel}</p>` +
                `<p class="clusters">${card.clusterCount} clusters</p>` +
                chartSvg(plotGeometry(card.plot, band)) +
                `<img src="${card.imageUrl}" alt="scatterplot for ${card.paramsLabel}" loading="lazy"/>`;
            host.append(div);
        }
    }
}

if (typeof document !== "undefined") {
    new App(document).start();
}

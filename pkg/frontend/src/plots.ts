/**
 * Figure builders over run artifacts: decay curves with fit overlays,
 * localization scatter + slab heatmaps, and the summary table.  All inputs
 * come from manifest-verified CSVs; nothing here recomputes physics beyond
 * plotting transforms.
 */

import fs from 'node:fs';
import path from 'node:path';

import { column, readTable, Table } from './csv.js';
import { FitEntry, LocalizationEntry, Manifest, RunEntry } from './manifest.js';
import { plotFrame, plotHeatmap, Series } from './svgplot.js';

export class ZeroSignalError extends Error {}

function seriesFile(run: RunEntry): string | undefined {
    return run.files.map((f) => f.path).find((p) => p.endsWith('_series.csv'));
}

/** Log-log decay curve with the fitted line and the predicted slope. */
export function decayFigure(run: RunEntry, dir: string, quantity: string,
                            fit?: FitEntry): string {
    const file = seriesFile(run);
    if (!file) throw new Error(`${run.name}: no series artifact`);
    const table = readTable(path.join(dir, file));
    const t = column(table, 't');
    const y = column(table, quantity);
    const positives = t.map((ti, i) => [ti, y[i]] as [number, number])
        .filter(([ti, yi]) => ti > 0 && isFinite(yi) && yi > 0);
    if (positives.length === 0) {
        throw new ZeroSignalError(`${run.name}/${quantity}: series has no positive values`);
    }
    const series: Series[] = [{
        x: positives.map((p) => p[0]),
        y: positives.map((p) => p[1]),
        label: quantity,
        color: '#1f77b4',
        kind: 'line',
    }];
    let title = `${run.name}: ${quantity}`;
    if (fit && isFinite(fit.measured)) {
        const [wlo, whi] = fit.window;
        const ts = positives.map((p) => p[0]).filter((ti) => ti >= wlo && ti <= whi);
        if (ts.length >= 2) {
            const c = Math.exp(fit.window ? 0 : 0);
            // anchor the fitted line at the first window sample
            const anchor = positives.find((p) => p[0] >= wlo)!;
            const fitY = ts.map((ti) => anchor[1] * (ti / anchor[0]) ** fit.measured);
            series.push({ x: ts, y: fitY, label: `fit ${fit.measured.toFixed(3)}`,
                          color: '#d62728', kind: 'line' });
            if (fit.predicted !== null && fit.predicted !== undefined) {
                const refY = ts.map((ti) => 1.3 * anchor[1] * (ti / anchor[0]) ** (fit.predicted as number));
                series.push({ x: ts, y: refY, label: `slope ${fit.predicted}`,
                              color: '#2ca02c', kind: 'line' });
                title += ` (predicted t^${fit.predicted})`;
            }
        }
    }
    return plotFrame(title, 't', quantity, series, true, true);
}

/** Scatter of the mass-peak location against sqrt(t). */
export function localizationScatter(run: RunEntry, dir: string): string {
    const file = seriesFile(run);
    if (!file) throw new Error(`${run.name}: no series artifact`);
    const table = readTable(path.join(dir, file));
    const t = column(table, 't');
    const xt = column(table, 'x_t');
    const pts = t.map((ti, i) => [Math.sqrt(ti), xt[i]] as [number, number])
        .filter(([s, x]) => isFinite(x) && s > 0);
    if (pts.length === 0) {
        throw new ZeroSignalError(`${run.name}: no localization samples`);
    }
    const series: Series[] = [{
        x: pts.map((p) => p[0]), y: pts.map((p) => p[1]),
        label: 'x_t', color: '#1f77b4', kind: 'dots',
    }];
    const smax = Math.max(...pts.map((p) => p[0]));
    const slope = pts[pts.length - 1][1] / pts[pts.length - 1][0];
    series.push({ x: [0, smax], y: [0, slope * smax],
                  label: `x_t = ${slope.toFixed(2)} sqrt(t)`,
                  color: '#d62728', kind: 'line' });
    return plotFrame(`${run.name}: peak location vs sqrt(t)`, 'sqrt(t)', 'x_t',
                     series, false, false);
}

/** Heatmap of the slab profile ratio f t / M(v) at one decade. */
export function slabHeatmap(run: RunEntry, dir: string, file: string): string {
    const table = readTable(path.join(dir, file));
    const xsAll = column(table, 'x');
    const vsAll = column(table, 'v');
    const ratio = column(table, 'ratio');
    const xs = [...new Set(xsAll)].sort((a, b) => a - b);
    const vs = [...new Set(vsAll)].sort((a, b) => a - b);
    const xIndex = new Map(xs.map((v, i) => [v, i]));
    const vIndex = new Map(vs.map((v, i) => [v, i]));
    const values = vs.map(() => xs.map(() => NaN));
    for (let r = 0; r < ratio.length; r++) {
        values[vIndex.get(vsAll[r])!][xIndex.get(xsAll[r])!] = ratio[r];
    }
    const decade = table.meta['decade'] ?? '?';
    return plotHeatmap(`${run.name}: f t / M(v) near the mass peak (t = ${decade})`,
                       { xs, vs, values }, 'x', 'v');
}

export interface FigureJob {
    filename: string;
    render: () => string;
}

/** Enumerate every figure a manifest can produce. */
export function figureJobs(manifest: Manifest, dir: string): FigureJob[] {
    const jobs: FigureJob[] = [];
    for (const run of manifest.runs) {
        if (run.status !== 'ok') continue;
        const hasSeries = seriesFile(run) !== undefined;
        for (const fit of run.fits) {
            if (!hasSeries) continue;
            if (!isFinite(fit.measured)) continue;
            jobs.push({
                filename: `${run.name}_${fit.quantity}.svg`,
                render: () => decayFigure(run, dir, fit.quantity, fit),
            });
        }
        const loc = run.extras?.localization as LocalizationEntry[] | undefined;
        if (loc && loc.length > 0 && hasSeries) {
            jobs.push({
                filename: `${run.name}_localization.svg`,
                render: () => localizationScatter(run, dir),
            });
        }
        for (const f of run.files) {
            if (/_slab_t\d+\.csv$/.test(f.path)) {
                const stem = f.path.replace(/\.csv$/, '');
                jobs.push({
                    filename: `${stem}_heatmap.svg`,
                    render: () => slabHeatmap(run, dir, f.path),
                });
            }
        }
    }
    return jobs;
}

/** Plain-text summary table of fits and localization constants. */
export function summaryTable(manifest: Manifest): string {
    const lines: string[] = [];
    for (const run of manifest.runs) {
        if (run.status !== 'ok') {
            lines.push(`${run.name}: FAILED (${run.error})`);
            continue;
        }
        for (const fit of run.fits) {
            const pred = fit.predicted === null ? '-' : String(fit.predicted);
            const verdict = fit.passed ? 'pass' : 'FAIL';
            lines.push(`${run.name} ${fit.quantity}: measured ${fit.measured.toFixed(4)} `
                + `predicted ${pred} [${verdict}]`);
        }
        const loc = run.extras?.localization as LocalizationEntry[] | undefined;
        if (loc) {
            for (const d of loc) {
                lines.push(`${run.name} t=${d.t.toFixed(0)}: `
                    + `window_mass*sqrt(t)=${d.window_mass_sqrt_t.toFixed(4)} `
                    + `x_t=${d.x_t.toFixed(2)} A=${d.ratio_A.toFixed(4)} B=${d.ratio_B.toFixed(4)}`);
            }
        }
    }
    return lines.join('\n') + '\n';
}

async function rasterize(svg: string): Promise<Buffer> {
    const { Resvg } = await import('@resvg/resvg-js');
    return new Resvg(svg, { fitTo: { mode: 'width', value: 1280 } })
        .render().asPng();
}

export async function writeFigures(manifest: Manifest, dir: string, outDir: string,
                                   format: 'svg' | 'png'): Promise<string[]> {
    fs.mkdirSync(outDir, { recursive: true });
    const written: string[] = [];
    for (const job of figureJobs(manifest, dir)) {
        const svg = job.render();
        if (format === 'png') {
            const target = path.join(outDir, job.filename.replace(/\.svg$/, '.png'));
            fs.writeFileSync(target, await rasterize(svg));
            written.push(target);
        } else {
            const target = path.join(outDir, job.filename);
            fs.writeFileSync(target, svg);
            written.push(target);
        }
    }
    const summary = path.join(outDir, 'summary.txt');
    fs.writeFileSync(summary, summaryTable(manifest));
    written.push(summary);
    return written;
}

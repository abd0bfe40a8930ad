/**
 * Minimal deterministic SVG plotting: log-log decay curves with overlay
 * lines, scatter plots, and cell heatmaps.  No timestamps or environment
 * data ever enter the output, so figures are byte-stable for fixed inputs.
 */

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 55 };

export interface Series {
    x: number[];
    y: number[];
    label: string;
    color: string;
    kind: 'line' | 'dots';
}

function fmt(v: number): string {
    if (!isFinite(v)) return 'nan';
    const a = Math.abs(v);
    if (a !== 0 && (a >= 1e4 || a < 1e-3)) return v.toExponential(2);
    return String(Number(v.toPrecision(5)));
}

function px(v: number): string {
    return String(Math.round(v * 100) / 100);
}

class Scale {
    constructor(readonly lo: number, readonly hi: number,
                readonly a: number, readonly b: number,
                readonly log: boolean) {}

    map(v: number): number {
        const t = this.log ? Math.log10(v) : v;
        const tlo = this.log ? Math.log10(this.lo) : this.lo;
        const thi = this.log ? Math.log10(this.hi) : this.hi;
        return this.a + ((t - tlo) / (thi - tlo)) * (this.b - this.a);
    }

    ticks(): number[] {
        if (this.log) {
            const lo = Math.ceil(Math.log10(this.lo));
            const hi = Math.floor(Math.log10(this.hi));
            const out: number[] = [];
            for (let d = lo; d <= hi; d++) out.push(10 ** d);
            return out.length >= 2 ? out : [this.lo, this.hi];
        }
        const out: number[] = [];
        for (let i = 0; i <= 5; i++) out.push(this.lo + ((this.hi - this.lo) * i) / 5);
        return out;
    }
}

function finitePositive(vals: number[], log: boolean): number[] {
    return vals.filter((v) => isFinite(v) && (!log || v > 0));
}

export function plotFrame(title: string, xlabel: string, ylabel: string,
                          series: Series[], logX: boolean, logY: boolean): string {
    const xs = series.flatMap((s) => finitePositive(s.x, logX));
    const ys = series.flatMap((s) => finitePositive(s.y, logY));
    if (xs.length === 0 || ys.length === 0) {
        throw new Error('zero signal: nothing to plot');
    }
    const pad = (lo: number, hi: number, log: boolean): [number, number] => {
        if (log) return [lo / 1.3, hi * 1.3];
        const d = (hi - lo) * 0.06 || 1;
        return [lo - d, hi + d];
    };
    const [xlo, xhi] = pad(Math.min(...xs), Math.max(...xs), logX);
    const [ylo, yhi] = pad(Math.min(...ys), Math.max(...ys), logY);
    const sx = new Scale(xlo, xhi, MARGIN.left, WIDTH - MARGIN.right, logX);
    const sy = new Scale(ylo, yhi, HEIGHT - MARGIN.bottom, MARGIN.top, logY);

    const parts: string[] = [];
    parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
    parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
    parts.push(`<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">${title}</text>`);

    for (const tx of sx.ticks()) {
        const X = sx.map(tx);
        parts.push(`<line x1="${px(X)}" y1="${MARGIN.top}" x2="${px(X)}" y2="${HEIGHT - MARGIN.bottom}" stroke="#dddddd"/>`);
        parts.push(`<text x="${px(X)}" y="${HEIGHT - MARGIN.bottom + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">${fmt(tx)}</text>`);
    }
    for (const ty of sy.ticks()) {
        const Y = sy.map(ty);
        parts.push(`<line x1="${MARGIN.left}" y1="${px(Y)}" x2="${WIDTH - MARGIN.right}" y2="${px(Y)}" stroke="#dddddd"/>`);
        parts.push(`<text x="${MARGIN.left - 6}" y="${px(Y + 4)}" text-anchor="end" font-family="sans-serif" font-size="11">${fmt(ty)}</text>`);
    }
    parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${WIDTH - MARGIN.left - MARGIN.right}" height="${HEIGHT - MARGIN.top - MARGIN.bottom}" fill="none" stroke="black"/>`);
    parts.push(`<text x="${WIDTH / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-family="sans-serif" font-size="13">${xlabel}</text>`);
    parts.push(`<text x="18" y="${HEIGHT / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 ${HEIGHT / 2})">${ylabel}</text>`);

    let legendY = MARGIN.top + 14;
    for (const s of series) {
        const pts: [number, number][] = [];
        for (let i = 0; i < s.x.length; i++) {
            const vx = s.x[i];
            const vy = s.y[i];
            if (!isFinite(vx) || !isFinite(vy)) continue;
            if ((logX && vx <= 0) || (logY && vy <= 0)) continue;
            pts.push([sx.map(vx), sy.map(vy)]);
        }
        if (pts.length === 0) continue;
        if (s.kind === 'line') {
            const d = pts.map((p, i) => `${i === 0 ? 'M' : 'L'}${px(p[0])} ${px(p[1])}`).join(' ');
            parts.push(`<path d="${d}" fill="none" stroke="${s.color}" stroke-width="1.6"/>`);
        } else {
            for (const p of pts) {
                parts.push(`<circle cx="${px(p[0])}" cy="${px(p[1])}" r="3" fill="${s.color}"/>`);
            }
        }
        parts.push(`<line x1="${WIDTH - 190}" y1="${legendY}" x2="${WIDTH - 165}" y2="${legendY}" stroke="${s.color}" stroke-width="2"/>`);
        parts.push(`<text x="${WIDTH - 160}" y="${legendY + 4}" font-family="sans-serif" font-size="11">${s.label}</text>`);
        legendY += 16;
    }
    parts.push('</svg>');
    return parts.join('\n') + '\n';
}

/** Piecewise-linear dark-blue -> yellow colour map on [0, 1]. */
export function heatColor(u: number): string {
    const t = Math.max(0, Math.min(1, u));
    const stops: [number, number, number][] = [
        [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
    ];
    const pos = t * (stops.length - 1);
    const i = Math.min(Math.floor(pos), stops.length - 2);
    const f = pos - i;
    const c = stops[i].map((v, k) => Math.round(v + f * (stops[i + 1][k] - v)));
    return `rgb(${c[0]},${c[1]},${c[2]})`;
}

export interface HeatmapData {
    xs: number[];       // sorted unique cell coordinates
    vs: number[];
    values: number[][]; // [v index][x index]
}

export function plotHeatmap(title: string, data: HeatmapData,
                            xlabel: string, ylabel: string): string {
    const { xs, vs, values } = data;
    if (xs.length === 0 || vs.length === 0) {
        throw new Error('zero signal: empty heatmap');
    }
    const flat = values.flat().filter((v) => isFinite(v));
    const lo = Math.min(...flat);
    const hi = Math.max(...flat);
    const span = hi - lo || 1;
    const plotW = WIDTH - MARGIN.left - MARGIN.right - 60;
    const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
    const cw = plotW / xs.length;
    const ch = plotH / vs.length;
    const parts: string[] = [];
    parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
    parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
    parts.push(`<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">${title}</text>`);
    for (let j = 0; j < vs.length; j++) {
        for (let i = 0; i < xs.length; i++) {
            const v = values[j][i];
            const color = isFinite(v) ? heatColor((v - lo) / span) : '#eeeeee';
            const X = MARGIN.left + i * cw;
            const Y = HEIGHT - MARGIN.bottom - (j + 1) * ch;
            parts.push(`<rect x="${px(X)}" y="${px(Y)}" width="${px(cw + 0.5)}" height="${px(ch + 0.5)}" fill="${color}"/>`);
        }
    }
    parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="black"/>`);
    parts.push(`<text x="${MARGIN.left}" y="${HEIGHT - MARGIN.bottom + 18}" font-family="sans-serif" font-size="11">${fmt(xs[0])}</text>`);
    parts.push(`<text x="${MARGIN.left + plotW}" y="${HEIGHT - MARGIN.bottom + 18}" text-anchor="end" font-family="sans-serif" font-size="11">${fmt(xs[xs.length - 1])}</text>`);
    parts.push(`<text x="${MARGIN.left - 6}" y="${HEIGHT - MARGIN.bottom}" text-anchor="end" font-family="sans-serif" font-size="11">${fmt(vs[0])}</text>`);
    parts.push(`<text x="${MARGIN.left - 6}" y="${MARGIN.top + 10}" text-anchor="end" font-family="sans-serif" font-size="11">${fmt(vs[vs.length - 1])}</text>`);
    parts.push(`<text x="${WIDTH / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-family="sans-serif" font-size="13">${xlabel}</text>`);
    parts.push(`<text x="18" y="${HEIGHT / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 ${HEIGHT / 2})">${ylabel}</text>`);
    // colour bar
    const barX = WIDTH - MARGIN.right - 40;
    for (let k = 0; k < 50; k++) {
        const Y = HEIGHT - MARGIN.bottom - ((k + 1) * plotH) / 50;
        parts.push(`<rect x="${barX}" y="${px(Y)}" width="16" height="${px(plotH / 50 + 0.5)}" fill="${heatColor(k / 49)}"/>`);
    }
    parts.push(`<text x="${barX + 20}" y="${HEIGHT - MARGIN.bottom}" font-family="sans-serif" font-size="10">${fmt(lo)}</text>`);
    parts.push(`<text x="${barX + 20}" y="${MARGIN.top + 10}" font-family="sans-serif" font-size="10">${fmt(hi)}</text>`);
    parts.push('</svg>');
    return parts.join('\n') + '\n';
}

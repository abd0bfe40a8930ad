/**
 * Reader for the kinlab CSV layout: one `# kinlab-csv-v1 ...` comment line
 * carrying run metadata, a header row, then numeric rows (`nan` allowed).
 */

import fs from 'node:fs';

export interface Table {
    meta: Record<string, string>;
    columns: string[];
    rows: number[][];
}

export function parseCsv(text: string): Table {
    const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
    if (lines.length < 2 || !lines[0].startsWith('#')) {
        throw new Error('not a kinlab csv: missing schema comment line');
    }
    const meta: Record<string, string> = {};
    for (const tok of lines[0].slice(1).trim().split(/\s+/)) {
        const eq = tok.indexOf('=');
        if (eq > 0) meta[tok.slice(0, eq)] = tok.slice(eq + 1);
        else meta[tok] = '';
    }
    const columns = lines[1].split(',').map((c) => c.trim());
    const rows: number[][] = [];
    for (const line of lines.slice(2)) {
        const parts = line.split(',');
        if (parts.length !== columns.length) {
            throw new Error(`row has ${parts.length} fields, expected ${columns.length}`);
        }
        rows.push(parts.map((p) => Number(p)));
    }
    return { meta, columns, rows };
}

export function readTable(path: string): Table {
    return parseCsv(fs.readFileSync(path, 'utf-8'));
}

export class MissingColumnError extends Error {}

/** Extract one column by name; the error names what is available. */
export function column(table: Table, name: string): number[] {
    const idx = table.columns.indexOf(name);
    if (idx < 0) {
        throw new MissingColumnError(
            `no column '${name}'; available: ${table.columns.join(', ')}`);
    }
    return table.rows.map((r) => r[idx]);
}

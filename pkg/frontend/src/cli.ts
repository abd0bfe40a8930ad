#!/usr/bin/env node
/**
 * report-plots <manifest.json> [--out DIR] [--format png|svg]
 *
 * Verifies the manifest checksums, regenerates every figure it describes
 * (decay curves with fit overlays, localization scatter, slab heatmaps)
 * and writes the summary table.  Refuses corrupted or incomplete run
 * directories outright.
 */

import { ChecksumError, loadManifest } from './manifest.js';
import { writeFigures } from './plots.js';

function usage(): never {
    console.error('usage: report-plots <manifest.json> [--out DIR] [--format png|svg]');
    process.exit(2);
}

export async function main(argv: string[]): Promise<number> {
    let manifestPath = '';
    let outDir = 'figures';
    let format: 'svg' | 'png' = 'svg';
    for (let i = 0; i < argv.length; i++) {
        const arg = argv[i];
        if (arg === '--out') {
            outDir = argv[++i] ?? usage();
        } else if (arg === '--format') {
            const val = argv[++i];
            if (val !== 'svg' && val !== 'png') usage();
            format = val;
        } else if (arg.startsWith('-')) {
            usage();
        } else if (!manifestPath) {
            manifestPath = arg;
        } else {
            usage();
        }
    }
    if (!manifestPath) usage();

    try {
        const { manifest, dir } = loadManifest(manifestPath);
        const written = await writeFigures(manifest, dir, outDir, format);
        for (const w of written) console.log(w);
        return 0;
    } catch (err) {
        if (err instanceof ChecksumError) {
            console.error(`refusing manifest: ${err.message}`);
            return 1;
        }
        console.error(`error: ${(err as Error).message}`);
        return 1;
    }
}

const invokedDirectly = process.argv[1] !== undefined
    && import.meta.url.endsWith(process.argv[1].split('/').pop() as string);
if (invokedDirectly) {
    main(process.argv.slice(2)).then((code) => process.exit(code));
}

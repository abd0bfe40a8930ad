/**
 * Manifest loading with checksum verification.
 *
 * A run directory is only trusted if every file listed in manifest.json
 * hashes to its recorded sha256; a single flipped bit anywhere makes the
 * loader refuse the whole manifest.
 */

import { createHash } from 'node:crypto';
import fs from 'node:fs';
import path from 'node:path';

export interface FitEntry {
    quantity: string;
    predicted: number | null;
    tolerance: number | null;
    measured: number;
    stderr: number;
    window: [number, number];
    passed: boolean;
}

export interface LocalizationEntry {
    t: number;
    window: [number, number];
    window_mass_sqrt_t: number;
    x_t: number;
    ratio_A: number;
    ratio_B: number;
    profile_exponent: number;
}

export interface RunEntry {
    name: string;
    kind: string;
    status: string;
    error: string;
    files: { path: string; sha256: string }[];
    fits: FitEntry[];
    extras: { localization?: LocalizationEntry[]; [key: string]: unknown };
}

export interface Manifest {
    schema: string;
    seed: number;
    runs: RunEntry[];
}

export class ChecksumError extends Error {}

export function sha256Of(filePath: string): string {
    const hash = createHash('sha256');
    hash.update(fs.readFileSync(filePath));
    return hash.digest('hex');
}

/** Load a manifest and verify every referenced file's checksum. */
export function loadManifest(manifestPath: string): { manifest: Manifest; dir: string } {
    const dir = path.dirname(path.resolve(manifestPath));
    const manifest = JSON.parse(fs.readFileSync(manifestPath, 'utf-8')) as Manifest;
    if (!manifest.schema || !manifest.schema.startsWith('kinlab-manifest')) {
        throw new Error(`not a kinlab manifest: ${manifestPath}`);
    }
    for (const run of manifest.runs) {
        for (const file of run.files) {
            const p = path.join(dir, file.path);
            if (!fs.existsSync(p)) {
                throw new ChecksumError(`${run.name}: missing artifact ${file.path}`);
            }
            const actual = sha256Of(p);
            if (actual !== file.sha256) {
                throw new ChecksumError(
                    `${run.name}: checksum mismatch for ${file.path} ` +
                    `(expected ${file.sha256.slice(0, 12)}..., got ${actual.slice(0, 12)}...)`);
            }
        }
    }
    return { manifest, dir };
}

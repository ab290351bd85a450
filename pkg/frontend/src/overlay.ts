import type { WireframePayload } from './types';

/**
 * Drawable line segments for one object. The coordinates are taken verbatim
 * from a /project response — this module does no projection arithmetic, it
 * only filters edges whose endpoints the server marked as behind the camera.
 */
export interface Overlay {
    /** Raw /project response body, kept for parity auditing. */
    raw: string;
    segments: { from: [number, number]; to: [number, number] }[];
    hidden: boolean;
    warning: string | null;
}

export function buildOverlay(raw: string, wf: WireframePayload): Overlay {
    if (wf.behind.length > 0) {
        return {
            raw,
            segments: [],
            hidden: true,
            warning: `${wf.behind.length} vertices behind the camera`,
        };
    }
    const segments = wf.edges.map(([i, j]) => {
        const from = wf.vertices_px[i];
        const to = wf.vertices_px[j];
        if (from === null || to === null) {
            throw new Error('edge endpoint missing from projection');
        }
        return { from, to };
    });
    return { raw, segments, hidden: false, warning: null };
}

import { describe, expect, it } from 'vitest';

import { ApiError, type ApiClient, type ProjectResult } from '../src/api';
import { Editor } from '../src/editor';
import type { AnnotationFile, Camera, ModelEntry, Pose, SceneResponse, Vec3 } from '../src/types';

const CAMERA: Camera = { f: 800, cx: 512, cy: 256, width: 1024, height: 512 };

function makeAnnotation(): AnnotationFile {
    return {
        version: 1,
        image: 'images/000001.png',
        camera: { ...CAMERA },
        objects: [
            {
                model_id: 'cube',
                class: 'Car',
                translation: [0.5, -0.2, 12],
                rotation_euler: [0.1, 0.7, -0.2],
            },
        ],
    };
}

/** In-memory service double; records calls and fabricates projections. */
class FakeApi {
    annotation = makeAnnotation();
    putCalls: AnnotationFile[] = [];
    projectCalls: Pose[] = [];
    failPutWith: ApiError | null = null;
    behindCount = 0;

    async getScene(frameId: string): Promise<SceneResponse> {
        return {
            frame_id: frameId,
            annotation: JSON.parse(JSON.stringify(this.annotation)),
            image_url: '/images/000001.png',
        };
    }

    async listModels(): Promise<ModelEntry[]> {
        return [{ id: 'cube', class: 'Car', mesh: 'cube.obj', scale: [1, 1, 1] }];
    }

    async putAnnotations(_frameId: string, annotation: AnnotationFile): Promise<void> {
        if (this.failPutWith) throw this.failPutWith;
        this.putCalls.push(JSON.parse(JSON.stringify(annotation)));
    }

    async project(_modelId: string, _scale: Vec3, pose: Pose, _camera: Camera): Promise<ProjectResult> {
        this.projectCalls.push(JSON.parse(JSON.stringify(pose)));
        const wireframe = {
            vertices_px: [
                [100, 100] as [number, number],
                [200, 100] as [number, number],
            ],
            edges: [[0, 1] as [number, number]],
            behind: Array.from({ length: this.behindCount }, (_, i) => i),
        };
        return { raw: JSON.stringify(wireframe), wireframe };
    }
}

function makeEditor(api = new FakeApi()): { editor: Editor; api: FakeApi } {
    return { editor: new Editor(api as unknown as ApiClient), api };
}

describe('loading', () => {
    it('loads a frame with one overlay per object and selects the first', async () => {
        const { editor } = makeEditor();
        await editor.loadFrame('000001');
        expect(editor.frameId).toBe('000001');
        expect(editor.overlays).toHaveLength(1);
        expect(editor.selected).toBe(0);
        expect(editor.dirty).toBe(false);
    });

    it('leaves nothing selected on an empty frame', async () => {
        const api = new FakeApi();
        api.annotation.objects = [];
        const { editor } = makeEditor(api);
        await editor.loadFrame('000001');
        expect(editor.selected).toBe(-1);
        expect(editor.overlays).toHaveLength(0);
    });
});

describe('nudging', () => {
    it('applies exact step-size arithmetic per axis', async () => {
        const { editor } = makeEditor();
        await editor.loadFrame('000001');
        await editor.nudge('tx', 1);
        await editor.nudge('rz', -1);
        const obj = editor.selectedObject();
        expect(obj.translation[0]).toBe(0.5 + 0.05);
        expect(obj.rotation_euler[2]).toBe(-0.2 - 0.01);
        expect(editor.dirty).toBe(true);
    });

    it('returns to the start pose after inverse nudges', async () => {
        const { editor } = makeEditor();
        await editor.loadFrame('000001');
        const start = JSON.parse(JSON.stringify(editor.selectedObject()));
        const axes = ['tx', 'ty', 'tz', 'rx', 'ry', 'rz'] as const;
        for (const axis of axes) await editor.nudge(axis, 1);
        for (const axis of [...axes].reverse()) await editor.nudge(axis, -1);
        const obj = editor.selectedObject();
        for (let i = 0; i < 3; i++) {
            expect(Math.abs(obj.translation[i] - start.translation[i])).toBeLessThan(1e-9);
            expect(Math.abs(obj.rotation_euler[i] - start.rotation_euler[i])).toBeLessThan(1e-9);
        }
    });

    it('re-requests the projection with the candidate pose', async () => {
        const { editor, api } = makeEditor();
        await editor.loadFrame('000001');
        await editor.nudge('ty', 1);
        const last = api.projectCalls[api.projectCalls.length - 1];
        expect(last.translation[1]).toBe(-0.2 + 0.05);
    });

    it('hides the overlay with a warning when vertices fall behind the camera', async () => {
        const { editor, api } = makeEditor();
        await editor.loadFrame('000001');
        api.behindCount = 3;
        await editor.nudge('tz', -1);
        const overlay = editor.overlays[0];
        expect(overlay?.hidden).toBe(true);
        expect(overlay?.warning).toContain('3 vertices');
        // Pose stays editable after the warning.
        await editor.nudge('tz', 1);
    });

    it('scales step sizes by exactly 10 in both directions', async () => {
        const { editor } = makeEditor();
        editor.scaleStep('t', 'up');
        expect(editor.stepT).toBe(0.5);
        editor.scaleStep('t', 'down');
        editor.scaleStep('t', 'down');
        expect(editor.stepT).toBeCloseTo(0.005, 15);
        editor.scaleStep('r', 'up');
        expect(editor.stepR).toBeCloseTo(0.1, 15);
    });
});

describe('overlay provenance', () => {
    it('draws only coordinates taken verbatim from the projection response', async () => {
        const { editor } = makeEditor();
        await editor.loadFrame('000001');
        const overlay = editor.overlays[0]!;
        const response = JSON.parse(overlay.raw);
        for (const segment of overlay.segments) {
            expect(response.vertices_px).toContainEqual(segment.from);
            expect(response.vertices_px).toContainEqual(segment.to);
        }
    });
});

describe('saving', () => {
    it('clears the dirty flag on success', async () => {
        const { editor, api } = makeEditor();
        await editor.loadFrame('000001');
        await editor.nudge('tx', 1);
        expect(await editor.save()).toBe(true);
        expect(editor.dirty).toBe(false);
        expect(api.putCalls).toHaveLength(1);
        expect(api.putCalls[0].objects[0].translation[0]).toBe(0.55);
    });

    it('keeps the dirty state and surfaces the error on failure', async () => {
        const api = new FakeApi();
        api.failPutWith = new ApiError(403, 'service is read-only');
        const { editor } = makeEditor(api);
        await editor.loadFrame('000001');
        await editor.nudge('tx', 1);
        expect(await editor.save()).toBe(false);
        expect(editor.dirty).toBe(true);
        expect(editor.lastError).toContain('read-only');
        expect(editor.selectedObject().translation[0]).toBe(0.55);
    });
});

describe('object management', () => {
    it('adds an object on the optical axis at depth f / width', async () => {
        const { editor } = makeEditor();
        await editor.loadFrame('000001');
        await editor.addObject('cube');
        expect(editor.selected).toBe(1);
        const obj = editor.selectedObject();
        expect(obj.translation).toEqual([0, 0, CAMERA.f / CAMERA.width]);
        expect(obj.rotation_euler).toEqual([0, 0, 0]);
        expect(editor.dirty).toBe(true);
    });

    it('deletes an object together with its overlay', async () => {
        const { editor } = makeEditor();
        await editor.loadFrame('000001');
        editor.deleteObject(0);
        expect(editor.annotation?.objects).toHaveLength(0);
        expect(editor.overlays).toHaveLength(0);
        expect(editor.selected).toBe(-1);
        expect(editor.dirty).toBe(true);
    });

    it('rejects unknown model ids', async () => {
        const { editor } = makeEditor();
        await editor.loadFrame('000001');
        await expect(editor.addObject('ghost')).rejects.toThrow('unknown model');
    });
});

describe('navigation guard', () => {
    it('allows navigation when clean without asking', async () => {
        const { editor } = makeEditor();
        await editor.loadFrame('000001');
        expect(editor.canNavigate(() => false)).toBe(true);
    });

    it('requires confirmation when dirty', async () => {
        const { editor } = makeEditor();
        await editor.loadFrame('000001');
        await editor.nudge('tx', 1);
        expect(editor.canNavigate(() => false)).toBe(false);
        expect(editor.canNavigate(() => true)).toBe(true);
    });
});

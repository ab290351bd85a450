import { ApiClient, ApiError } from './api';
import { buildOverlay, type Overlay } from './overlay';
import type { AnnotationFile, ModelEntry, NudgeAxis, SceneResponse, Vec3 } from './types';

const DEFAULT_STEP_T = 0.05; // meters
const DEFAULT_STEP_R = 0.01; // radians
const STEP_FACTOR = 10;

const AXIS_INDEX: Record<NudgeAxis, { field: 'translation' | 'rotation_euler'; index: number }> = {
    tx: { field: 'translation', index: 0 },
    ty: { field: 'translation', index: 1 },
    tz: { field: 'translation', index: 2 },
    rx: { field: 'rotation_euler', index: 0 },
    ry: { field: 'rotation_euler', index: 1 },
    rz: { field: 'rotation_euler', index: 2 },
};

/**
 * Pose-editing state machine behind the labeling view. Holds the frame's
 * annotation, the selected object's candidate pose, and one server-produced
 * overlay per object. All geometry comes from the service; nudges are exact
 * step-size arithmetic on the candidate pose.
 */
export class Editor {
    frameId: string | null = null;
    annotation: AnnotationFile | null = null;
    imageUrl: string | null = null;
    selected = -1;
    stepT = DEFAULT_STEP_T;
    stepR = DEFAULT_STEP_R;
    overlays: (Overlay | null)[] = [];
    lastError: string | null = null;

    private savedSnapshot = '';
    private models: ModelEntry[] = [];

    constructor(private api: ApiClient) {}

    get dirty(): boolean {
        if (this.annotation === null) return false;
        return JSON.stringify(this.annotation) !== this.savedSnapshot;
    }

    async loadFrame(frameId: string): Promise<void> {
        const scene: SceneResponse = await this.api.getScene(frameId);
        this.models = await this.api.listModels();
        this.frameId = scene.frame_id;
        this.annotation = scene.annotation;
        this.imageUrl = scene.image_url;
        this.selected = scene.annotation.objects.length > 0 ? 0 : -1;
        this.savedSnapshot = JSON.stringify(scene.annotation);
        this.lastError = null;
        this.overlays = [];
        for (let i = 0; i < scene.annotation.objects.length; i++) {
            this.overlays.push(await this.projectObject(i));
        }
    }

    select(index: number): void {
        const n = this.annotation?.objects.length ?? 0;
        if (index < 0 || index >= n) {
            throw new Error(`object index ${index} out of range`);
        }
        this.selected = index;
    }

    async nudge(axis: NudgeAxis, direction: 1 | -1): Promise<void> {
        const obj = this.selectedObject();
        const { field, index } = AXIS_INDEX[axis];
        const step = field === 'translation' ? this.stepT : this.stepR;
        obj[field][index] += direction * step;
        this.overlays[this.selected] = await this.projectObject(this.selected);
    }

    scaleStep(kind: 't' | 'r', factor: 'up' | 'down'): void {
        const apply = (step: number) => (factor === 'up' ? step * STEP_FACTOR : step / STEP_FACTOR);
        if (kind === 't') this.stepT = apply(this.stepT);
        else this.stepR = apply(this.stepR);
    }

    async addObject(modelId: string): Promise<void> {
        const annotation = this.requireFrame();
        const model = this.models.find((m) => m.id === modelId);
        if (model === undefined) {
            throw new Error(`unknown model ${modelId}`);
        }
        // Scene-center default: on the optical axis at depth d = f / width.
        const depth = annotation.camera.f / annotation.camera.width;
        annotation.objects.push({
            model_id: model.id,
            class: model.class,
            translation: [0, 0, depth],
            rotation_euler: [0, 0, 0],
        });
        this.selected = annotation.objects.length - 1;
        this.overlays.push(await this.projectObject(this.selected));
    }

    deleteObject(index: number): void {
        const annotation = this.requireFrame();
        if (index < 0 || index >= annotation.objects.length) {
            throw new Error(`object index ${index} out of range`);
        }
        annotation.objects.splice(index, 1);
        this.overlays.splice(index, 1);
        if (this.selected >= annotation.objects.length) {
            this.selected = annotation.objects.length - 1;
        }
    }

    async save(): Promise<boolean> {
        const annotation = this.requireFrame();
        try {
            await this.api.putAnnotations(this.frameId!, annotation);
        } catch (err) {
            // Keep the dirty state; the candidate pose must survive a failure.
            this.lastError = err instanceof ApiError ? err.message : String(err);
            return false;
        }
        this.savedSnapshot = JSON.stringify(annotation);
        this.lastError = null;
        return true;
    }

    /** Unsaved-changes guard: leaving a dirty frame needs confirmation. */
    canNavigate(confirm: () => boolean): boolean {
        return !this.dirty || confirm();
    }

    selectedObject() {
        const annotation = this.requireFrame();
        if (this.selected < 0 || this.selected >= annotation.objects.length) {
            throw new Error('no object selected');
        }
        return annotation.objects[this.selected];
    }

    private requireFrame(): AnnotationFile {
        if (this.annotation === null) {
            throw new Error('no frame loaded');
        }
        return this.annotation;
    }

    private async projectObject(index: number): Promise<Overlay | null> {
        const annotation = this.requireFrame();
        const obj = annotation.objects[index];
        const model = this.models.find((m) => m.id === obj.model_id);
        if (model === undefined) {
            this.lastError = `unknown model ${obj.model_id}`;
            return null;
        }
        const scale: Vec3 = model.scale;
        const result = await this.api.project(
            obj.model_id,
            scale,
            { translation: obj.translation, rotation_euler: obj.rotation_euler },
            annotation.camera
        );
        return buildOverlay(result.raw, result.wireframe);
    }
}

import type {
    AnnotationFile,
    Camera,
    ModelEntry,
    Pose,
    SceneResponse,
    SolveReportPayload,
    Vec3,
    WireframePayload,
} from './types';

export class ApiError extends Error {
    constructor(
        public status: number,
        message: string
    ) {
        super(message);
    }
}

/** A /project result keeping the raw body so callers can assert byte parity. */
export interface ProjectResult {
    raw: string;
    wireframe: WireframePayload;
}

async function readError(response: Response): Promise<string> {
    try {
        const body = await response.json();
        return typeof body.error === 'string' ? body.error : response.statusText;
    } catch {
        return response.statusText;
    }
}

export class ApiClient {
    constructor(private baseUrl: string) {}

    private async getJson<T>(path: string): Promise<T> {
        const response = await fetch(`${this.baseUrl}${path}`);
        if (!response.ok) {
            throw new ApiError(response.status, await readError(response));
        }
        return response.json() as Promise<T>;
    }

    async listScenes(): Promise<string[]> {
        const body = await this.getJson<{ scenes: string[] }>('/scenes');
        return body.scenes;
    }

    getScene(frameId: string): Promise<SceneResponse> {
        return this.getJson<SceneResponse>(`/scenes/${encodeURIComponent(frameId)}`);
    }

    async listModels(): Promise<ModelEntry[]> {
        const body = await this.getJson<{ models: ModelEntry[] }>('/models');
        return body.models;
    }

    async putAnnotations(frameId: string, annotation: AnnotationFile): Promise<void> {
        const response = await fetch(
            `${this.baseUrl}/scenes/${encodeURIComponent(frameId)}/annotations`,
            {
                method: 'PUT',
                headers: { 'Content-Type': 'application/json' },
                body: JSON.stringify(annotation),
            }
        );
        if (!response.ok) {
            throw new ApiError(response.status, await readError(response));
        }
    }

    /**
     * All projection math lives on the server; the raw response text is kept
     * verbatim so the overlay can be audited against it byte-for-byte.
     */
    async project(modelId: string, scale: Vec3, pose: Pose, camera: Camera): Promise<ProjectResult> {
        const response = await fetch(`${this.baseUrl}/project`, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({ model_id: modelId, scale, pose, camera }),
        });
        if (!response.ok) {
            throw new ApiError(response.status, await readError(response));
        }
        const raw = await response.text();
        return { raw, wireframe: JSON.parse(raw) as WireframePayload };
    }

    async solve(
        correspondences: { object_point: Vec3; image_point: [number, number] }[],
        init: Pose,
        camera: Camera
    ): Promise<SolveReportPayload> {
        const response = await fetch(`${this.baseUrl}/solve`, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({ correspondences, init, camera }),
        });
        if (!response.ok) {
            throw new ApiError(response.status, await readError(response));
        }
        return response.json() as Promise<SolveReportPayload>;
    }
}

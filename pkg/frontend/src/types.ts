export type Vec3 = [number, number, number];

export interface Pose {
    translation: Vec3;
    rotation_euler: Vec3; // radians, applied Rx then Ry then Rz
}

export interface Camera {
    f: number;
    cx: number;
    cy: number;
    width: number;
    height: number;
}

export interface ObjectAnnotation {
    model_id: string;
    class: string;
    translation: Vec3;
    rotation_euler: Vec3;
}

export interface AnnotationFile {
    version: number;
    image: string;
    camera: Camera;
    objects: ObjectAnnotation[];
}

export interface SceneResponse {
    frame_id: string;
    annotation: AnnotationFile;
    image_url: string;
}

export interface ModelEntry {
    id: string;
    class: string;
    mesh: string;
    scale: Vec3;
}

/** Server-projected wireframe; vertices behind the camera come back null. */
export interface WireframePayload {
    vertices_px: ([number, number] | null)[];
    edges: [number, number][];
    behind: number[];
}

export interface SolveReportPayload {
    pose: Pose;
    rmse: number;
    iterations: number;
    converged: boolean;
}

export type NudgeAxis = 'tx' | 'ty' | 'tz' | 'rx' | 'ry' | 'rz';

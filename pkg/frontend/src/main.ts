import { ApiClient } from './api';
import { Editor } from './editor';
import type { NudgeAxis } from './types';

// Keyboard map: translation on arrows/PageUp-Down, rotation on letters.
const KEY_NUDGES: Record<string, [NudgeAxis, 1 | -1]> = {
    ArrowRight: ['tx', 1],
    ArrowLeft: ['tx', -1],
    ArrowUp: ['ty', 1],
    ArrowDown: ['ty', -1],
    PageUp: ['tz', 1],
    PageDown: ['tz', -1],
    q: ['rx', 1],
    a: ['rx', -1],
    w: ['ry', 1],
    s: ['ry', -1],
    e: ['rz', 1],
    d: ['rz', -1],
};

function drawOverlays(editor: Editor, canvas: HTMLCanvasElement): void {
    const ctx = canvas.getContext('2d');
    if (!ctx) return;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    editor.overlays.forEach((overlay, index) => {
        if (!overlay || overlay.hidden) return;
        ctx.strokeStyle = index === editor.selected ? '#00d060' : '#4090ff';
        ctx.lineWidth = 1;
        ctx.beginPath();
        for (const { from, to } of overlay.segments) {
            ctx.moveTo(from[0], from[1]);
            ctx.lineTo(to[0], to[1]);
        }
        ctx.stroke();
    });
}

function setStatus(text: string): void {
    const el = document.getElementById('status');
    if (el) el.textContent = text;
}

export async function start(): Promise<void> {
    const api = new ApiClient('');
    const editor = new Editor(api);
    const canvas = document.getElementById('overlay') as HTMLCanvasElement;
    const image = document.getElementById('frame') as HTMLImageElement;

    const scenes = await api.listScenes();
    if (scenes.length === 0) {
        setStatus('dataset has no frames');
        return;
    }

    async function show(frameId: string): Promise<void> {
        await editor.loadFrame(frameId);
        if (editor.imageUrl) image.src = editor.imageUrl;
        image.onload = () => {
            canvas.width = image.naturalWidth;
            canvas.height = image.naturalHeight;
            drawOverlays(editor, canvas);
        };
        setStatus(`frame ${frameId} — ${editor.annotation?.objects.length ?? 0} objects`);
    }

    window.addEventListener('keydown', async (event) => {
        const nudge = KEY_NUDGES[event.key];
        if (nudge && editor.selected >= 0) {
            event.preventDefault();
            await editor.nudge(nudge[0], nudge[1]);
            drawOverlays(editor, canvas);
            setStatus(editor.dirty ? 'unsaved changes' : 'saved');
        } else if (event.key === '+') {
            editor.scaleStep('t', 'up');
        } else if (event.key === '-') {
            editor.scaleStep('t', 'down');
        } else if (event.key === 'Enter' && event.ctrlKey) {
            const ok = await editor.save();
            setStatus(ok ? 'saved' : `save failed: ${editor.lastError}`);
        } else if (event.key === 'Tab' && editor.annotation) {
            event.preventDefault();
            const n = editor.annotation.objects.length;
            if (n > 0) editor.select((editor.selected + 1) % n);
            drawOverlays(editor, canvas);
        }
    });

    window.addEventListener('beforeunload', (event) => {
        if (editor.dirty) event.preventDefault();
    });

    await show(scenes[0]);
}

if (typeof document !== 'undefined' && document.getElementById('overlay')) {
    start().catch((err) => setStatus(`service unreachable: ${err}`));
}

import { ApiError } from "./client.js";
export function initialState() {
    return {
        transcript: [],
        focus: { instances: [], vis: [] },
        shadow: null,
        selectedEntity: null,
        candidates: [],
        cloze: null,
        stateHash: "",
        error: null,
        busy: false,
    };
}
function verbText(pairs) {
    return (pairs ?? []).map(([name]) => name).join(" ");
}
function transcriptFrom(records) {
    return records
        .filter((r) => r.type === "vi")
        .sort((a, b) => (a.tick ?? 0) - (b.tick ?? 0))
        .map((r) => ({
        viId: r.id,
        text: `${verbText(r.verbs)}(${r.subject}${r.object != null ? ", " + r.object : ""})`,
        provenance: r.provenance ?? "narrated",
        inFocus: !r.demoted,
    }));
}
export class Controller {
    api;
    onChange;
    state = initialState();
    constructor(api, onChange = () => { }) {
        this.api = api;
        this.onChange = onChange;
    }
    emit() {
        this.onChange(this.state);
    }
    // Re-fetch every panel from the service; the UI holds no reasoning state.
    async refresh() {
        const [memory, focus, hls, hash] = await Promise.all([
            this.api.memory(),
            this.api.focus(),
            this.api.hls(5),
            this.api.stateHash(),
        ]);
        this.state.transcript = transcriptFrom(memory.records);
        this.state.focus = focus;
        this.state.candidates = hls.candidates;
        this.state.stateHash = hash.hash;
        if (this.state.selectedEntity != null) {
            try {
                this.state.shadow = await this.api.shadow(this.state.selectedEntity);
            }
            catch {
                this.state.shadow = null;
                this.state.selectedEntity = null;
            }
        }
        this.emit();
    }
    // Single in-flight mutation: while busy, further mutations are ignored.
    async mutate(action) {
        if (this.state.busy) {
            return;
        }
        this.state.busy = true;
        this.emit();
        try {
            await action();
            this.state.error = null;
            await this.refresh();
        }
        catch (err) {
            if (err instanceof ApiError) {
                this.state.error = {
                    code: err.body.error.code,
                    message: err.body.error.message,
                    line: err.body.error.location?.line ?? null,
                    col: err.body.error.location?.col ?? null,
                };
            }
            else {
                this.state.error = { code: "unreachable", message: String(err), line: null, col: null };
            }
        }
        finally {
            this.state.busy = false;
            this.emit();
        }
    }
    narrate(text) {
        return this.mutate(async () => {
            await this.api.narrate(text);
        });
    }
    // The engine's contract is greedy: only the top candidate can be taken.
    instantiateTop() {
        return this.mutate(async () => {
            await this.api.confabulate(1);
        });
    }
    autoConfabulate(steps) {
        return this.mutate(async () => {
            await this.api.confabulate(steps);
        });
    }
    async clozeAt(position) {
        try {
            const response = await this.api.cloze(position);
            this.state.cloze = { position, candidates: response.candidates };
            this.state.error = null;
        }
        catch (err) {
            if (err instanceof ApiError) {
                this.state.error = {
                    code: err.body.error.code,
                    message: err.body.error.message,
                    line: err.body.error.location?.line ?? null,
                    col: err.body.error.location?.col ?? null,
                };
            }
            else {
                throw err;
            }
        }
        this.emit();
    }
    async selectEntity(id) {
        this.state.selectedEntity = id;
        if (id == null) {
            this.state.shadow = null;
            this.emit();
            return;
        }
        try {
            this.state.shadow = await this.api.shadow(id);
        }
        catch {
            this.state.shadow = { owner: id, entries: [] };
        }
        this.emit();
    }
}

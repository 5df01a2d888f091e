import { ApiClient, ApiError } from "./client.js";
import type { Candidate, FocusResponse, MemoryRecord, ShadowResponse } from "./types.js";

// One transcript line per event ever inserted, rebuilt from the episodic
// log on every refresh so a page reload reproduces identical panels.
export interface TranscriptEntry {
  viId: number;
  text: string;
  provenance: "narrated" | "confabulated";
  inFocus: boolean;
}

export interface InlineError {
  code: string;
  message: string;
  line: number | null;
  col: number | null;
}

export interface ViewState {
  transcript: TranscriptEntry[];
  focus: FocusResponse;
  shadow: ShadowResponse | null;
  selectedEntity: number | null;
  candidates: Candidate[];
  cloze: { position: number; candidates: Candidate[] } | null;
  stateHash: string;
  error: InlineError | null;
  busy: boolean;
}

export function initialState(): ViewState {
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

function verbText(pairs: [string, number][] | undefined): string {
  return (pairs ?? []).map(([name]) => name).join(" ");
}

function transcriptFrom(records: MemoryRecord[]): TranscriptEntry[] {
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
  readonly state: ViewState = initialState();

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: ViewState) => void = () => {},
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  // Re-fetch every panel from the service; the UI holds no reasoning state.
  async refresh(): Promise<void> {
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
      } catch {
        this.state.shadow = null;
        this.state.selectedEntity = null;
      }
    }
    this.emit();
  }

  // Single in-flight mutation: while busy, further mutations are ignored.
  private async mutate(action: () => Promise<void>): Promise<void> {
    if (this.state.busy) {
      return;
    }
    this.state.busy = true;
    this.emit();
    try {
      await action();
      this.state.error = null;
      await this.refresh();
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.error = {
          code: err.body.error.code,
          message: err.body.error.message,
          line: err.body.error.location?.line ?? null,
          col: err.body.error.location?.col ?? null,
        };
      } else {
        this.state.error = { code: "unreachable", message: String(err), line: null, col: null };
      }
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  narrate(text: string): Promise<void> {
    return this.mutate(async () => {
      await this.api.narrate(text);
    });
  }

  // The engine's contract is greedy: only the top candidate can be taken.
  instantiateTop(): Promise<void> {
    return this.mutate(async () => {
      await this.api.confabulate(1);
    });
  }

  autoConfabulate(steps: number): Promise<void> {
    return this.mutate(async () => {
      await this.api.confabulate(steps);
    });
  }

  async clozeAt(position: number): Promise<void> {
    try {
      const response = await this.api.cloze(position);
      this.state.cloze = { position, candidates: response.candidates };
      this.state.error = null;
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.error = {
          code: err.body.error.code,
          message: err.body.error.message,
          line: err.body.error.location?.line ?? null,
          col: err.body.error.location?.col ?? null,
        };
      } else {
        throw err;
      }
    }
    this.emit();
  }

  async selectEntity(id: number | null): Promise<void> {
    this.state.selectedEntity = id;
    if (id == null) {
      this.state.shadow = null;
      this.emit();
      return;
    }
    try {
      this.state.shadow = await this.api.shadow(id);
    } catch {
      this.state.shadow = { owner: id, entries: [] };
    }
    this.emit();
  }
}

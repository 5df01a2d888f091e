export class ApiError extends Error {
    status;
    body;
    constructor(status, body) {
        super(body.error?.message ?? `request failed with status ${status}`);
        this.status = status;
        this.body = body;
    }
}
async function unwrap(response) {
    if (response.status >= 200 && response.status < 300) {
        return (await response.json());
    }
    const body = (await response.json());
    throw new ApiError(response.status, body);
}
export class ApiClient {
    http;
    constructor(http) {
        this.http = http;
    }
    get(path) {
        return this.http(path).then((r) => unwrap(r));
    }
    post(path, payload) {
        return this.http(path, {
            method: "POST",
            body: JSON.stringify(payload),
            headers: { "content-type": "application/json" },
        }).then((r) => unwrap(r));
    }
    narrate(text) {
        return this.post("/api/narrate", { text });
    }
    focus() {
        return this.get("/api/focus");
    }
    shadow(id) {
        return this.get(`/api/shadow/${id}`);
    }
    hls(top) {
        return this.get(`/api/hls?top=${top}`);
    }
    memory() {
        return this.get("/api/memory");
    }
    stateHash() {
        return this.get("/api/state/hash");
    }
    confabulate(steps) {
        return this.post("/api/confabulate", { steps });
    }
    cloze(position, top = 5) {
        return this.post("/api/cloze", { position, top });
    }
}

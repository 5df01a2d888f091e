import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient, HttpFn, HttpResponse } from "../src/client.js";
import { Controller } from "../src/controller.js";
import type { Candidate, FocusResponse, MemoryResponse } from "../src/types.js";

// ---------------------------------------------------------------------------
// A scripted stand-in for the service, returning bodies shaped exactly like
// the published response schemas. It records every request it sees.
// ---------------------------------------------------------------------------

interface RecordedCall {
  method: string;
  path: string;
  body?: unknown;
}

const HASH = "0".repeat(64);

const candidate: Candidate = {
  score: 1.0,
  verbs: { orders: 1.0 },
  roles: { subject: { instance: 1 }, object: null },
  supporters: [{ vi: 9, support: 0.5 }, { vi: 14, support: 0.5 }],
};

function focusAfterNarration(): FocusResponse {
  return {
    instances: [{ id: 1, overlay: { man: 1.0 }, salience: 1.0, created_tick: 0, last_referenced_tick: 1 }],
    vis: [{ id: 2, verbs: { waves: 1.0 }, subject: 1, object: null, tick: 1, story_id: 0, provenance: "narrated", salience: 1.0 }],
  };
}

function memoryAfterNarration(): MemoryResponse {
  return {
    records: [
      { type: "instance", id: 1, demoted: false, overlay: [["man", 1.0]] },
      { type: "vi", id: 2, demoted: false, verbs: [["waves", 1.0]], subject: 1, object: null, tick: 1, story_id: 0, provenance: "narrated" },
    ],
  };
}

class MockService {
  calls: RecordedCall[] = [];
  narrated = false;

  http: HttpFn = async (path, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body) : undefined;
    this.calls.push({ method, path, body });
    return this.route(method, path, body);
  };

  callsTo(method: string, pathPrefix: string): RecordedCall[] {
    return this.calls.filter((c) => c.method === method && c.path.startsWith(pathPrefix));
  }

  private respond(status: number, payload: unknown): HttpResponse {
    return { status, json: async () => payload };
  }

  private route(method: string, path: string, body: any): HttpResponse {
    if (method === "POST" && path === "/api/narrate") {
      if (typeof body.text === "string" && body.text.includes("xyzzy")) {
        return this.respond(400, {
          error: {
            code: "unknown_word",
            message: "line 1: unknown word: 'xyzzy'",
            location: { line: 1, col: null },
          },
          inserted: [],
        });
      }
      this.narrated = true;
      return this.respond(200, { inserted: [2], diagnostics: [] });
    }
    if (method === "POST" && path === "/api/confabulate") {
      return this.respond(200, { inserted: [7] });
    }
    if (method === "POST" && path === "/api/cloze") {
      return this.respond(200, { candidates: [candidate] });
    }
    if (path === "/api/focus") {
      return this.respond(200, this.narrated ? focusAfterNarration() : { instances: [], vis: [] });
    }
    if (path === "/api/memory") {
      return this.respond(200, this.narrated ? memoryAfterNarration() : { records: [] });
    }
    if (path.startsWith("/api/hls")) {
      return this.respond(200, { candidates: this.narrated ? [candidate] : [] });
    }
    if (path === "/api/state/hash") {
      return this.respond(200, { hash: HASH });
    }
    if (path.startsWith("/api/shadow/")) {
      return this.respond(200, { owner: Number(path.split("/").pop()), entries: [{ id: 1, weight: 0.4 }] });
    }
    return this.respond(404, { error: { code: "unknown_id", message: "no route", location: null } });
  }
}

function makeController(): { service: MockService; controller: Controller } {
  const service = new MockService();
  const controller = new Controller(new ApiClient(service.http));
  return { service, controller };
}

// ---------------------------------------------------------------------------

test("narrating one sentence updates transcript and focus panels", async () => {
  const { service, controller } = makeController();
  await controller.narrate("A man / waves.");

  const narrations = service.callsTo("POST", "/api/narrate");
  assert.equal(narrations.length, 1);
  assert.deepEqual(narrations[0]!.body, { text: "A man / waves." });

  assert.equal(controller.state.error, null);
  assert.equal(controller.state.transcript.length, 1);
  assert.equal(controller.state.transcript[0]!.provenance, "narrated");
  assert.equal(controller.state.transcript[0]!.viId, 2);
  assert.equal(controller.state.focus.vis.length, 1);
  assert.equal(controller.state.focus.instances.length, 1);
  assert.equal(controller.state.stateHash, HASH);
  // the write was followed by panel refreshes
  assert.ok(service.callsTo("GET", "/api/focus").length >= 1);
  assert.ok(service.callsTo("GET", "/api/memory").length >= 1);
});

test("auto x4 issues exactly one confabulate request with steps=4", async () => {
  const { service, controller } = makeController();
  service.narrated = true;
  await controller.autoConfabulate(4);

  const posts = service.callsTo("POST", "/api/confabulate");
  assert.equal(posts.length, 1);
  assert.deepEqual(posts[0]!.body, { steps: 4 });
});

test("instantiate-top issues confabulate with steps=1", async () => {
  const { service, controller } = makeController();
  service.narrated = true;
  await controller.instantiateTop();
  const posts = service.callsTo("POST", "/api/confabulate");
  assert.equal(posts.length, 1);
  assert.deepEqual(posts[0]!.body, { steps: 1 });
});

test("unknown-word error renders inline and leaves panels unchanged", async () => {
  const { service, controller } = makeController();
  await controller.narrate("A xyzzy / waves.");

  assert.ok(controller.state.error);
  assert.equal(controller.state.error!.code, "unknown_word");
  assert.equal(controller.state.error!.line, 1);
  assert.match(controller.state.error!.message, /xyzzy/);
  // no refresh after a failed write: panels keep their previous content
  assert.equal(service.callsTo("GET", "/api/focus").length, 0);
  assert.equal(controller.state.transcript.length, 0);
  assert.equal(controller.state.focus.vis.length, 0);

  // a following success clears the inline error
  await controller.narrate("A man / waves.");
  assert.equal(controller.state.error, null);
});

test("mutations are single-flight: a second write while busy is ignored", async () => {
  const service = new MockService();
  let release: (() => void) | undefined;
  const gate = new Promise<void>((resolve) => (release = resolve));
  const slowHttp: HttpFn = async (path, init) => {
    if (init?.method === "POST") {
      await gate;
    }
    return service.http(path, init);
  };
  const controller = new Controller(new ApiClient(slowHttp));

  const first = controller.narrate("A man / waves.");
  const second = controller.narrate("A man / sits.");
  release!();
  await Promise.all([first, second]);

  assert.equal(service.callsTo("POST", "/api/narrate").length, 1);
});

test("cloze dialog shows ranked fills without mutating", async () => {
  const { service, controller } = makeController();
  service.narrated = true;
  await controller.clozeAt(2);

  const posts = service.callsTo("POST", "/api/cloze");
  assert.equal(posts.length, 1);
  assert.deepEqual(posts[0]!.body, { position: 2, top: 5 });
  assert.equal(controller.state.cloze!.position, 2);
  assert.equal(controller.state.cloze!.candidates.length, 1);
  assert.deepEqual(controller.state.cloze!.candidates[0]!.verbs, { orders: 1.0 });
  assert.equal(service.callsTo("POST", "/api/confabulate").length, 0);
  assert.equal(service.callsTo("POST", "/api/narrate").length, 0);
});

test("selecting an entity loads its shadow", async () => {
  const { service, controller } = makeController();
  service.narrated = true;
  await controller.selectEntity(2);
  assert.equal(controller.state.shadow!.owner, 2);
  assert.equal(controller.state.shadow!.entries.length, 1);
});

test("view state is rebuilt entirely from service responses", async () => {
  const { controller } = makeController();
  await controller.narrate("A man / waves.");
  const first = JSON.stringify(controller.state);
  // a reload is just a fresh refresh; it reproduces identical panels
  const { service: s2, controller: fresh } = makeController();
  s2.narrated = true;
  await fresh.refresh();
  assert.equal(JSON.stringify(fresh.state), first);
});

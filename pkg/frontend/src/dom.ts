import { Controller, ViewState } from "./controller.js";
import type { Candidate, RoleTarget } from "./types.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function bar(fraction: number, cssClass: string): string {
  const pct = Math.max(0, Math.min(1, fraction)) * 100;
  return `<span class="bar ${cssClass}" style="width:${pct.toFixed(1)}%"></span>`;
}

function weightedText(weights: Record<string, number>): string {
  return Object.entries(weights)
    .map(([name, w]) => (w === 1 ? name : `${name}:${w.toFixed(2)}`))
    .join(" ");
}

function roleText(target: RoleTarget): string {
  if (target == null) return "-";
  if ("instance" in target) return `#${target.instance}`;
  return `new {${weightedText(target.new_instance)}}`;
}

function candidateRow(c: Candidate, index: number): string {
  const supporters = c.supporters.map((s) => `#${s.vi}:${s.support.toFixed(3)}`).join(" ");
  return `<tr>
    <td>${index + 1}</td>
    <td class="verb">${weightedText(c.verbs)}</td>
    <td>${c.score.toFixed(4)}</td>
    <td>${roleText(c.roles.subject)} / ${roleText(c.roles.object)}</td>
    <td class="supporters">${supporters}</td>
  </tr>`;
}

export function render(state: ViewState): void {
  const transcript = el("transcript");
  transcript.innerHTML = state.transcript
    .map(
      (entry) =>
        `<div class="line${entry.inFocus ? " in-focus" : ""}">
           <span class="badge ${entry.provenance}">${entry.provenance === "confabulated" ? "C" : "N"}</span>
           <span class="vi-id">#${entry.viId}</span> ${entry.text}
         </div>`,
    )
    .join("");
  transcript.scrollTop = transcript.scrollHeight;

  el("focus-instances").innerHTML = state.focus.instances
    .map(
      (inst) =>
        `<div class="row selectable" data-entity="${inst.id}">
           <span class="vi-id">#${inst.id}</span> ${weightedText(inst.overlay)}
           <span class="track">${bar(inst.salience, "salience")}</span>
           <span class="num">${inst.salience.toFixed(3)}</span>
         </div>`,
    )
    .join("");
  el("focus-vis").innerHTML = state.focus.vis
    .map(
      (vi) =>
        `<div class="row selectable" data-entity="${vi.id}">
           <span class="vi-id">#${vi.id}</span> <span class="verb">${weightedText(vi.verbs)}</span>
           (${vi.subject}${vi.object != null ? ", " + vi.object : ""})
           <span class="track">${bar(vi.salience, "salience")}</span>
           <span class="num">${vi.salience.toFixed(3)}</span>
         </div>`,
    )
    .join("");

  const shadow = el("shadow-panel");
  if (state.shadow == null) {
    shadow.innerHTML = `<p class="muted">Select a focus entity to see its shadow.</p>`;
  } else {
    const rows = state.shadow.entries
      .map(
        (entry) =>
          `<div class="row"><span class="vi-id">#${entry.id}</span>
             <span class="track">${bar(entry.weight, "shadow")}</span>
             <span class="num">${entry.weight.toFixed(4)}</span></div>`,
      )
      .join("");
    shadow.innerHTML = `<p>Shadow of #${state.shadow.owner}</p>${rows || '<p class="muted">empty</p>'}`;
  }

  el("hls-body").innerHTML = state.candidates.map(candidateRow).join("");
  (el("btn-instantiate") as HTMLButtonElement).disabled = state.busy || state.candidates.length === 0;
  (el("btn-auto") as HTMLButtonElement).disabled = state.busy || state.candidates.length === 0;
  (el("btn-narrate") as HTMLButtonElement).disabled = state.busy;
  (el("btn-cloze") as HTMLButtonElement).disabled = state.focus.vis.length === 0;

  const cloze = el("cloze-results");
  if (state.cloze == null) {
    cloze.innerHTML = "";
  } else {
    cloze.innerHTML =
      `<p>Fills for gap at position ${state.cloze.position}:</p>` +
      `<table><tbody>${state.cloze.candidates.map(candidateRow).join("")}</tbody></table>`;
  }

  const error = el("error");
  if (state.error == null) {
    error.textContent = "";
    error.classList.add("hidden");
  } else {
    const where = state.error.line != null ? ` (line ${state.error.line}${state.error.col != null ? `, col ${state.error.col}` : ""})` : "";
    error.textContent = `${state.error.code}: ${state.error.message}${where}`;
    error.classList.remove("hidden");
  }

  el("state-hash").textContent = state.stateHash ? state.stateHash.slice(0, 16) : "";
}

export function wire(controller: Controller): void {
  const input = el("narrate-input") as HTMLTextAreaElement;
  el("btn-narrate").addEventListener("click", () => {
    const text = input.value.trim();
    if (text) {
      void controller.narrate(text).then(() => {
        if (controller.state.error == null) input.value = "";
      });
    }
  });
  el("btn-instantiate").addEventListener("click", () => void controller.instantiateTop());
  el("btn-auto").addEventListener("click", () => {
    const steps = parseInt((el("auto-steps") as HTMLInputElement).value, 10) || 1;
    void controller.autoConfabulate(steps);
  });
  el("btn-cloze").addEventListener("click", () => {
    const position = parseInt((el("cloze-position") as HTMLInputElement).value, 10) || 0;
    void controller.clozeAt(position);
  });
  for (const panel of ["focus-instances", "focus-vis"]) {
    el(panel).addEventListener("click", (event) => {
      const row = (event.target as HTMLElement).closest("[data-entity]");
      if (row) void controller.selectEntity(Number(row.getAttribute("data-entity")));
    });
  }
}

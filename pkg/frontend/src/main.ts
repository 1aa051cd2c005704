import { ApiError, MiqyasClient } from "./api.js";
import { AnnotationGrid } from "./grid.js";
import { UnificationView } from "./unification.js";
import type { LevelInfo } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function loadBatch(api: MiqyasClient, grid: AnnotationGrid, annotator: string): Promise<void> {
  const existing = await api.batchesFor(annotator);
  let batch = existing.find((b) => b.status === "open");
  if (!batch) {
    batch = await api.createBatch({ annotator, size: 100, allow_partial: true });
  }
  const sentences = await Promise.all(batch.sentence_ids.map((id) => api.sentence(id)));
  grid.load(sentences);
  el<HTMLElement>("batch-label").textContent = `${batch.batch_id} (${sentences.length} sentences)`;
}

function renderUnification(view: UnificationView, container: HTMLElement): void {
  const table = document.createElement("table");
  table.className = "grid";
  const head = table.createTHead().insertRow();
  for (const column of ["Sentence", "Labels", "MM", "AL", "UL", "Rationale", ""]) {
    const th = document.createElement("th");
    th.textContent = column;
    head.appendChild(th);
  }
  const body = table.createTBody();
  for (const entry of view.entries) {
    const tr = body.insertRow();
    const sentenceCell = tr.insertCell();
    sentenceCell.dir = "rtl";
    sentenceCell.lang = "ar";
    sentenceCell.textContent = entry.sentence.text;
    tr.insertCell().textContent = Object.entries(entry.sentence.labels)
      .map(([annotator, level]) => `${annotator}:${level}`)
      .join(" ");
    const mm = tr.insertCell();
    mm.textContent = String(entry.sentence.max_min);
    mm.className = entry.sentence.max_min >= 3 ? "violation" : "";
    tr.insertCell().textContent = String(entry.sentence.al_suggestion ?? "");

    const ulCell = tr.insertCell();
    const input = document.createElement("input");
    input.type = "number";
    input.min = "1";
    input.max = "19";
    input.value = entry.ul === null ? "" : String(entry.ul);
    input.disabled = entry.state === "stored";
    input.addEventListener("input", () => {
      entry.ul = input.value ? Number(input.value) : null;
      rationale.classList.toggle("required", entry.needsRationale);
      submit.disabled = !entry.canSubmit;
    });
    ulCell.appendChild(input);

    const rationaleCell = tr.insertCell();
    const rationale = document.createElement("input");
    rationale.type = "text";
    rationale.dir = "auto";
    rationale.placeholder = "required when outside max-min";
    rationale.disabled = entry.state === "stored";
    rationale.addEventListener("input", () => {
      entry.rationale = rationale.value;
      rationale.classList.toggle("required", entry.needsRationale);
      submit.disabled = !entry.canSubmit;
    });
    rationaleCell.appendChild(rationale);

    const actionCell = tr.insertCell();
    const submit = document.createElement("button");
    submit.textContent = entry.state === "stored" ? "stored" : "store UL";
    submit.disabled = !entry.canSubmit || entry.state === "stored";
    submit.addEventListener("click", async () => {
      if (entry.needsRationale) {
        alert("This UL is outside the annotators' max-min range; give a rationale first.");
        return;
      }
      const ok = await view.submit(entry);
      if (entry.state === "stale") {
        alert("The round changed on the server; refreshing.");
        await view.refresh();
        renderUnification(view, container);
        return;
      }
      if (ok) {
        submit.textContent = "stored";
        submit.disabled = true;
        input.disabled = true;
        rationale.disabled = true;
      } else if (entry.lastError) {
        alert(entry.lastError);
      }
    });
    actionCell.appendChild(submit);
  }
  container.replaceChildren(table);
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const api = new MiqyasClient(params.get("api") ?? "");
  const annotator = params.get("annotator") ?? "annotator-1";
  el<HTMLElement>("annotator-label").textContent = annotator;

  let levels: LevelInfo[];
  try {
    levels = await api.levels();
  } catch (err) {
    el<HTMLElement>("status").textContent = `service unreachable: ${err}`;
    return;
  }

  const grid = new AnnotationGrid(api, levels, el("grid-container"), annotator);
  document.addEventListener("keydown", (event) => grid.handleKey(event));
  try {
    await loadBatch(api, grid, annotator);
  } catch (err) {
    el<HTMLElement>("status").textContent =
      err instanceof ApiError ? `no batch: ${err.detail}` : `failed to load batch: ${err}`;
  }

  el<HTMLButtonElement>("open-round").addEventListener("click", async () => {
    const roundId = el<HTMLInputElement>("round-id").value.trim();
    if (!roundId) return;
    try {
      const view = await UnificationView.open(api, roundId);
      renderUnification(view, el("unification-container"));
    } catch (err) {
      el<HTMLElement>("status").textContent = `round: ${err}`;
    }
  });
}

void start();

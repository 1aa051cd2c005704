import type { MiqyasClient } from "./api.js";
import { AnnotationRow } from "./rowmodel.js";
import type { LevelInfo, Sentence } from "./types.js";
import { FLAG_OPTIONS } from "./types.js";

const DIMENSION_LABELS: Record<string, string> = {
  word_count: "Words",
  orthography_phonology: "Orthography",
  morphology: "Morphology",
  syntax: "Syntax",
  vocabulary: "Vocabulary",
  ideas_content: "Ideas",
};

/**
 * Keyboard-first annotation grid. Arrow keys move between rows, typing
 * digits picks a level (two-digit entry within a short window), Enter
 * saves, "f" opens the flag menu of the active row.
 */
export class AnnotationGrid {
  rows: AnnotationRow[] = [];
  activeIndex = 0;
  private digitBuffer = "";
  private digitTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private api: MiqyasClient,
    private levels: LevelInfo[],
    private container: HTMLElement,
    private annotator: string,
  ) {}

  load(sentences: Sentence[]): void {
    this.rows = sentences.map(
      (s) => new AnnotationRow(this.api, s, this.annotator, (row) => this.renderRow(row)),
    );
    this.render();
  }

  private levelName(index: number): string {
    return this.levels.find((l) => l.index === index)?.name ?? String(index);
  }

  render(): void {
    const table = document.createElement("table");
    table.className = "grid";
    const head = table.createTHead().insertRow();
    const columns = ["Sentence", "Words", "Level", ...Object.values(DIMENSION_LABELS), "Flags", "Note", "State"];
    for (const column of columns) {
      const th = document.createElement("th");
      th.textContent = column;
      head.appendChild(th);
    }
    const body = table.createTBody();
    this.rows.forEach((row, index) => {
      const tr = body.insertRow();
      tr.dataset.sentenceId = row.sentence.sentence_id;
      tr.tabIndex = -1;
      this.fillRow(tr, row, index);
    });
    this.container.replaceChildren(table);
    this.highlightActive();
  }

  private fillRow(tr: HTMLTableRowElement, row: AnnotationRow, index: number): void {
    tr.replaceChildren();
    tr.classList.toggle("excluded", row.levelDisabled);
    tr.classList.toggle("active", index === this.activeIndex);

    const sentenceCell = tr.insertCell();
    sentenceCell.dir = "rtl"; // Arabic text renders right-to-left, diacritics intact
    sentenceCell.lang = "ar";
    sentenceCell.className = "sentence";
    sentenceCell.textContent = row.sentence.text;

    tr.insertCell().textContent = String(row.wordCount);

    const levelCell = tr.insertCell();
    const select = document.createElement("select");
    select.disabled = row.levelDisabled;
    const blank = document.createElement("option");
    blank.value = "";
    blank.textContent = "—";
    select.appendChild(blank);
    for (const level of this.levels) {
      const option = document.createElement("option");
      option.value = String(level.index);
      option.textContent = level.name;
      option.selected = row.selectedLevel === level.index;
      select.appendChild(option);
    }
    select.addEventListener("change", () => {
      this.activeIndex = index;
      if (select.value) void row.selectLevel(Number(select.value));
    });
    levelCell.appendChild(select);

    for (const dimension of Object.keys(DIMENSION_LABELS)) {
      const cell = tr.insertCell();
      const entry = row.dimensionCells.find((c) => c.dimension === dimension);
      cell.className = "dim";
      if (entry) {
        cell.textContent = entry.applies ? "✓" : "—";
        cell.title = entry.message;
        cell.classList.toggle("inactive", !entry.applies);
      }
      if (dimension === "word_count" && row.wordCountViolation) {
        cell.textContent = "⚠ " + row.wordCount;
        cell.classList.add("violation");
        cell.title = row.violations.find((v) => v.kind === "word_count_ceiling")?.message ?? "";
      }
    }

    const flagCell = tr.insertCell();
    for (const flag of FLAG_OPTIONS) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = row.flags.has(flag);
      box.addEventListener("change", () => {
        this.activeIndex = index;
        row.toggleFlag(flag);
      });
      label.append(box, flag.replace("_", " "));
      flagCell.appendChild(label);
    }

    const noteCell = tr.insertCell();
    const note = document.createElement("input");
    note.type = "text";
    note.value = row.note;
    note.dir = "auto";
    note.addEventListener("input", () => {
      row.note = note.value;
    });
    noteCell.appendChild(note);

    const stateCell = tr.insertCell();
    stateCell.className = `state ${row.saveState}`;
    const below = row.belowFloorAdvisory;
    let text: string = row.saveState;
    if (row.saveState === "conflict") text = "conflict – reload?";
    if (row.saveState === "retry") text = "offline – retry";
    if (below) text += ` · below floor ${row.floor}`;
    stateCell.textContent = text;
    if (row.saveState === "conflict") {
      const reload = document.createElement("button");
      reload.textContent = "reload";
      reload.addEventListener("click", () => row.acknowledgeConflict());
      stateCell.appendChild(reload);
    }
  }

  renderRow(row: AnnotationRow): void {
    const index = this.rows.indexOf(row);
    const tr = this.container.querySelectorAll("tbody tr")[index] as HTMLTableRowElement | undefined;
    if (tr) this.fillRow(tr, row, index);
  }

  private highlightActive(): void {
    this.container.querySelectorAll("tbody tr").forEach((tr, index) => {
      tr.classList.toggle("active", index === this.activeIndex);
    });
    const active = this.container.querySelectorAll("tbody tr")[this.activeIndex];
    (active as HTMLElement | undefined)?.scrollIntoView({ block: "nearest" });
  }

  /** Global key handler; attach to the document. */
  handleKey(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null;
    if (target && ["INPUT", "TEXTAREA"].includes(target.tagName)) return;
    const row = this.rows[this.activeIndex];
    if (!row) return;

    if (event.key === "ArrowDown" || event.key === "ArrowUp") {
      event.preventDefault();
      const step = event.key === "ArrowDown" ? 1 : -1;
      this.activeIndex = Math.min(this.rows.length - 1, Math.max(0, this.activeIndex + step));
      this.highlightActive();
      return;
    }
    if (event.key >= "0" && event.key <= "9") {
      event.preventDefault();
      this.digitBuffer += event.key;
      if (this.digitTimer) clearTimeout(this.digitTimer);
      // 1 may still become 10..19; wait briefly for a second digit
      const value = Number(this.digitBuffer);
      if (this.digitBuffer.length >= 2 || value > 1) {
        this.commitDigits(row);
      } else {
        this.digitTimer = setTimeout(() => this.commitDigits(row), 450);
      }
      return;
    }
    if (event.key === "Enter") {
      event.preventDefault();
      void row.save();
      return;
    }
  }

  private commitDigits(row: AnnotationRow): void {
    const value = Number(this.digitBuffer);
    this.digitBuffer = "";
    if (this.digitTimer) {
      clearTimeout(this.digitTimer);
      this.digitTimer = null;
    }
    if (value >= 1 && value <= 19) void row.selectLevel(value);
  }
}

import { ConflictError, MiqyasClient, NetworkError } from "./api.js";
import type { AnnotationEvent, Judgment, Sentence, Violation } from "./types.js";

export type SaveState =
  | "idle" // nothing chosen yet
  | "dirty" // choice made, not saved
  | "saving"
  | "saved"
  | "conflict" // newer version exists on the server; reload prompt
  | "retry" // network failed; the choice is kept and can be resent
  | "excluded"; // flagged without a level

export interface DimensionCell {
  dimension: string;
  applies: boolean;
  message: string;
}

const DIMENSION_ORDER = [
  "word_count",
  "orthography_phonology",
  "morphology",
  "syntax",
  "vocabulary",
  "ideas_content",
];

/**
 * View model of one grid row: the sentence, the annotator's current choice,
 * and the live guideline feedback for that choice. All judgments come from
 * the service (/validate and /annotations); the model never levels locally.
 */
export class AnnotationRow {
  selectedLevel: number | null = null;
  flags = new Set<string>();
  note = "";
  saveState: SaveState = "idle";
  /** next version to write; bumped from server responses */
  version = 1;
  wordCount: number;
  floor: number | null = null;
  violations: Violation[] = [];
  dimensionCells: DimensionCell[] = [];
  conflictLatest: AnnotationEvent | null = null;
  validationFailed = false;

  private validateToken = 0;

  constructor(
    private api: MiqyasClient,
    public readonly sentence: Sentence,
    public readonly annotator: string,
    private onChange: (row: AnnotationRow) => void = () => {},
  ) {
    this.wordCount = sentence.word_count;
    if (sentence.excluded || sentence.flags.length > 0) {
      for (const flag of sentence.flags) this.flags.add(flag);
      this.saveState = sentence.excluded ? "excluded" : "idle";
    }
  }

  /** Flagged rows are greyed out and cannot take a level. */
  get levelDisabled(): boolean {
    return this.flags.size > 0;
  }

  get wordCountViolation(): boolean {
    return this.violations.some((v) => v.kind === "word_count_ceiling");
  }

  get belowFloorAdvisory(): Violation | undefined {
    return this.violations.find((v) => v.kind === "below_floor");
  }

  /**
   * Choose a level; immediately asks the service to validate it. Responses
   * arriving out of order are dropped so the feedback cells always reflect
   * the latest response for the *currently* selected level.
   */
  async selectLevel(level: number): Promise<void> {
    if (this.levelDisabled) return;
    this.selectedLevel = level;
    if (this.saveState !== "conflict") this.saveState = "dirty";
    const token = ++this.validateToken;
    this.onChange(this);
    let judgment: Judgment;
    try {
      const response = await this.api.validate({
        candidate_level: level,
        sentence_id: this.sentence.sentence_id,
      });
      if (token !== this.validateToken) return; // a newer selection superseded us
      judgment = response.judgment;
      this.wordCount = response.word_count;
      this.validationFailed = false;
    } catch {
      if (token !== this.validateToken) return;
      // feedback is unavailable but the annotator's choice stands
      this.validationFailed = true;
      this.violations = [];
      this.dimensionCells = [];
      this.onChange(this);
      return;
    }
    this.floor = judgment.floor;
    this.violations = judgment.violations.filter((v) => v.severity === "advisory");
    const infos = new Map(
      judgment.violations
        .filter((v) => v.kind === "dimension_info")
        .map((v) => {
          const [dimension, message] = splitOnce(v.message, ": ");
          return [dimension, message] as const;
        }),
    );
    this.dimensionCells = DIMENSION_ORDER.map((dimension) => ({
      dimension,
      message: infos.get(dimension) ?? "",
      applies: (infos.get(dimension) ?? "").startsWith("applies"),
    }));
    this.onChange(this);
  }

  toggleFlag(flag: string): void {
    if (this.flags.has(flag)) {
      this.flags.delete(flag);
    } else {
      this.flags.add(flag);
      // flagged rows drop their level choice and grey out
      this.selectedLevel = null;
      this.violations = [];
      this.dimensionCells = [];
    }
    if (this.saveState !== "conflict") this.saveState = "dirty";
    this.onChange(this);
  }

  get canSave(): boolean {
    return (
      (this.selectedLevel !== null || this.flags.size > 0) &&
      this.saveState !== "saving" &&
      this.saveState !== "conflict"
    );
  }

  async save(): Promise<void> {
    if (!this.canSave) return;
    this.saveState = "saving";
    this.onChange(this);
    try {
      const response = await this.api.submitAnnotation({
        sentence_id: this.sentence.sentence_id,
        annotator: this.annotator,
        version: this.version,
        level: this.selectedLevel,
        flags: [...this.flags].sort(),
        note: this.note,
      });
      this.version = response.event.version + 1;
      this.wordCount = response.word_count;
      if (response.judgment) {
        this.violations = response.judgment.violations.filter((v) => v.severity === "advisory");
        this.floor = response.judgment.floor;
      }
      this.saveState = this.selectedLevel === null ? "excluded" : "saved";
      this.conflictLatest = null;
    } catch (err) {
      if (err instanceof ConflictError) {
        this.saveState = "conflict";
        this.conflictLatest = err.latest;
      } else if (err instanceof NetworkError) {
        this.saveState = "retry"; // choice preserved, resend later
      } else {
        this.saveState = "dirty";
        throw err;
      }
    } finally {
      this.onChange(this);
    }
  }

  /** Accept the reload prompt: adopt the server's version counter and re-edit. */
  acknowledgeConflict(): void {
    if (this.conflictLatest) {
      this.version = this.conflictLatest.version + 1;
    }
    this.saveState = "dirty";
    this.conflictLatest = null;
    this.onChange(this);
  }
}

function splitOnce(text: string, sep: string): [string, string] {
  const at = text.indexOf(sep);
  return at < 0 ? [text, ""] : [text.slice(0, at), text.slice(at + sep.length)];
}

import { ApiError, MiqyasClient, NetworkError } from "./api.js";
import type { Round, RoundSentence, UnificationRecord } from "./types.js";

export type UlState = "editing" | "submitting" | "stored" | "stale" | "error";

/**
 * Unified-label entry for one sentence of a review round. The max-min gate
 * is a UI rule: a UL outside the annotators' label range cannot be posted
 * without a written rationale.
 */
export class UlEntry {
  ul: number | null;
  rationale = "";
  state: UlState = "editing";
  record: UnificationRecord | null = null;
  lastError = "";

  constructor(public readonly sentence: RoundSentence) {
    if (sentence.ul !== null) {
      this.ul = sentence.ul;
      this.state = "stored";
    } else {
      // unanimous rows come prefilled with the obvious suggestion
      this.ul = sentence.max_min === 0 ? sentence.al_suggestion : null;
    }
  }

  get labelRange(): [number, number] {
    const values = Object.values(this.sentence.labels);
    return [Math.min(...values), Math.max(...values)];
  }

  get outOfRange(): boolean {
    if (this.ul === null) return false;
    const [lo, hi] = this.labelRange;
    return this.ul < lo || this.ul > hi;
  }

  get needsRationale(): boolean {
    return this.outOfRange && this.rationale.trim() === "";
  }

  get canSubmit(): boolean {
    return this.ul !== null && !this.needsRationale && this.state !== "submitting";
  }

  async submit(api: MiqyasClient, roundId: string): Promise<boolean> {
    if (!this.canSubmit || this.ul === null) return false; // blocked by the range gate
    this.state = "submitting";
    try {
      this.record = await api.recordUl(roundId, this.sentence.sentence_id, this.ul, this.rationale);
      this.state = "stored";
      return true;
    } catch (err) {
      if (err instanceof ApiError && (err.status === 404 || err.status === 409)) {
        this.state = "stale"; // round changed under us; prompt a refresh
      } else if (err instanceof NetworkError) {
        this.state = "editing";
        this.lastError = "network failure, try again";
      } else {
        this.state = "error";
        this.lastError = err instanceof Error ? err.message : String(err);
      }
      return false;
    }
  }
}

/** Review panel over one unification round. */
export class UnificationView {
  entries: UlEntry[];

  private constructor(
    private api: MiqyasClient,
    public round: Round,
  ) {
    this.entries = round.sentences.map((s) => new UlEntry(s));
  }

  static async open(api: MiqyasClient, roundId: string): Promise<UnificationView> {
    return new UnificationView(api, await api.getRound(roundId));
  }

  static async create(
    api: MiqyasClient,
    sentenceIds: string[],
    annotators: string[],
  ): Promise<UnificationView> {
    return new UnificationView(api, await api.openRound(sentenceIds, annotators));
  }

  async refresh(): Promise<void> {
    this.round = await this.api.getRound(this.round.round_id);
    const kept = new Map(this.entries.map((e) => [e.sentence.sentence_id, e]));
    this.entries = this.round.sentences.map((s) => {
      const old = kept.get(s.sentence_id);
      if (old && s.ul === null && old.state !== "stored") {
        return old;
      }
      return new UlEntry(s);
    });
  }

  submit(entry: UlEntry): Promise<boolean> {
    return entry.submit(this.api, this.round.round_id);
  }
}

/** Client-side judging session state.
 *
 * The document queue is exactly the server's presentation order and is
 * never reordered locally. Grades apply optimistically and are queued;
 * the queue flushes to the server in first-in-first-out order, stops at
 * the first failure, and must drain before the session will switch
 * topics, so nothing entered is ever dropped. A retried send after a
 * lost response may duplicate an event, which is harmless because the
 * server log replays latest-wins with the same grade.
 */

import type { JudgmentAck, PoolView } from "./api.js";

export interface PendingJudgment {
  topicId: string;
  docId: string;
  grade: number;
}

/** The slice of the API the session needs; tests substitute a fake. */
export interface JudgeApi {
  pool(topicId: string): Promise<PoolView>;
  judge(topicId: string, docId: string, grade: number): Promise<JudgmentAck>;
}

export const GRADE_VALUES = [2, 1, 0, -1] as const;

export class JudgingSession {
  private topicId: string | null = null;
  private queue: string[] = [];
  private grades = new Map<string, number>();
  private pending: PendingJudgment[] = [];
  private cursor = 0;
  private acks = 0;

  constructor(private readonly api: JudgeApi) {}

  get currentTopic(): string | null {
    return this.topicId;
  }

  /** Server presentation order, exactly as received. */
  get docQueue(): readonly string[] {
    return this.queue;
  }

  get position(): number {
    return this.cursor;
  }

  get currentDoc(): string | null {
    return this.queue[this.cursor] ?? null;
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  /** Acknowledged judgment events so far, for the one-ack-per-grade contract. */
  get ackCount(): number {
    return this.acks;
  }

  gradeOf(docId: string): number | undefined {
    return this.grades.get(docId);
  }

  judgedCount(): number {
    return this.queue.filter((doc) => this.grades.has(doc)).length;
  }

  progress(): { judged: number; total: number } {
    return { judged: this.judgedCount(), total: this.queue.length };
  }

  /** Grade counts over the current queue, for the summary view. */
  distribution(): Record<"2" | "1" | "0" | "-1", number> {
    const counts: Record<"2" | "1" | "0" | "-1", number> = {
      "2": 0,
      "1": 0,
      "0": 0,
      "-1": 0,
    };
    for (const doc of this.queue) {
      const grade = this.grades.get(doc);
      if (grade !== undefined) {
        counts[String(grade) as keyof typeof counts] += 1;
      }
    }
    return counts;
  }

  /** Flush pending judgments, then load the topic's pool.
   *
   * Refuses to switch while unsent judgments remain, so going offline
   * never loses work: the caller keeps the current topic and retries.
   */
  async openTopic(topicId: string): Promise<void> {
    await this.flush();
    if (this.pending.length > 0) {
      throw new Error(
        `${this.pending.length} unsent judgment(s) for ${this.topicId}; ` +
          "retry before switching topics",
      );
    }
    const pool = await this.api.pool(topicId);
    this.topicId = pool.topic_id;
    this.queue = [...pool.doc_ids];
    this.grades = new Map(
      Object.entries(pool.grades).map(([doc, grade]) => [doc, grade]),
    );
    this.cursor = Math.max(
      0,
      this.queue.findIndex((doc) => !this.grades.has(doc)),
    );
  }

  /** Record a grade for a document: optimistic local state plus one
   * queued event. Returns true once the event is acknowledged, false if
   * it is still queued because the server was unreachable.
   */
  async judgeDoc(docId: string, grade: number): Promise<boolean> {
    if (this.topicId === null) throw new Error("no topic open");
    if (!this.queue.includes(docId)) {
      throw new Error(`doc ${docId} is not in the queue of ${this.topicId}`);
    }
    if (!GRADE_VALUES.includes(grade as (typeof GRADE_VALUES)[number])) {
      throw new Error(`grade ${grade} is not one of ${GRADE_VALUES.join(", ")}`);
    }
    this.grades.set(docId, grade);
    this.pending.push({ topicId: this.topicId, docId, grade });
    const before = this.pending.length;
    const sent = await this.flush();
    return sent >= before;
  }

  /** Grade the document under the cursor. */
  async gradeCurrent(grade: number): Promise<boolean> {
    const doc = this.currentDoc;
    if (doc === null) throw new Error("no document under the cursor");
    return this.judgeDoc(doc, grade);
  }

  /** Send queued judgments in order; stop at the first failure.
   * Returns how many were acknowledged on this call.
   */
  async flush(): Promise<number> {
    let sent = 0;
    while (this.pending.length > 0) {
      const head = this.pending[0]!;
      try {
        await this.api.judge(head.topicId, head.docId, head.grade);
      } catch {
        return sent;
      }
      this.pending.shift();
      this.acks += 1;
      sent += 1;
    }
    return sent;
  }

  next(): boolean {
    if (this.cursor + 1 >= this.queue.length) return false;
    this.cursor += 1;
    return true;
  }

  previous(): boolean {
    if (this.cursor === 0) return false;
    this.cursor -= 1;
    return true;
  }

  goTo(docId: string): void {
    const index = this.queue.indexOf(docId);
    if (index < 0) throw new Error(`doc ${docId} is not in the queue`);
    this.cursor = index;
  }
}

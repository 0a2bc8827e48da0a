// Coding-panel controller: queue advance, code assignment (keyboard
// first), saturation indicator, and optimistic-concurrency recovery.
//
// Every mutation goes through the API with the session's expected ordinal;
// a 409 means another writer (or a retried request) advanced the log, so
// the controller refreshes the session and retries the command once.

import { ApiClient, ApiError } from "./api.js";
import type { SampleId, SessionView } from "./types.js";

export interface AssignOptions {
  memo?: string;
  create?: boolean;
  description?: string;
  matchesCategory?: boolean;
}

export class CodingController {
  private session: SessionView | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
  ) {}

  get current(): SessionView {
    if (!this.session) throw new Error("session not loaded");
    return this.session;
  }

  async refresh(): Promise<SessionView> {
    this.session = await this.api.getSession(this.sessionId);
    return this.session;
  }

  /** Next pending sample ids, for the queue preview. */
  queuePreview(count = 5): SampleId[] {
    return this.current.queue.slice(0, count);
  }

  queueExhausted(): boolean {
    return this.current.queue.length === 0;
  }

  saturation(): { new_codes_in_window: number; saturated: boolean } {
    return this.current.saturation;
  }

  /** Number keys 1..9 map to the first nine codes in creation order. */
  codeForKey(key: string): string | null {
    const index = Number(key) - 1;
    if (!Number.isInteger(index) || index < 0 || index > 8) return null;
    return this.current.codebook[index]?.name ?? null;
  }

  private async withConflictRetry<T>(command: (ordinal: number) => Promise<T>): Promise<T> {
    try {
      return await command(this.current.ordinal + 1);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.refresh();
        return await command(this.current.ordinal + 1);
      }
      throw error;
    }
  }

  /** Dequeue the next sample per the session strategy. */
  async nextSample(): Promise<SampleId | null> {
    if (this.queueExhausted()) return null;
    const ack = await this.withConflictRetry((ordinal) =>
      this.api.postEvent(this.sessionId, "next-sample", {}, ordinal),
    );
    await this.refresh();
    return (ack.result.sample as SampleId) ?? null;
  }

  async assign(sample: SampleId, code: string, options: AssignOptions = {}): Promise<void> {
    await this.withConflictRetry((ordinal) =>
      this.api.postEvent(
        this.sessionId,
        "assign-code",
        {
          sample,
          code,
          memo: options.memo ?? "",
          create: options.create ?? false,
          description: options.description ?? "",
          matches_category: options.matchesCategory ?? false,
        },
        ordinal,
      ),
    );
    await this.refresh();
  }

  async createCode(name: string, description = "", matchesCategory = false): Promise<void> {
    await this.withConflictRetry((ordinal) =>
      this.api.postEvent(
        this.sessionId,
        "create-code",
        { name, description, matches_category: matchesCategory },
        ordinal,
      ),
    );
    await this.refresh();
  }
}

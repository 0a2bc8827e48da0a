// Offline action queue: mutations attempted while the server is
// unreachable are queued and replayed strictly in order once a flush
// succeeds. Replay stops at the first failure so order is never violated.

export interface QueuedAction {
  key: string;
  run: () => Promise<void>;
}

export class OfflineQueue {
  private readonly pending: QueuedAction[] = [];
  private flushing = false;

  get length(): number {
    return this.pending.length;
  }

  keys(): string[] {
    return this.pending.map((action) => action.key);
  }

  /**
   * Run the action now; if it fails with a network-style error, queue it.
   * Actions queued behind earlier failures are not attempted out of order.
   */
  async submit(action: QueuedAction, isOffline: (error: unknown) => boolean): Promise<boolean> {
    if (this.pending.length > 0) {
      this.pending.push(action);
      return false;
    }
    try {
      await action.run();
      return true;
    } catch (error) {
      if (isOffline(error)) {
        this.pending.push(action);
        return false;
      }
      throw error;
    }
  }

  /** Replay pending actions in order; stops at the first failure. */
  async flush(): Promise<number> {
    if (this.flushing) return 0;
    this.flushing = true;
    let replayed = 0;
    try {
      while (this.pending.length > 0) {
        const action = this.pending[0];
        await action.run(); // a throw leaves the action queued
        this.pending.shift();
        replayed += 1;
      }
    } catch {
      // remaining actions stay queued for the next flush
    } finally {
      this.flushing = false;
    }
    return replayed;
  }
}

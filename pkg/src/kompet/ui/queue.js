import { ApiError } from "./api.js";
/** Optimistic local application of a decision, mirroring the server rules. */
export function applyLocally(item, action) {
    switch (action.kind) {
        case "accept":
            return { ...item, status: "accepted", gold_label: item.silver_label };
        case "correct":
            return { ...item, status: "corrected", gold_label: action.label };
        case "flag-missing":
            return { ...item, status: "flagged-missing", gold_label: "K99" };
    }
}
/**
 * Page of review items plus the optimistic-write queue.
 *
 * Decisions apply locally at once and drain to the server FIFO, one in
 * flight at a time; a rejected write rolls the item back, surfaces the
 * error, and refetches the server's copy. The decision log on the server
 * is the only source of truth.
 */
export class ReviewQueue {
    constructor(api, reviewerId) {
        this.api = api;
        this.reviewerId = reviewerId;
        this.items = [];
        this.cursor = 0;
        this.filter = null;
        this.pending = [];
        this.lastError = null;
        this.onChange = () => { };
        this.tail = Promise.resolve();
    }
    async load(filter = null, offset = 0, limit = 50) {
        const page = await this.api.items(filter, offset, limit);
        this.items = page.items;
        this.filter = filter;
        this.cursor = Math.min(this.cursor, Math.max(0, this.items.length - 1));
        this.onChange();
    }
    current() {
        return this.items[this.cursor] ?? null;
    }
    pendingIds() {
        return new Set(this.pending.map((w) => w.span_id));
    }
    next() {
        if (!this.items.length)
            return;
        // Prefer the next still-pending item; otherwise just step forward.
        for (let i = this.cursor + 1; i < this.items.length; i++) {
            if (this.items[i].status === "pending") {
                this.cursor = i;
                this.onChange();
                return;
            }
        }
        this.cursor = Math.min(this.cursor + 1, this.items.length - 1);
        this.onChange();
    }
    prev() {
        this.cursor = Math.max(0, this.cursor - 1);
        this.onChange();
    }
    /** Apply optimistically, enqueue the write, advance to the next pending item. */
    submit(action) {
        const item = this.current();
        if (!item)
            return;
        const index = this.cursor;
        this.pending.push({ span_id: item.span_id, action, prev: item });
        this.items[index] = applyLocally(item, action);
        this.lastError = null;
        this.next();
        this.tail = this.tail.then(() => this.flushOne());
    }
    /** Resolves once every enqueued write has been acknowledged or rolled back. */
    async drained() {
        while (this.pending.length > 0) {
            await this.tail;
        }
    }
    replaceItem(spanId, item) {
        const index = this.items.findIndex((x) => x.span_id === spanId);
        if (index >= 0)
            this.items[index] = item;
    }
    async flushOne() {
        const write = this.pending[0];
        if (!write)
            return;
        try {
            const serverItem = await this.api.decide(write.span_id, {
                label: write.action.kind === "correct" ? write.action.label : null,
                action: write.action.kind === "correct" ? "correct" : write.action.kind,
                reviewer_id: this.reviewerId,
            });
            this.pending.shift();
            // A newer optimistic write for the same span supersedes the response.
            if (!this.pending.some((w) => w.span_id === write.span_id)) {
                this.replaceItem(write.span_id, serverItem);
            }
        }
        catch (err) {
            // Roll back this write and any stacked on the same span, then refetch.
            this.pending = this.pending.filter((w) => w.span_id !== write.span_id);
            this.replaceItem(write.span_id, write.prev);
            this.lastError = err instanceof ApiError ? err.message : String(err);
            try {
                this.replaceItem(write.span_id, await this.api.item(write.span_id));
            }
            catch {
                // Server copy unavailable; the rollback snapshot stands.
            }
        }
        this.onChange();
    }
}

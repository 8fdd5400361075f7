import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ReviewQueue, applyLocally } from "../src/queue.js";
import { MockBackend, makeItem } from "./mock_backend.js";

function setup(n = 4) {
  const backend = new MockBackend(
    Array.from({ length: n }, (_, i) => makeItem(`jp1:${i}`)),
  );
  const api = new ApiClient(backend.fetcher);
  const queue = new ReviewQueue(api, "tester");
  return { backend, api, queue };
}

describe("applyLocally", () => {
  it("mirrors the server decision rules", () => {
    const item = makeItem("x:0");
    expect(applyLocally(item, { kind: "accept" }).gold_label).toBe("K06");
    expect(applyLocally(item, { kind: "accept" }).status).toBe("accepted");
    expect(applyLocally(item, { kind: "correct", label: "S5" }).gold_label).toBe("S5");
    expect(applyLocally(item, { kind: "flag-missing" }).gold_label).toBe("K99");
    expect(applyLocally(item, { kind: "flag-missing" }).status).toBe("flagged-missing");
  });
});

describe("ReviewQueue", () => {
  it("loads a page and tracks the cursor", async () => {
    const { queue } = setup();
    await queue.load();
    expect(queue.items).toHaveLength(4);
    expect(queue.current()?.span_id).toBe("jp1:0");
    queue.next();
    expect(queue.current()?.span_id).toBe("jp1:1");
    queue.prev();
    expect(queue.current()?.span_id).toBe("jp1:0");
  });

  it("applies optimistically and advances to the next pending item", async () => {
    const { queue } = setup();
    await queue.load();
    queue.submit({ kind: "accept" });
    expect(queue.items[0].status).toBe("accepted"); // before any ack
    expect(queue.current()?.span_id).toBe("jp1:1");
    expect(queue.pendingIds().has("jp1:0")).toBe(true);
    await queue.drained();
    expect(queue.pendingIds().size).toBe(0);
    expect(queue.items[0].decided_by).toBe("tester"); // server copy swapped in
  });

  it("converges to a fresh GET after all pending writes drain", async () => {
    const { backend, api, queue } = setup(5);
    await queue.load();
    queue.submit({ kind: "accept" });
    queue.submit({ kind: "correct", label: "S5" });
    queue.submit({ kind: "flag-missing" });
    queue.submit({ kind: "accept" });
    await queue.drained();
    const fresh = await api.items(null, 0, 50);
    expect(queue.items).toEqual(fresh.items);
    expect(backend.decisionCount).toBe(4);
  });

  it("drains writes in submission order", async () => {
    const { backend, queue } = setup(3);
    await queue.load();
    const seen: string[] = [];
    const original = backend.fetcher;
    backend.fetcher = async (url, init) => {
      if (init?.method === "POST") seen.push(decodeURIComponent(url.split("/")[3]));
      return original(url, init);
    };
    const api = new ApiClient(backend.fetcher);
    const ordered = new ReviewQueue(api, "tester");
    await ordered.load();
    ordered.submit({ kind: "accept" });
    ordered.submit({ kind: "accept" });
    ordered.submit({ kind: "accept" });
    await ordered.drained();
    expect(seen).toEqual(["jp1:0", "jp1:1", "jp1:2"]);
  });

  it("rolls back, surfaces the error, and refetches on server failure", async () => {
    const { backend, queue } = setup();
    await queue.load();
    backend.failNextDecision = 404;
    queue.submit({ kind: "correct", label: "S5" });
    expect(queue.items[0].status).toBe("corrected"); // optimistic
    await queue.drained();
    expect(queue.lastError).toContain("injected failure 404");
    expect(queue.items[0].status).toBe("pending"); // rolled back + refetched
    expect(queue.pendingIds().size).toBe(0);
  });

  it("a failed write does not block later writes to other items", async () => {
    const { backend, queue } = setup(3);
    await queue.load();
    backend.failNextDecision = 400;
    queue.submit({ kind: "accept" }); // jp1:0, will fail
    queue.submit({ kind: "accept" }); // jp1:1, should land
    await queue.drained();
    expect(queue.items[0].status).toBe("pending");
    expect(queue.items[1].status).toBe("accepted");
  });

  it("status filter loads only matching items", async () => {
    const { queue, api } = setup(3);
    await queue.load();
    queue.submit({ kind: "accept" });
    await queue.drained();
    const page = await api.items("accepted", 0, 50);
    expect(page.items.map((i) => i.span_id)).toEqual(["jp1:0"]);
    await queue.load("accepted");
    expect(queue.items.map((i) => i.span_id)).toEqual(["jp1:0"]);
  });

  it("surfaces labels straight from the backend", async () => {
    const { api } = setup();
    const labels = await api.labels();
    expect(labels.groups["S"]).toContain("S5");
    expect(labels.labels).toContain("K99");
  });
});

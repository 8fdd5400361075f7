export class ApiError extends Error {
    constructor(message, status) {
        super(message);
        this.status = status;
    }
}
async function parseError(resp) {
    let message = `HTTP ${resp.status}`;
    try {
        const body = (await resp.json());
        if (body && typeof body.error === "string")
            message = body.error;
    }
    catch {
        // response body was not JSON; keep the status message
    }
    return new ApiError(message, resp.status);
}
export class ApiClient {
    constructor(fetcher, base = "") {
        this.fetcher = fetcher;
        this.base = base;
    }
    async get(path) {
        const resp = await this.fetcher(this.base + path);
        if (resp.status !== 200)
            throw await parseError(resp);
        return (await resp.json());
    }
    items(filter = null, offset = 0, limit = 50) {
        const params = new URLSearchParams({ offset: String(offset), limit: String(limit) });
        if (filter)
            params.set("status", filter);
        return this.get(`/api/items?${params.toString()}`);
    }
    item(spanId) {
        return this.get(`/api/items/${encodeURIComponent(spanId)}`);
    }
    progress() {
        return this.get("/api/progress");
    }
    labels() {
        return this.get("/api/labels");
    }
    exportUrl() {
        return `${this.base}/api/export`;
    }
    async decide(spanId, body) {
        const resp = await this.fetcher(`${this.base}/api/items/${encodeURIComponent(spanId)}/decision`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
        if (resp.status !== 200)
            throw await parseError(resp);
        return (await resp.json());
    }
}

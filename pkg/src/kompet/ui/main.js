import { ApiClient } from "./api.js";
import { commandFor } from "./keyboard.js";
import { ReviewQueue } from "./queue.js";
import { renderItemSafe, renderProgress } from "./render.js";
const app = document.getElementById("app");
const api = new ApiClient((url, init) => fetch(url, init));
const reviewer = localStorage.getItem("kompet-reviewer") || "reviewer";
const queue = new ReviewQueue(api, reviewer);
let labels = null;
let progress = null;
let pickerOpen = false;
function render() {
    const item = queue.current();
    const parts = [
        `<header class="top">
       <h1>kompet review</h1>
       <span class="hint">single session only: concurrent tabs conflict (latest decision wins)</span>
       <a class="export" href="${api.exportUrl()}" download="gold.jsonl">export gold</a>
     </header>`,
        progress ? renderProgress(progress) : "",
        queue.lastError ? `<div class="toast error">${queue.lastError}</div>` : "",
        renderItemSafe(item, labels, {
            pendingWrite: item !== null && queue.pendingIds().has(item.span_id),
            pickerOpen,
        }),
        `<nav class="filters">` +
            ["all", "pending", "accepted", "corrected", "flagged-missing"]
                .map((f) => `<button data-filter="${f}">${f}</button>`)
                .join("") +
            `</nav>`,
    ];
    app.innerHTML = parts.join("\n");
}
async function refreshProgress() {
    try {
        progress = await api.progress();
    }
    catch {
        progress = null;
    }
    render();
}
function submitAndAdvance(action) {
    pickerOpen = false;
    queue.submit(action);
    void queue.drained().then(refreshProgress);
    render();
}
document.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLInputElement)
        return;
    const command = commandFor(event.key);
    if (!command)
        return;
    event.preventDefault();
    const item = queue.current();
    switch (command.kind) {
        case "accept":
            submitAndAdvance({ kind: "accept" });
            break;
        case "flag":
            submitAndAdvance({ kind: "flag-missing" });
            break;
        case "picker":
            pickerOpen = !pickerOpen;
            render();
            break;
        case "close":
            pickerOpen = false;
            render();
            break;
        case "next":
            queue.next();
            break;
        case "prev":
            queue.prev();
            break;
        case "alternative": {
            const alt = item?.alternatives[command.index];
            if (alt)
                submitAndAdvance({ kind: "correct", label: alt.coarse });
            break;
        }
    }
});
app.addEventListener("click", (event) => {
    const target = event.target;
    const button = target.closest("button");
    if (!button)
        return;
    const label = button.dataset.label;
    if (label) {
        submitAndAdvance({ kind: "correct", label });
        return;
    }
    switch (button.dataset.action) {
        case "accept":
            submitAndAdvance({ kind: "accept" });
            break;
        case "flag-missing":
            submitAndAdvance({ kind: "flag-missing" });
            break;
        case "picker":
            pickerOpen = !pickerOpen;
            render();
            break;
        case "next":
            queue.next();
            break;
        case "prev":
            queue.prev();
            break;
    }
    const filter = button.dataset.filter;
    if (filter) {
        void queue.load(filter === "all" ? null : filter).then(render);
    }
});
queue.onChange = render;
async function bootstrap() {
    try {
        labels = await api.labels();
    }
    catch {
        labels = null; // picker disabled without the backend label set
    }
    await queue.load();
    await refreshProgress();
}
void bootstrap();

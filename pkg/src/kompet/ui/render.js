// Pure HTML-string renderers: no DOM access, so they are directly testable.
export function escapeHtml(s) {
    return s
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}
/**
 * Sentence with the target span highlighted and nested sibling spans drawn
 * as distinct layered underlines (wider spans take lower layers).
 */
export function renderSentence(ctx, targetKind) {
    const marks = [
        { start: ctx.start, end: ctx.end, kind: targetKind, target: true, layer: 0 },
        ...ctx.siblings.map((s) => ({ ...s, target: false, layer: 0 })),
    ];
    marks.sort((a, b) => b.end - b.start - (a.end - a.start) || a.start - b.start);
    marks.forEach((m, i) => (m.layer = i));
    const pieces = ctx.tokens.map((token, i) => {
        let html = escapeHtml(token);
        const covering = marks.filter((m) => m.start <= i && i < m.end);
        for (const m of covering.slice().reverse()) {
            const cls = ["mark", `layer-${m.layer}`, `kind-${m.kind}`, m.target ? "target" : "sibling"];
            html = `<span class="${cls.join(" ")}">${html}</span>`;
        }
        return `<span class="tok">${html}</span>`;
    });
    return `<p class="sentence">${pieces.join(" ")}</p>`;
}
export function renderAlternatives(alts) {
    if (!alts.length)
        return "";
    const rows = alts
        .map((a, i) => `<li><button class="alt" data-label="${escapeHtml(a.coarse)}">` +
        `<kbd>${i + 1}</kbd> ${escapeHtml(a.coarse)} · ${escapeHtml(a.label)}` +
        `<span class="dist">d=${a.distance}</span> <span class="code">${escapeHtml(a.code)}</span>` +
        `</button></li>`)
        .join("");
    return `<ul class="alternatives">${rows}</ul>`;
}
/** Label picker grouped by family; only backend-delivered tags appear. */
export function renderPicker(labels, current) {
    const order = ["S", "K", "A", "L", "artifact"];
    const groups = order
        .filter((g) => (labels.groups[g] ?? []).length > 0)
        .map((g) => {
        const buttons = labels.groups[g]
            .map((tag) => {
            const active = tag === current ? " active" : "";
            return `<button class="pick${active}" data-label="${escapeHtml(tag)}">${escapeHtml(tag)}</button>`;
        })
            .join("");
        return `<div class="picker-group"><span class="group-name">${g}</span>${buttons}</div>`;
    })
        .join("");
    return `<div class="picker">${groups}</div>`;
}
export function renderProgress(p) {
    const pct = p.total ? Math.round((100 * p.decided) / p.total) : 0;
    const counts = Object.keys(p.by_status)
        .map((s) => `<span class="count ${s}">${s}: ${p.by_status[s]}</span>`)
        .join(" ");
    return (`<div class="progress"><div class="bar" style="width:${pct}%"></div>` +
        `<span class="num">${p.decided}/${p.total}</span> ${counts}</div>`);
}
function statusBadge(item, pendingWrite) {
    const unsaved = pendingWrite ? " unsaved" : "";
    if (item.status === "pending")
        return `<span class="badge pending${unsaved}">pending</span>`;
    const label = item.gold_label ? ` → ${escapeHtml(item.gold_label)}` : "";
    return `<span class="badge ${item.status}${unsaved}">${item.status}${label}${pendingWrite ? " (saving…)" : ""}</span>`;
}
export function renderItem(item, labels, options = {}) {
    const sentence = item.context
        ? renderSentence(item.context, item.kind)
        : `<p class="sentence lone">${escapeHtml(item.surface)}</p>`;
    const match = item.match
        ? `<span class="match">matched <code>${escapeHtml(item.match.code)}</code> at d=${item.match.distance}</span>`
        : `<span class="match missing">no taxonomy match</span>`;
    const picker = options.pickerOpen && labels ? renderPicker(labels, item.gold_label ?? item.silver_label) : "";
    return `
<article class="item" data-span="${escapeHtml(item.span_id)}">
  <header>
    <code class="span-id">${escapeHtml(item.span_id)}</code>
    <span class="kind ${item.kind}">${escapeHtml(item.kind)}</span>
    ${statusBadge(item, options.pendingWrite ?? false)}
  </header>
  ${sentence}
  <div class="silver">silver <strong>${escapeHtml(item.silver_label)}</strong> ${match}</div>
  ${renderAlternatives(item.alternatives)}
  ${picker}
  <footer class="actions">
    <button data-action="accept"><kbd>a</kbd> accept</button>
    <button data-action="picker"><kbd>c</kbd> correct…</button>
    <button data-action="flag-missing"><kbd>f</kbd> flag missing</button>
    <button data-action="prev"><kbd>k</kbd> prev</button>
    <button data-action="next"><kbd>j</kbd> next</button>
  </footer>
</article>`;
}
/** Never lets one malformed item take the queue down. */
export function renderItemSafe(item, labels, options = {}) {
    if (item === null)
        return `<article class="item empty">queue empty</article>`;
    try {
        return renderItem(item, labels, options);
    }
    catch (err) {
        const id = item && typeof item.span_id === "string" ? item.span_id : "?";
        return `<article class="item error">cannot render ${escapeHtml(id)}: ${escapeHtml(String(err))}</article>`;
    }
}

"""HTTP review service: correct silver labels into gold, one decision at a time.

Decisions append to a JSON-lines log before the response is acknowledged
(write-ahead); item statuses are a pure function of the log under a
latest-wins rule, so a restart replays the log and reproduces the session.
The server also serves the compiled review UI when an assets directory is
available, making `kompet serve` self-contained.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Iterable
from urllib.parse import parse_qs, unquote, urlparse

from .corpus import Corpus, sibling_spans
from .errors import InputError, KompetError
from .matcher import fetch_skill, retrieve_candidates
from .supervise import LabeledRow, write_labeled
from .taxonomy import (
    ARTIFACT_TAGS,
    COARSE_TAGS,
    MISSING_TAG,
    TaxonomyIndex,
    coarse_label,
    is_coarse_tag,
)

ACTIONS = ("accept", "correct", "flag-missing")
STATUSES = ("pending", "accepted", "corrected", "flagged-missing")

_ACTION_TO_STATUS = {
    "accept": "accepted",
    "correct": "corrected",
    "flag-missing": "flagged-missing",
}


@dataclass(frozen=True)
class ReviewDecision:
    span_id: str
    label: str
    action: str
    timestamp: str
    reviewer_id: str

    def to_dict(self) -> dict:
        return {
            "span_id": self.span_id,
            "label": self.label,
            "action": self.action,
            "timestamp": self.timestamp,
            "reviewer_id": self.reviewer_id,
        }


class NotFound(KompetError):
    pass


class BadRequest(KompetError):
    pass


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class ReviewStore:
    """Silver items plus an append-only decision log; single-writer appends."""

    def __init__(
        self,
        silver: Iterable[LabeledRow],
        log_path: str | Path,
        *,
        corpus: Corpus | None = None,
        index: TaxonomyIndex | None = None,
        k_alternatives: int = 5,
    ):
        self._rows: list[LabeledRow] = list(silver)
        if not self._rows:
            raise InputError("no silver items to review")
        ids = [r.span_id for r in self._rows]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate span_ids in silver file")
        self._log_path = Path(log_path)
        self._lock = threading.Lock()
        self._decisions: dict[str, ReviewDecision] = {}
        self._context: dict[str, dict | None] = {}
        self._alternatives: dict[str, list[dict]] = {}
        self._build_context(corpus, index, k_alternatives)
        self._replay()

    # -- construction ------------------------------------------------------

    def _build_context(self, corpus, index, k_alternatives):
        span_by_id = {}
        if corpus is not None:
            span_by_id = {sp.span_id: sp for sp in corpus.spans}
        for row in self._rows:
            sp = span_by_id.get(row.span_id)
            if sp is None:
                self._context[row.span_id] = None
            else:
                posting = corpus.get_posting(sp.posting_id)
                self._context[row.span_id] = {
                    "sentence_index": sp.sentence_index,
                    "tokens": list(posting.sentences[sp.sentence_index]),
                    "start": sp.start,
                    "end": sp.end,
                    "siblings": [
                        {"start": sib.start, "end": sib.end, "kind": sib.kind}
                        for sib in sibling_spans(corpus, sp)
                    ],
                }
            alts: list[dict] = []
            if index is not None:
                for concept in retrieve_candidates(row.surface, row.kind, index, k=k_alternatives):
                    match = fetch_skill(row.surface, row.kind, [concept], language=index.language)
                    if match is None:
                        continue
                    try:
                        coarse = coarse_label(concept)
                    except KompetError:
                        continue
                    alts.append(
                        {
                            "code": concept.code,
                            "label": match.matched_label,
                            "coarse": coarse,
                            "distance": match.distance,
                        }
                    )
            self._alternatives[row.span_id] = alts

    def _replay(self) -> None:
        if not self._log_path.exists():
            return
        lines = self._log_path.read_text(encoding="utf-8").splitlines()
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                decision = ReviewDecision(
                    span_id=obj["span_id"],
                    label=obj["label"],
                    action=obj["action"],
                    timestamp=obj.get("timestamp", ""),
                    reviewer_id=obj.get("reviewer_id", ""),
                )
            except (json.JSONDecodeError, KeyError):
                if i == len(lines) - 1:
                    # Torn final line from a crash mid-append: unacknowledged, drop it.
                    continue
                raise InputError(f"decision log line {i + 1} is corrupt")
            if decision.span_id in {r.span_id for r in self._rows}:
                self._decisions[decision.span_id] = decision

    # -- queries -----------------------------------------------------------

    def _status(self, span_id: str) -> str:
        d = self._decisions.get(span_id)
        return _ACTION_TO_STATUS[d.action] if d else "pending"

    def item(self, span_id: str) -> dict:
        row = next((r for r in self._rows if r.span_id == span_id), None)
        if row is None:
            raise NotFound(f"unknown span_id {span_id!r}")
        d = self._decisions.get(span_id)
        return {
            "span_id": row.span_id,
            "surface": row.surface,
            "kind": row.kind,
            "silver_label": row.label,
            "missing": row.missing,
            "match": (
                {"code": row.match_code, "distance": row.match_distance}
                if row.match_code is not None
                else None
            ),
            "context": self._context.get(span_id),
            "alternatives": self._alternatives.get(span_id, []),
            "status": self._status(span_id),
            "gold_label": d.label if d else None,
            "decided_by": d.reviewer_id if d else None,
            "decided_at": d.timestamp if d else None,
        }

    def items(self, status: str | None = None, offset: int = 0, limit: int = 50) -> dict:
        if status is not None and status not in STATUSES:
            raise BadRequest(f"unknown status filter {status!r}")
        ids = [
            r.span_id
            for r in self._rows
            if status is None or self._status(r.span_id) == status
        ]
        page = ids[offset : offset + limit]
        return {
            "items": [self.item(sid) for sid in page],
            "total": len(ids),
            "offset": offset,
            "limit": limit,
        }

    def progress(self) -> dict:
        by_status = {s: 0 for s in STATUSES}
        for r in self._rows:
            by_status[self._status(r.span_id)] += 1
        decided = len(self._rows) - by_status["pending"]
        return {"total": len(self._rows), "decided": decided, "by_status": by_status}

    # -- mutation ----------------------------------------------------------

    def record_decision(self, span_id: str, label: str | None, action: str, reviewer_id: str) -> dict:
        """Validate, append to the log (write-ahead), then update state."""
        row = next((r for r in self._rows if r.span_id == span_id), None)
        if row is None:
            raise NotFound(f"unknown span_id {span_id!r}")
        if action not in ACTIONS:
            raise BadRequest(f"unknown action {action!r}")
        if action == "accept":
            label = row.label if label is None else label
            if label != row.label:
                raise BadRequest("accept cannot change the label; use action 'correct'")
        elif action == "flag-missing":
            label = MISSING_TAG if label is None else label
        if label is None:
            raise BadRequest("action 'correct' requires a label")
        if not is_coarse_tag(label):
            raise BadRequest(f"invalid label {label!r}")
        decision = ReviewDecision(
            span_id=span_id,
            label=label,
            action=action,
            timestamp=_utc_now(),
            reviewer_id=reviewer_id,
        )
        with self._lock:
            with open(self._log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(decision.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._decisions[span_id] = decision
        return self.item(span_id)

    # -- export ------------------------------------------------------------

    def export_rows(self) -> list[LabeledRow]:
        """Complete supervise-format export: decided spans as gold, rest as silver."""
        out = []
        for row in self._rows:
            d = self._decisions.get(row.span_id)
            if d is None:
                out.append(row)
                continue
            flagged = d.action == "flag-missing"
            out.append(
                LabeledRow(
                    span_id=row.span_id,
                    surface=row.surface,
                    kind=row.kind,
                    label=d.label,
                    provenance="gold",
                    missing=True if flagged else row.missing,
                    match_code=None if flagged else row.match_code,
                    match_distance=None if flagged else row.match_distance,
                )
            )
        return out


def label_set() -> dict:
    """The coarse label universe, grouped for the picker UI."""
    groups: dict[str, list[str]] = {"S": [], "K": [], "A": [], "L": [], "artifact": []}
    for tag in COARSE_TAGS:
        if tag in ARTIFACT_TAGS:
            groups["artifact"].append(tag)
        else:
            groups[tag[0]].append(tag)
    return {"labels": list(COARSE_TAGS), "groups": groups}


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n").encode("utf-8")


class _Handler(BaseHTTPRequestHandler):
    store: ReviewStore
    assets_dir: Path | None = None

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, code: int, body: bytes, content_type: str = "application/json; charset=utf-8"):
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, code: int, message: str):
        self._send(code, _json_bytes({"error": message}))

    def do_GET(self):
        parsed = urlparse(self.path)
        parts = [unquote(p) for p in parsed.path.split("/") if p]
        try:
            if parts[:2] == ["api", "items"] and len(parts) == 2:
                qs = parse_qs(parsed.query)
                status = qs.get("status", [None])[0] or None
                offset = int(qs.get("offset", ["0"])[0])
                limit = int(qs.get("limit", ["50"])[0])
                self._send(200, _json_bytes(self.store.items(status, offset, limit)))
            elif parts[:2] == ["api", "items"] and len(parts) == 3:
                self._send(200, _json_bytes(self.store.item(parts[2])))
            elif parts == ["api", "progress"]:
                self._send(200, _json_bytes(self.store.progress()))
            elif parts == ["api", "labels"]:
                self._send(200, _json_bytes(label_set()))
            elif parts == ["api", "export"]:
                import io

                buf = io.StringIO()
                write_labeled(self.store.export_rows(), buf)
                self._send(200, buf.getvalue().encode("utf-8"), "application/x-ndjson; charset=utf-8")
            elif parts[:1] != ["api"]:
                self._serve_static(parts)
            else:
                self._error(404, f"no such endpoint: {parsed.path}")
        except NotFound as exc:
            self._error(404, str(exc))
        except (BadRequest, ValueError) as exc:
            self._error(400, str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            self._error(500, f"internal error: {exc}")

    def do_POST(self):
        parsed = urlparse(self.path)
        parts = [unquote(p) for p in parsed.path.split("/") if p]
        if not (parts[:2] == ["api", "items"] and len(parts) == 4 and parts[3] == "decision"):
            self._error(404, f"no such endpoint: {parsed.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length)
            try:
                body = json.loads(raw.decode("utf-8")) if raw else {}
            except (json.JSONDecodeError, UnicodeDecodeError):
                raise BadRequest("request body must be JSON")
            if not isinstance(body, dict):
                raise BadRequest("request body must be a JSON object")
            item = self.store.record_decision(
                span_id=parts[2],
                label=body.get("label"),
                action=body.get("action", ""),
                reviewer_id=str(body.get("reviewer_id", "")),
            )
            self._send(200, _json_bytes(item))
        except NotFound as exc:
            self._error(404, str(exc))
        except BadRequest as exc:
            self._error(400, str(exc))
        except OSError as exc:
            # Log write failure: the decision was not acknowledged.
            self._error(500, f"decision not recorded: {exc}")

    def _serve_static(self, parts: list[str]):
        if self.assets_dir is None:
            self._error(404, "no UI assets bundled; use the /api endpoints")
            return
        rel = "/".join(parts) or "index.html"
        target = (self.assets_dir / rel).resolve()
        if not str(target).startswith(str(self.assets_dir.resolve())) or not target.is_file():
            self._error(404, f"no such asset: {rel}")
            return
        types = {
            ".html": "text/html; charset=utf-8",
            ".js": "text/javascript; charset=utf-8",
            ".css": "text/css; charset=utf-8",
            ".map": "application/json",
            ".svg": "image/svg+xml",
        }
        ctype = types.get(target.suffix, "application/octet-stream")
        self._send(200, target.read_bytes(), ctype)


class ReviewServer:
    """Threaded HTTP server around a ReviewStore; port 0 picks a free port."""

    def __init__(self, store: ReviewStore, port: int = 7860, assets_dir: str | Path | None = None):
        handler = type(
            "BoundHandler",
            (_Handler,),
            {"store": store, "assets_dir": Path(assets_dir) if assets_dir else None},
        )
        self._httpd = ThreadingHTTPServer(("127.0.0.1", port), handler)
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    def start(self) -> None:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    def shutdown(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

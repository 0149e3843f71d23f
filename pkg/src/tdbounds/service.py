"""HTTP facade for interactive exploration.

A session is an uploaded study plus analysis settings, immutable once
created.  Creation does the expensive work up front (shortcut state
always; closure, defining family, and dual when m is small enough for
exact closure), after which bound queries, family reads, and what-if
conditioning are cheap and safe to fire concurrently.

Stdlib HTTP only: a threading server with one handler class.  Sessions
live in an in-memory LRU; an optional study directory gets a JSON
write-through per session so a restarted server can reload them on
demand.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import os
import re
import secrets
import threading
import urllib.parse
from collections import OrderedDict
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from .closure import (
    LOCAL_TESTS,
    ClosureMap,
    SetFamily,
    defining_family,
    discovery_bound,
    full_closure,
)
from .dualization import condition_on_nulls, minimal_transversals
from .shortcut import SimesShortcutState, preprocess, shortcut_bound
from .study import AnalysisConfig, HypothesisSet, PValueStudy, ValidationError

DEFAULT_M_LIMIT = 2_000_000
DEFAULT_CAPACITY = 64
# generous ceiling for request bodies; a full-size study in JSON is well under this
_MAX_BODY_BYTES = 256 * 1024 * 1024

log = logging.getLogger("tdbounds.service")


class ApiError(Exception):
    """Carries an HTTP status plus the JSON error body fields."""

    def __init__(self, status: int, code: str, message: str, field: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.field = field


@dataclass(frozen=True)
class Session:
    """Immutable per-study state; all fields fixed at creation."""

    id: str
    study: PValueStudy
    config: AnalysisConfig
    method: str
    state: SimesShortcutState
    closure: ClosureMap | None
    defining: SetFamily | None
    dual: SetFamily | None

    @property
    def exact_available(self) -> bool:
        return self.closure is not None


def _build_session(
    session_id: str, study: PValueStudy, config: AnalysisConfig, method: str
) -> Session:
    if method not in LOCAL_TESTS:
        raise ApiError(400, "validation", f"unknown method {method!r}", field="method")
    if method == "fisher" and study.m > config.closure_cap:
        raise ApiError(
            400,
            "validation",
            f"fisher bounds need exact closure, which requires m <= {config.closure_cap}",
            field="method",
        )
    state = preprocess(study, config)
    closure = define = dual = None
    if study.m <= config.closure_cap:
        closure = full_closure(study, config, method)
        define = defining_family(closure)
        dual = minimal_transversals(define)
    return Session(session_id, study, config, method, state, closure, define, dual)


class SessionStore:
    """Thread-safe LRU of sessions with optional directory write-through.

    Eviction only drops the in-memory copy; a persisted session is
    reloaded (and its artifacts recomputed) on the next request for it.
    """

    def __init__(self, capacity: int = DEFAULT_CAPACITY, study_dir: str | None = None):
        if capacity < 1:
            raise ValidationError("capacity must be >= 1", field="capacity")
        self._capacity = capacity
        self._study_dir = study_dir
        self._lock = threading.Lock()
        self._sessions: OrderedDict[str, Session] = OrderedDict()
        if study_dir is not None:
            os.makedirs(study_dir, exist_ok=True)

    def create(self, study: PValueStudy, config: AnalysisConfig, method: str) -> Session:
        session = _build_session(secrets.token_hex(8), study, config, method)
        if self._study_dir is not None:
            self._persist(session)
        with self._lock:
            self._sessions[session.id] = session
            while len(self._sessions) > self._capacity:
                self._sessions.popitem(last=False)
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is not None:
                self._sessions.move_to_end(session_id)
                return session
        session = self._load(session_id)
        if session is None:
            raise ApiError(404, "not_found", f"no session {session_id!r}")
        with self._lock:
            # a racing reload of the same id yields an equivalent session
            self._sessions[session_id] = session
            while len(self._sessions) > self._capacity:
                self._sessions.popitem(last=False)
        return session

    def _path(self, session_id: str) -> str:
        return os.path.join(self._study_dir, f"{session_id}.json")

    def _persist(self, session: Session) -> None:
        payload = {
            "id": session.id,
            "labels": list(session.study.labels),
            "pvalues": [float(p) for p in session.study.pvalues],
            "alpha": session.config.alpha,
            "method": session.method,
        }
        with open(self._path(session.id), "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    def _load(self, session_id: str) -> Session | None:
        if self._study_dir is None or not re.fullmatch(r"[0-9a-f]{16}", session_id):
            return None
        try:
            with open(self._path(session_id), encoding="utf-8") as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return None
        study = PValueStudy(tuple(payload["labels"]), np.asarray(payload["pvalues"], dtype=float))
        config = AnalysisConfig(alpha=payload["alpha"])
        return _build_session(session_id, study, config, payload["method"])


def _family_labels(family: SetFamily, study: PValueStudy) -> list[list[str]]:
    return [[study.labels[i] for i in s.indices] for s in family.sets]


def _selection_from_ids(study: PValueStudy, ids: str) -> HypothesisSet:
    labels = [part for part in ids.split(",") if part != ""] if ids else []
    return study.subset(labels)


class _Handler(BaseHTTPRequestHandler):
    server_version = "tdbounds"
    protocol_version = "HTTP/1.1"

    # routes: (method, compiled pattern, handler name)
    _ROUTES = (
        ("POST", re.compile(r"^/api/sessions$"), "_create_session"),
        ("GET", re.compile(r"^/api/sessions/([0-9a-f]+)/bound$"), "_bound"),
        ("GET", re.compile(r"^/api/sessions/([0-9a-f]+)/defining$"), "_defining"),
        ("GET", re.compile(r"^/api/sessions/([0-9a-f]+)/dual$"), "_dual"),
        ("POST", re.compile(r"^/api/sessions/([0-9a-f]+)/condition$"), "_condition"),
    )

    def log_message(self, fmt: str, *args) -> None:
        log.debug("%s " + fmt, self.address_string(), *args)

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")

    def _dispatch(self, http_method: str) -> None:
        path, _, query = self.path.partition("?")
        try:
            for method, pattern, name in self._ROUTES:
                match = pattern.match(path)
                if match:
                    if method != http_method:
                        raise ApiError(405, "method_not_allowed", f"{http_method} not allowed")
                    getattr(self, name)(*match.groups(), query=query)
                    return
            if http_method == "GET" and self.server.ui_dir is not None:
                self._static(path)
                return
            raise ApiError(404, "not_found", f"no route {path!r}")
        except ApiError as err:
            self._send_error(err)
        except ValidationError as err:
            self._send_error(ApiError(400, "validation", str(err), field=err.field))
        except Exception:
            log.exception("unhandled error for %s %s", http_method, self.path)
            self._send_error(ApiError(500, "internal", "internal server error"))

    # -- endpoint handlers ------------------------------------------------

    def _create_session(self, query: str = "") -> None:
        payload = self._read_json()
        labels = payload.get("labels")
        pvalues = payload.get("pvalues")
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise ApiError(400, "validation", "labels must be a list of strings", field="labels")
        if not isinstance(pvalues, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in pvalues
        ):
            raise ApiError(400, "validation", "pvalues must be a list of numbers", field="pvalues")
        if len(pvalues) > self.server.m_limit:
            raise ApiError(
                413,
                "too_large",
                f"study has {len(pvalues)} p-values; this server accepts at most "
                f"{self.server.m_limit}",
                field="pvalues",
            )
        alpha = payload.get("alpha", 0.05)
        if isinstance(alpha, int) and not isinstance(alpha, bool):
            alpha = float(alpha)
        method = payload.get("method", "simes")
        study = PValueStudy(tuple(labels), np.asarray(pvalues, dtype=float))
        config = AnalysisConfig(alpha=alpha)
        session = self.server.store.create(study, config, method)
        self._send_json(
            201,
            {"id": session.id, "m": session.study.m, "exact_available": session.exact_available},
        )

    def _bound(self, session_id: str, query: str = "") -> None:
        session = self.server.store.get(session_id)
        params = _parse_query(query)
        selection = _selection_from_ids(session.study, params.get("ids", ""))
        if session.method == "simes":
            d = shortcut_bound(session.state, selection).d
        else:
            d = discovery_bound(session.closure, selection).d
        self._send_json(
            200,
            {
                "set": [session.study.labels[i] for i in selection.indices],
                "d": d,
                "alpha": session.config.alpha,
            },
        )

    def _defining(self, session_id: str, query: str = "") -> None:
        session = self._exact_session(session_id)
        self._send_json(200, {"sets": _family_labels(session.defining, session.study)})

    def _dual(self, session_id: str, query: str = "") -> None:
        session = self._exact_session(session_id)
        self._send_json(
            200,
            {
                "sets": _family_labels(session.dual, session.study),
                "truncated": session.dual.truncated,
            },
        )

    def _condition(self, session_id: str, query: str = "") -> None:
        session = self._exact_session(session_id)
        payload = self._read_json()
        known = payload.get("known_true_nulls", [])
        if not isinstance(known, list) or not all(isinstance(x, str) for x in known):
            raise ApiError(
                400,
                "validation",
                "known_true_nulls must be a list of labels",
                field="known_true_nulls",
            )
        nulls = session.study.subset(known)
        surviving, implicated = condition_on_nulls(session.dual, nulls)
        self._send_json(
            200,
            {
                "surviving": _family_labels(surviving, session.study),
                "implicated": [session.study.labels[i] for i in implicated.indices],
                "truncated": surviving.truncated,
            },
        )

    def _exact_session(self, session_id: str) -> Session:
        session = self.server.store.get(session_id)
        if not session.exact_available:
            raise ApiError(
                409,
                "exact_unavailable",
                "set families require exact closure, which is available only for "
                f"m <= {session.config.closure_cap}; this session has m = {session.study.m}",
            )
        return session

    # -- static UI ---------------------------------------------------------

    def _static(self, path: str) -> None:
        rel = path.lstrip("/") or "index.html"
        base = os.path.realpath(self.server.ui_dir)
        target = os.path.realpath(os.path.join(base, rel))
        if not (target == base or target.startswith(base + os.sep)):
            raise ApiError(404, "not_found", "no such file")
        if os.path.isdir(target):
            target = os.path.join(target, "index.html")
        if not os.path.isfile(target):
            raise ApiError(404, "not_found", f"no route {path!r}")
        ctype = mimetypes.guess_type(target)[0] or "application/octet-stream"
        with open(target, "rb") as fh:
            body = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    # -- plumbing ----------------------------------------------------------

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length > _MAX_BODY_BYTES:
            raise ApiError(413, "too_large", "request body too large")
        raw = self.rfile.read(length)
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError:
            raise ApiError(400, "bad_json", "request body is not valid JSON") from None
        if not isinstance(payload, dict):
            raise ApiError(400, "bad_json", "request body must be a JSON object")
        return payload

    def _send_json(self, status: int, obj: dict) -> None:
        body = json.dumps(obj).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, err: ApiError) -> None:
        body = {"code": err.code, "message": err.message}
        if err.field is not None:
            body["field"] = err.field
        # an unread request body would desync keep-alive parsing
        self.close_connection = True
        try:
            self._send_json(err.status, body)
        except (BrokenPipeError, ConnectionResetError):
            pass


class BoundService(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(
        self,
        address: tuple[str, int],
        store: SessionStore,
        m_limit: int = DEFAULT_M_LIMIT,
        ui_dir: str | None = None,
    ):
        super().__init__(address, _Handler)
        self.store = store
        self.m_limit = m_limit
        self.ui_dir = ui_dir


def _parse_query(query: str) -> dict[str, str]:
    params: dict[str, str] = {}
    for part in query.split("&"):
        if not part:
            continue
        key, _, value = part.partition("=")
        params[key] = urllib.parse.unquote_plus(value)
    return params


def make_server(
    port: int = 8000,
    host: str = "127.0.0.1",
    study_dir: str | None = None,
    ui_dir: str | None = None,
    m_limit: int = DEFAULT_M_LIMIT,
    capacity: int = DEFAULT_CAPACITY,
) -> BoundService:
    """Construct (but do not start) the service; port 0 picks a free port."""
    store = SessionStore(capacity=capacity, study_dir=study_dir)
    return BoundService((host, port), store, m_limit=m_limit, ui_dir=ui_dir)

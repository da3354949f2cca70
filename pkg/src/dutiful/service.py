"""The session wire protocol, on the standard library HTTP server.

All bodies and responses are JSON and carry "v": 1.  Endpoints:

    POST   /sessions                  {"v":1, "spec": <problem file text>}
    GET    /sessions/{id}
    POST   /sessions/{id}/env-move    {"v":1, "letter": [env prop names]}
    POST   /sessions/{id}/exercise-right   {"v":1, "which": "base"|"further"|"both"}
    POST   /sessions/{id}/further     {"v":1, "fd": <formula>, "fr": <formula>}
    DELETE /sessions/{id}

A created session answers with its id, or id null when the problem is
unrealizable.  Responses include a "view" snapshot of the session so a
client never needs game logic of its own.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import ltlf
from .automata import DEFAULT_STATE_CAP
from .errors import EngineError, EnvUnrealizableError
from .runtime import Session
from .specfile import SpecDocument, parse_spec_text
from .synthesis import STOP, synthesize

WIRE_VERSION = 1


@dataclass
class _Box:
    session: Session
    document: SpecDocument
    lock: threading.Lock


class PlayService:
    """Transport-free request handling, one method per endpoint."""

    def __init__(self, max_states: int = DEFAULT_STATE_CAP):
        self.max_states = max_states
        self._boxes: dict[str, _Box] = {}
        self._lock = threading.Lock()

    # -- plumbing --------------------------------------------------------

    def _box(self, sid: str) -> _Box | None:
        with self._lock:
            return self._boxes.get(sid)

    def _view(self, box: _Box) -> dict:
        return box.session.snapshot()

    # -- endpoints ---------------------------------------------------------

    def create(self, body: dict) -> tuple[int, dict]:
        text = body.get("spec")
        if not isinstance(text, str):
            return 400, {"v": WIRE_VERSION, "error": "missing spec text"}
        try:
            doc = parse_spec_text(text)
            res = synthesize(doc.problem(), self.max_states)
        except EnvUnrealizableError as e:
            return 200, {
                "v": WIRE_VERSION,
                "id": None,
                "realizable": False,
                "reason": f"env-unrealizable: {e}",
                "sizes": None,
            }
        except EngineError as e:
            return 400, {"v": WIRE_VERSION, "error": str(e)}
        if not res.realizable:
            return 200, {
                "v": WIRE_VERSION,
                "id": None,
                "realizable": False,
                "reason": "unrealizable",
                "sizes": res.sizes,
            }
        sid = uuid.uuid4().hex[:12]
        box = _Box(Session(res), doc, threading.Lock())
        with self._lock:
            self._boxes[sid] = box
        return 200, {
            "v": WIRE_VERSION,
            "id": sid,
            "realizable": True,
            "sizes": res.sizes,
            "view": self._view(box),
        }

    def view(self, sid: str) -> tuple[int, dict]:
        box = self._box(sid)
        if box is None:
            return 404, {"v": WIRE_VERSION, "error": "unknown session"}
        with box.lock:
            return 200, {"v": WIRE_VERSION, **self._view(box)}

    def env_move(self, sid: str, body: dict) -> tuple[int, dict]:
        box = self._box(sid)
        if box is None:
            return 404, {"v": WIRE_VERSION, "error": "unknown session"}
        letter = body.get("letter")
        if not isinstance(letter, list):
            return 400, {"v": WIRE_VERSION, "error": "missing letter (list of env prop names)"}
        with box.lock:
            try:
                resp = box.session.step(letter)
            except EngineError as e:
                return 400, {"v": WIRE_VERSION, "error": str(e)}
            stopped = resp is STOP
            move = None if stopped else sorted(
                box.session.props.y_names(resp)
            )
            return 200, {
                "v": WIRE_VERSION,
                "agent_move": move,
                "stop": stopped,
                "view": self._view(box),
            }

    def exercise(self, sid: str, body: dict) -> tuple[int, dict]:
        box = self._box(sid)
        if box is None:
            return 404, {"v": WIRE_VERSION, "error": "unknown session"}
        with box.lock:
            try:
                box.session.exercise_right(body.get("which"))
            except EngineError as e:
                return 400, {"v": WIRE_VERSION, "error": str(e)}
            return 200, {"v": WIRE_VERSION, "view": self._view(box)}

    def further(self, sid: str, body: dict) -> tuple[int, dict]:
        box = self._box(sid)
        if box is None:
            return 404, {"v": WIRE_VERSION, "error": "unknown session"}
        declared = frozenset(box.session.props.all_vars)
        with box.lock:
            try:
                fd_text = body.get("fd")
                fr_text = body.get("fr")
                fd = ltlf.parse(fd_text, declared) if fd_text else box.document.further_duty
                fr = ltlf.parse(fr_text, declared) if fr_text else box.document.further_right
                if fd is None or fr is None:
                    return 400, {
                        "v": WIRE_VERSION,
                        "error": "no formulas given and the problem file has no further pair",
                    }
                outcome = box.session.inject_further(fd, fr)
            except EngineError as e:
                return 400, {"v": WIRE_VERSION, "error": str(e)}
            return 200, {"v": WIRE_VERSION, **outcome, "view": self._view(box)}

    def delete(self, sid: str) -> tuple[int, dict | None]:
        with self._lock:
            found = self._boxes.pop(sid, None)
        if found is None:
            return 404, {"v": WIRE_VERSION, "error": "unknown session"}
        return 204, None

    # -- routing -----------------------------------------------------------

    def handle(self, method: str, path: str, body: dict) -> tuple[int, dict | None]:
        parts = [p for p in path.split("/") if p]
        if parts[:1] != ["sessions"]:
            return 404, {"v": WIRE_VERSION, "error": "unknown path"}
        if method == "POST" and len(parts) == 1:
            return self.create(body)
        if len(parts) >= 2:
            sid = parts[1]
            if method == "GET" and len(parts) == 2:
                return self.view(sid)
            if method == "DELETE" and len(parts) == 2:
                return self.delete(sid)
            if method == "POST" and len(parts) == 3:
                if parts[2] == "env-move":
                    return self.env_move(sid, body)
                if parts[2] == "exercise-right":
                    return self.exercise(sid, body)
                if parts[2] == "further":
                    return self.further(sid, body)
        return 404, {"v": WIRE_VERSION, "error": "unknown path"}


class _Handler(BaseHTTPRequestHandler):
    service: PlayService  # set by make_server

    def _reply(self, status: int, payload: dict | None):
        body = b"" if payload is None else json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        if payload is not None:
            self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        if body:
            self.wfile.write(body)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        try:
            return json.loads(self.rfile.read(length))
        except json.JSONDecodeError:
            return {}

    def _dispatch(self, method: str):
        status, payload = self.service.handle(method, self.path, self._body())
        self._reply(status, payload)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def do_OPTIONS(self):
        self._reply(204, None)

    def log_message(self, format, *args):
        pass


def make_server(host: str, port: int, max_states: int = DEFAULT_STATE_CAP) -> ThreadingHTTPServer:
    service = PlayService(max_states)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def serve(host: str, port: int, max_states: int = DEFAULT_STATE_CAP):
    server = make_server(host, port, max_states)
    actual_host, actual_port = server.server_address[:2]
    print(f"serving on http://{actual_host}:{actual_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()

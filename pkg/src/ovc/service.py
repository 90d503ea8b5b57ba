"""HTTP/1.1 facade over a :class:`~ovc.aas.Repository`.

All paths live under ``/api/v1``; shell and submodel ids travel as unpadded
base64url path segments.  Errors are JSON documents
``{"httpStatus": ..., "code": ..., "message": ...}``.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any
from urllib.parse import unquote, urlsplit

from .aas import (
    DuplicateIdShort,
    FileElement,
    MalformedEntity,
    NotAFile,
    NotAProperty,
    NotFound,
    Property,
    Repository,
    ValueTypeMismatch,
)
from .aas.model import element_to_dict, shell_to_dict, submodel_to_dict
from .aas.store import decode_id
from .errors import OvcError
from .pipeline import PipelineConfig, PipelineError, run_pipeline
from .report import report_to_dict

log = logging.getLogger(__name__)

PREFIX = "/api/v1"
MAX_BODY = 64 * 1024 * 1024

STATUS_OF = {
    "NotFound": 404,
    "Malformed": 400,
    "TypeMismatch": 400,
    "Conflict": 409,
    "Internal": 500,
}


class BindFailure(OvcError):
    pass


class ApiError(Exception):
    def __init__(self, code: str, message: str) -> None:
        self.code = code
        self.http_status = STATUS_OF[code]
        self.message = message
        super().__init__(f"{code}: {message}")

    def to_dict(self) -> dict[str, Any]:
        return {"httpStatus": self.http_status, "code": self.code, "message": self.message}


def parse_bind(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise BindFailure(f"bind address {text!r} is not host:port")
    return host.strip("[]") or "127.0.0.1", int(port)


def _decode(segment: str) -> str:
    try:
        return decode_id(unquote(segment))
    except ValueError as exc:  # binascii.Error and UnicodeDecodeError both derive from it
        raise ApiError("NotFound", f"{segment!r} is not a base64url-encoded id") from exc


def _api_error(exc: Exception) -> ApiError:
    if isinstance(exc, ApiError):
        return exc
    if isinstance(exc, NotFound):
        return ApiError("NotFound", str(exc))
    if isinstance(exc, ValueTypeMismatch):
        return ApiError("TypeMismatch", str(exc))
    if isinstance(exc, (NotAProperty, NotAFile, MalformedEntity)):
        return ApiError("Malformed", str(exc))
    if isinstance(exc, (DuplicateIdShort, PipelineError)):
        return ApiError("Conflict", str(exc))
    log.exception("unhandled error")
    return ApiError("Internal", f"{type(exc).__name__}: {exc}")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: _Server

    def log_message(self, format: str, *args: Any) -> None:
        log.debug("%s - %s", self.address_string(), format % args)

    # -- plumbing ---------------------------------------------------------

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(body)

    def _send_json(self, doc: Any, status: int = 200) -> None:
        self._send(status, json.dumps(doc, ensure_ascii=False).encode("utf-8"), "application/json")

    def _body(self) -> bytes:
        length = self.headers.get("Content-Length")
        if length is None:
            return b""
        try:
            size = int(length)
        except ValueError:
            raise ApiError("Malformed", f"bad Content-Length {length!r}") from None
        if size < 0 or size > MAX_BODY:
            raise ApiError("Malformed", f"body of {size} bytes not accepted")
        return self.rfile.read(size)

    def _json_body(self) -> Any:
        raw = self._body()
        if not raw.strip():
            return None
        try:
            return json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ApiError("Malformed", f"body is not JSON: {exc}") from None

    def _dispatch(self) -> None:
        try:
            path = urlsplit(self.path).path
            if not path.startswith(PREFIX + "/"):
                raise ApiError("NotFound", f"no resource at {path}")
            segments = [s for s in path[len(PREFIX) + 1 :].split("/") if s]
            self._route(self.command, segments)
        except Exception as exc:  # every failure becomes an ApiError document
            error = _api_error(exc)
            # the request body may be unread; do not reuse the connection
            self.close_connection = True
            self._send_json(error.to_dict(), error.http_status)

    do_GET = do_PUT = do_PATCH = do_POST = do_DELETE = _dispatch

    # -- routes -----------------------------------------------------------

    def _route(self, method: str, seg: list[str]) -> None:
        repo = self.server.repository
        n = len(seg)
        if seg[:1] == ["shells"] and n <= 2:
            self._only(method, "GET")
            if n == 1:
                self._send_json([shell_to_dict(s) for s in repo.shells()])
            else:
                self._send_json(shell_to_dict(repo.get_shell(_decode(seg[1]))))
        elif seg[:1] == ["submodels"] and n >= 2:
            sm_id = _decode(seg[1])
            if n == 2:
                self._only(method, "GET")
                self._send_json(submodel_to_dict(repo.get_submodel(sm_id)))
            elif seg[2] != "submodel-elements" or n > 5:
                raise ApiError("NotFound", f"no resource at {self.path}")
            elif n == 3:
                self._only(method, "GET")
                self._send_json([element_to_dict(e) for e in repo.get_submodel(sm_id).elements])
            elif n == 4:
                self._only(method, "GET")
                self._send_json(element_to_dict(repo.get_element(sm_id, unquote(seg[3]))))
            elif seg[4] == "value":
                self._value(method, sm_id, unquote(seg[3]))
            elif seg[4] == "attachment":
                self._attachment(method, sm_id, unquote(seg[3]))
            else:
                raise ApiError("NotFound", f"no resource at {self.path}")
        elif seg == ["validation", "run"]:
            self._only(method, "POST")
            self._validate()
        else:
            raise ApiError("NotFound", f"no resource at {self.path}")

    def _only(self, method: str, allowed: str) -> None:
        if method != allowed:
            raise ApiError("Malformed", f"method {method} not supported here, use {allowed}")

    def _value(self, method: str, sm_id: str, path: str) -> None:
        repo = self.server.repository
        if method == "GET":
            element = repo.get_element(sm_id, path)
            if not isinstance(element, Property):
                raise ApiError("Malformed", f"{path!r} is not a Property")
            self._send_json(element.value)
            return
        self._only(method, "PATCH")
        doc = self._json_body()
        value = doc["value"] if isinstance(doc, dict) and set(doc) == {"value"} else doc
        if value is None or isinstance(value, (dict, list)):
            raise ApiError("Malformed", "body must be a JSON scalar or {\"value\": scalar}")
        self._send_json(element_to_dict(repo.set_property_value(sm_id, path, value)))

    def _attachment(self, method: str, sm_id: str, path: str) -> None:
        repo = self.server.repository
        if method == "GET":
            element = repo.get_element(sm_id, path)
            if not isinstance(element, FileElement):
                raise ApiError("Malformed", f"{path!r} is not a File")
            self._send(200, element.attachment, element.content_type or "application/octet-stream")
            return
        self._only(method, "PUT")
        data = self._body()
        content_type = self.headers.get("Content-Type")
        self._send_json(element_to_dict(repo.put_attachment(sm_id, path, data, content_type)))

    def _validate(self) -> None:
        cfg = self.server.config
        doc = self._json_body()
        if doc is not None:
            if not isinstance(doc, dict) or set(doc) - {"instanceFileIdShort"}:
                raise ApiError("Malformed", "body may only carry instanceFileIdShort")
            if "instanceFileIdShort" in doc:
                try:
                    cfg = dataclasses.replace(cfg, instance_file_id_short=doc["instanceFileIdShort"])
                except (ValueError, TypeError) as exc:
                    raise ApiError("Malformed", str(exc)) from None
        self._send_json(report_to_dict(run_pipeline(self.server.repository, cfg)))


class _Server(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], repository: Repository, config: PipelineConfig) -> None:
        self.repository = repository
        self.config = config
        super().__init__(address, _Handler)


class ServiceHandle:
    """A service running on a background thread."""

    def __init__(self, server: _Server) -> None:
        self._server = server
        self._thread = threading.Thread(
            target=server.serve_forever, kwargs={"poll_interval": 0.1}, name="ovc-http", daemon=True
        )
        self._thread.start()
        self._stopped = False

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}{PREFIX}"

    def wait(self, timeout: float | None = None) -> bool:
        """Block until the service stops; returns False on timeout."""
        self._thread.join(timeout)
        return not self._thread.is_alive()

    def shutdown(self) -> None:
        if self._stopped:
            return
        self._stopped = True
        self._server.shutdown()
        self._server.server_close()
        self._thread.join()
        self._server.repository.flush()

    def __enter__(self) -> ServiceHandle:
        return self

    def __exit__(self, *exc: object) -> None:
        self.shutdown()


def serve(repository: Repository, bind: str = "127.0.0.1:0", config: PipelineConfig | None = None) -> ServiceHandle:
    """Start serving ``repository``; port 0 picks a free port."""
    if config is None:
        from .demo import demo_config

        config = demo_config()
    try:
        server = _Server(parse_bind(bind), repository, config)
    except OSError as exc:
        raise BindFailure(f"cannot bind {bind}: {exc}") from exc
    return ServiceHandle(server)

"""Thin HTTP client for the daemon API (stdlib only)."""

from __future__ import annotations

import json
import http.client

from .api import parse_addr
from .errors import DaemonUnreachable, GantryError


class ApiError(GantryError):
    def __init__(self, status: int, payload: dict):
        super().__init__(payload.get("code", "api-error"), payload.get("error", f"HTTP {status}"))
        self.http_status = status
        self.payload = payload


class ApiClient:
    def __init__(self, addr: str | None = None, timeout: float = 30.0):
        self.host, self.port = parse_addr(addr)
        self.timeout = timeout

    def request(self, method: str, path: str, body: dict | None = None) -> dict:
        conn = http.client.HTTPConnection(self.host, self.port, timeout=self.timeout)
        try:
            payload = json.dumps(body).encode("utf-8") if body is not None else None
            headers = {"Content-Type": "application/json"} if payload else {}
            conn.request(method, path, body=payload, headers=headers)
            resp = conn.getresponse()
            data = json.loads(resp.read() or b"{}")
            if resp.status >= 400:
                raise ApiError(resp.status, data)
            return data
        except (ConnectionError, OSError, http.client.HTTPException) as exc:
            raise DaemonUnreachable(
                f"cannot reach the cluster daemon at {self.host}:{self.port}: {exc}"
            ) from exc
        finally:
            conn.close()

    def get(self, path: str) -> dict:
        return self.request("GET", path)

    def post(self, path: str, body: dict | None = None) -> dict:
        return self.request("POST", path, body or {})

    def wait_job(self, job_id: int) -> dict:
        return self.get(f"/2/jobs/{job_id}/wait")

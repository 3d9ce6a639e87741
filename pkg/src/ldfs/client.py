"""HTTP client for the model-server protocol (/v1/embed, /v1/score, /v1/info).

Transport failures (connection errors, timeouts) are retried with bounded
exponential backoff because the endpoints are idempotent; protocol failures
(bad status, malformed body) are surfaced immediately. A semaphore bounds the
number of in-flight requests when the pipeline scores in parallel.
"""

from __future__ import annotations

import threading
import time
from typing import Any, Sequence

import requests

from .errors import ProtocolError, TransportError

DEFAULT_TIMEOUT_S = 120.0


class ModelServerClient:
    def __init__(
        self,
        base_url: str,
        *,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        max_retries: int = 3,
        backoff_s: float = 0.5,
        max_in_flight: int = 4,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s
        self.max_retries = max_retries
        self.backoff_s = backoff_s
        self._session = session or requests.Session()
        self._slots = threading.BoundedSemaphore(max_in_flight)

    def _post(self, path: str, payload: dict) -> dict:
        url = f"{self.base_url}{path}"
        last_exc: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_s * (2 ** (attempt - 1)))
            try:
                with self._slots:
                    resp = self._session.post(url, json=payload, timeout=self.timeout_s)
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = exc
                continue
            if resp.status_code != 200:
                raise ProtocolError(f"{url} returned {resp.status_code}: {resp.text[:500]}")
            try:
                return resp.json()
            except ValueError as exc:
                raise ProtocolError(f"{url} returned a non-JSON body") from exc
        raise TransportError(f"could not reach {url} after {self.max_retries + 1} attempts: {last_exc}")

    def _get(self, path: str) -> requests.Response:
        url = f"{self.base_url}{path}"
        try:
            with self._slots:
                return self._session.get(url, timeout=self.timeout_s)
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise TransportError(f"could not reach {url}: {exc}") from exc

    def healthy(self) -> bool:
        try:
            return self._get("/healthz").status_code == 200
        except TransportError:
            return False

    def info(self) -> dict[str, Any]:
        resp = self._get("/v1/info")
        if resp.status_code != 200:
            raise ProtocolError(f"/v1/info returned {resp.status_code}: {resp.text[:500]}")
        return resp.json()

    def embed(self, texts: Sequence[str]) -> tuple[list[list[float]], int]:
        body = self._post("/v1/embed", {"texts": list(texts)})
        try:
            return body["vectors"], int(body["dim"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed /v1/embed response: {body!r}") from exc

    def score(self, pairs: Sequence[tuple[str, str]]) -> tuple[list[float], str]:
        """Score (target, context) pairs; returns scores and the declared variant."""
        payload = {"pairs": [{"target": t, "context": c} for t, c in pairs]}
        body = self._post("/v1/score", payload)
        try:
            return [float(s) for s in body["scores"]], str(body.get("variant", "unknown"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed /v1/score response: {body!r}") from exc

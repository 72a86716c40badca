"""Chat-completion plan source.

Endpoint, model id, and API key come from environment variables (names are
configurable); requests and responses are logged with the key redacted.
Transport failures surface as typed errors after the configured retries —
planning never silently falls back here (the facade owns that decision).
"""

from __future__ import annotations

import logging
import os
import time
from typing import TYPE_CHECKING, Optional

import httpx

if TYPE_CHECKING:
    from ..config import LlmConfig

from ..errors import EmptyResponse, LlmTimeout, TransportFailure
from .types import PromptBundle

log = logging.getLogger(__name__)

SYSTEM_INSTRUCTION = (
    "You are a robot task planner. Respond with one robot API call per line "
    "in exactly the form name(key=value, ...). No prose, no code fences."
)


class LlmClient:
    """Thin client for a chat-completions endpoint.

    Pass ``transport`` (an httpx transport) to stub the wire in tests.
    """

    def __init__(
        self,
        cfg: LlmConfig,
        transport: Optional[httpx.BaseTransport] = None,
        env=os.environ,
    ):
        self.cfg = cfg
        self.base_url = env.get(cfg.base_url_env)
        self.model = env.get(cfg.model_env, "")
        self._api_key = env.get(cfg.api_key_env, "")
        self._transport = transport

    @property
    def configured(self) -> bool:
        return bool(self.base_url)

    def complete(self, prompt_text: str) -> str:
        if not self.configured:
            raise TransportFailure(
                f"no endpoint configured (set {self.cfg.base_url_env}); offline"
            )
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": SYSTEM_INSTRUCTION},
                {"role": "user", "content": prompt_text},
            ],
        }
        headers = {}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        attempts = self.cfg.retries + 1
        last_exc: Optional[Exception] = None
        for attempt in range(attempts):
            if attempt:
                time.sleep(self.cfg.backoff_s * (2 ** (attempt - 1)))
            try:
                with httpx.Client(
                    base_url=self.base_url,
                    timeout=self.cfg.timeout_s,
                    transport=self._transport,
                ) as client:
                    log.info(
                        "plan request model=%s attempt=%d chars=%d (key redacted)",
                        self.model, attempt + 1, len(prompt_text),
                    )
                    resp = client.post("/chat/completions", json=body, headers=headers)
                    resp.raise_for_status()
                    data = resp.json()
                    content = data["choices"][0]["message"]["content"]
                    log.info("plan response chars=%d", len(content or ""))
                    if not content or not content.strip():
                        raise EmptyResponse("model returned an empty plan")
                    return content
            except httpx.TimeoutException as exc:
                last_exc = LlmTimeout(f"plan request timed out after {self.cfg.timeout_s}s")
                log.warning("plan request timeout (attempt %d/%d)", attempt + 1, attempts)
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last_exc = TransportFailure(f"plan request failed: {exc}")
                log.warning("plan request failed (attempt %d/%d): %s", attempt + 1, attempts, exc)
        raise last_exc  # type: ignore[misc]


def plan_llm(bundle: PromptBundle, client: LlmClient) -> str:
    """Raw plan text from the model; parsing and validation happen downstream."""
    return client.complete(bundle.text())

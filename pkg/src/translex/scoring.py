"""Continuation scoring over pluggable backends.

A scorer assigns each candidate continuation a non-negative negative
log-likelihood given a prompt prefix. Backends: a remote HTTP endpoint
speaking the ``/v1/score`` wire protocol, and two deterministic in-process
mocks for tests (a value table and a good/bad oracle). Scores are cached per
(prefix, continuation, normalization) for the lifetime of a scorer, so
re-scoring identical prompts (e.g. across ensemble configurations) is free.
"""

from __future__ import annotations

import math
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import requests

SCORE_PATH = "/v1/score"
TOKEN_ENV_VAR = "SCORER_TOKEN"

BACKENDS = ("http", "mock_table", "mock_oracle")
NORMALIZATIONS = ("sum", "mean")


class ScoringError(RuntimeError):
    """Backend failure, protocol violation, or invalid request."""


@dataclass(frozen=True)
class ScoreRequest:
    """A prompt prefix plus the candidate continuations to score."""

    prefix: str
    continuations: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "continuations", tuple(self.continuations))
        if not self.continuations:
            raise ScoringError("request has no continuations")
        if len(set(self.continuations)) != len(self.continuations):
            raise ScoringError("request continuations contain duplicates")
        if any(c == "" for c in self.continuations):
            raise ScoringError("empty continuation string")


@dataclass(frozen=True)
class ScoreResult:
    """Negative log-likelihood per continuation; all values finite and >= 0."""

    nll: dict[str, float]


@dataclass
class ScorerConfig:
    backend: str = "http"
    endpoint: str | None = None
    max_in_flight: int = 1
    normalization: str = "sum"
    timeout: float = 30.0
    retries: int = 2
    backoff_base: float = 0.25
    # mock_table backend: rules are (prefix fragment, table) pairs consulted
    # first, for any rule whose fragment occurs in the request prefix
    table: dict[str, float] = field(default_factory=dict)
    table_default: float | None = None
    table_rules: tuple = ()
    # mock_oracle backend: continuations in the good set get the low value,
    # everything else the high value (swapped when inverted); rules are
    # (prefix fragment, good set) pairs adding prefix-conditional good strings
    oracle_good: frozenset[str] = frozenset()
    oracle_rules: tuple = ()
    oracle_good_nll: float = 0.1
    oracle_bad_nll: float = 10.0
    oracle_inverted: bool = False

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ScoringError(f"unknown backend {self.backend!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ScoringError(f"unknown normalization {self.normalization!r}")
        if self.max_in_flight < 1:
            raise ScoringError("max_in_flight must be >= 1")
        if self.retries < 0:
            raise ScoringError("retries must be >= 0")
        if self.backend == "http" and not self.endpoint:
            raise ScoringError("http backend requires an endpoint URL")
        self.table_rules = tuple((str(f), dict(t)) for f, t in self.table_rules)
        self.oracle_good = frozenset(self.oracle_good)
        self.oracle_rules = tuple((str(f), frozenset(g)) for f, g in self.oracle_rules)
        for goods in (self.oracle_good, *(g for _, g in self.oracle_rules)):
            if any(g == "" for g in goods):
                raise ScoringError("oracle good set contains an empty string")


def rank_scores(nll: dict[str, float]) -> list[tuple[str, float]]:
    """Sort continuations by ascending NLL; ties break on UTF-8 byte order."""
    return sorted(nll.items(), key=lambda kv: (kv[1], kv[0].encode("utf-8")))


class Scorer:
    """Caching scorer over one configured backend.

    Safe for concurrent use; ``score_many`` fans out up to
    ``config.max_in_flight`` requests and returns results in request order.
    """

    def __init__(self, config: ScorerConfig):
        self.config = config
        self._cache: dict[tuple[str, str], float] = {}
        self._lock = threading.Lock()

    def score(self, request: ScoreRequest) -> ScoreResult:
        with self._lock:
            missing = [c for c in request.continuations
                       if (request.prefix, c) not in self._cache]
        if missing:
            values = self._score_backend(request.prefix, missing)
            with self._lock:
                for cont, value in zip(missing, values):
                    self._cache[(request.prefix, cont)] = value
        with self._lock:
            nll = {c: self._cache[(request.prefix, c)] for c in request.continuations}
        return ScoreResult(nll=nll)

    def score_many(self, requests_: Sequence[ScoreRequest]) -> list[ScoreResult]:
        if self.config.max_in_flight == 1 or len(requests_) <= 1:
            return [self.score(r) for r in requests_]
        with ThreadPoolExecutor(max_workers=self.config.max_in_flight) as pool:
            return list(pool.map(self.score, requests_))

    def rank(self, request: ScoreRequest) -> list[tuple[str, float]]:
        """Continuations ordered best (lowest NLL) first, deterministically."""
        return rank_scores(self.score(request).nll)

    # backends

    def _score_backend(self, prefix: str, continuations: list[str]) -> list[float]:
        if self.config.backend == "mock_table":
            return [self._table_value(prefix, c) for c in continuations]
        if self.config.backend == "mock_oracle":
            return [self._oracle_value(prefix, c) for c in continuations]
        return self._http_score(prefix, continuations)

    def _table_value(self, prefix: str, continuation: str) -> float:
        for fragment, table in self.config.table_rules:
            if fragment in prefix and continuation in table:
                return float(table[continuation])
        value = self.config.table.get(continuation, self.config.table_default)
        if value is None:
            raise ScoringError(f"mock table has no value for {continuation!r}")
        return float(value)

    def _oracle_value(self, prefix: str, continuation: str) -> float:
        good = continuation in self.config.oracle_good
        for fragment, rule_goods in self.config.oracle_rules:
            if not good and fragment in prefix:
                good = continuation in rule_goods
        if self.config.oracle_inverted:
            good = not good
        return self.config.oracle_good_nll if good else self.config.oracle_bad_nll

    def _http_score(self, prefix: str, continuations: list[str]) -> list[float]:
        url = self.config.endpoint.rstrip("/") + SCORE_PATH
        body = {"prefix": prefix, "continuations": continuations,
                "normalization": self.config.normalization}
        headers = {}
        token = os.environ.get(TOKEN_ENV_VAR)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        last_error = None
        for attempt in range(self.config.retries + 1):
            if attempt:
                # exponential backoff with jitter
                delay = min(8.0, self.config.backoff_base * 2 ** (attempt - 1))
                time.sleep(delay * (0.5 + random.random()))
            try:
                response = requests.post(url, json=body, headers=headers,
                                         timeout=self.config.timeout)
            except requests.RequestException as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                continue
            if response.status_code in (400, 422):
                raise ScoringError(
                    f"scoring endpoint rejected the request ({response.status_code}): "
                    f"{response.text[:200]}"
                )
            if response.status_code != 200:
                last_error = f"HTTP {response.status_code}"
                continue
            return self._parse_response(response, len(continuations))
        raise ScoringError(
            f"scoring request failed after {self.config.retries + 1} attempts "
            f"({last_error}); aborting run"
        )

    @staticmethod
    def _parse_response(response, expected: int) -> list[float]:
        try:
            payload = response.json()
        except ValueError:
            raise ScoringError("scoring endpoint returned non-JSON body") from None
        values = payload.get("nll") if isinstance(payload, dict) else None
        if not isinstance(values, list) or len(values) != expected:
            raise ScoringError(
                f"protocol violation: expected {expected} nll values, got "
                f"{values if not isinstance(values, list) else len(values)}"
            )
        out = []
        for v in values:
            if not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
                raise ScoringError(f"protocol violation: bad nll value {v!r}")
            out.append(float(v))
        return out


def oracle_scorer(good: set[str] = frozenset(), *, rules=(), inverted: bool = False,
                  good_nll: float = 0.1, bad_nll: float = 10.0) -> Scorer:
    """Scorer whose good continuations score low and all others high."""
    return Scorer(ScorerConfig(backend="mock_oracle", oracle_good=frozenset(good),
                               oracle_rules=tuple(rules), oracle_good_nll=good_nll,
                               oracle_bad_nll=bad_nll, oracle_inverted=inverted))


def table_scorer(table: dict[str, float], *, rules=(),
                 default: float | None = None) -> Scorer:
    return Scorer(ScorerConfig(backend="mock_table", table=dict(table),
                               table_rules=tuple(rules), table_default=default))

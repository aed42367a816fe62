"""Masked-token predictor interface, remote HTTP backend, and seeded mock.

The remote backend speaks the fill-mask sidecar protocol:
POST /v1/fill-mask {"text": ..., "top_k": ...} ->
{"model": ..., "predictions": [{"token": ..., "probability": ...}]}.
The mock is fully deterministic in (seed, query text, rank) and exists so
that every pipeline above this layer can be tested offline.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Protocol, Sequence

import requests

from .errors import (
    BackendUnavailableError,
    MalformedResponseError,
    MaskMissingError,
)
from .io_utils import read_jsonl, write_jsonl
from .templates import RenderedQuery

MAX_TOP_K = 50
DEFAULT_TOP_K = 5

QueryKey = tuple[str, str]  # (component_surface, template_id)

# Stock vocabulary for the mock backend: plausible materials, spelling
# variants, and junk the postprocess stage is expected to filter.
DEFAULT_MOCK_VOCABULARY = (
    "steel", "metal", "metals", "plastic", "aluminium", "aluminum", "copper",
    "rubber", "glass", "iron", "wood", "leather", "carbon", "titanium",
    "brass", "nylon", "ceramic", "silicon", "foam", "paper", "wire", "oil",
    "chrome", "zinc", "polyester", "fabric", "gold", "silver", "nickel",
    "concrete", "material", "components", "123", "x", "the", "sense",
    "noise", "cold", "food", "death", "dna", "joints", "bones", "legs",
)


@dataclass(frozen=True)
class MaskPrediction:
    token: str
    probability: float
    rank: int


@dataclass
class PredictionBatch:
    """Per-query results keyed by (component_surface, template_id).

    Every requested key appears in exactly one of `results` or `errors`;
    failed queries are never silently dropped.
    """

    k: int
    results: dict[QueryKey, list[MaskPrediction]] = field(default_factory=dict)
    errors: dict[QueryKey, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.results) + len(self.errors)

    def total_predictions(self) -> int:
        return sum(len(preds) for preds in self.results.values())


class Predictor(Protocol):
    def predict_masked(self, query_text: str, k: int) -> list[MaskPrediction]:
        ...


def check_query(query_text: str, mask_token: str, k: int) -> None:
    if query_text.count(mask_token) != 1:
        raise MaskMissingError(
            f"query must contain {mask_token!r} exactly once: {query_text!r}"
        )
    if not 1 <= k <= MAX_TOP_K:
        raise ValueError(f"k must be in 1..{MAX_TOP_K}, got {k}")


def _validate_predictions(preds: list[MaskPrediction]) -> list[MaskPrediction]:
    last = 1.0 + 1e-9
    total = 0.0
    for i, p in enumerate(preds, start=1):
        if p.rank != i:
            raise MalformedResponseError(f"ranks not consecutive at position {i}")
        if not 0.0 < p.probability <= 1.0:
            raise MalformedResponseError(f"probability out of range: {p.probability}")
        if p.probability > last:
            raise MalformedResponseError("probabilities increase with rank")
        last = p.probability
        total += p.probability
    if total > 1.0 + 1e-6:
        raise MalformedResponseError(f"probabilities sum to {total} > 1")
    return preds


class HttpPredictor:
    """Client for the fill-mask sidecar. Thread-safe; one session per thread
    is avoided by requests' own connection pooling."""

    def __init__(self, base_url: str, mask_token: str = "<mask>", timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.mask_token = mask_token
        self.timeout = timeout
        self._session = requests.Session()

    def info(self) -> dict:
        try:
            resp = self._session.get(f"{self.base_url}/v1/info", timeout=self.timeout)
        except requests.RequestException as exc:
            raise BackendUnavailableError(f"cannot reach backend: {exc}") from exc
        if resp.status_code != 200:
            raise BackendUnavailableError(f"info endpoint returned {resp.status_code}")
        return resp.json()

    def identity(self) -> str:
        return str(self.info().get("model", "unknown"))

    def predict_masked(self, query_text: str, k: int) -> list[MaskPrediction]:
        check_query(query_text, self.mask_token, k)
        try:
            resp = self._session.post(
                f"{self.base_url}/v1/fill-mask",
                json={"text": query_text, "top_k": k},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise BackendUnavailableError(f"cannot reach backend: {exc}") from exc
        if resp.status_code == 400:
            raise MaskMissingError(f"backend rejected query: {resp.text}")
        if resp.status_code == 503:
            raise BackendUnavailableError("backend model not loaded")
        if resp.status_code != 200:
            raise MalformedResponseError(f"unexpected status {resp.status_code}: {resp.text[:200]}")
        try:
            payload = resp.json()
            preds = [
                MaskPrediction(token=str(row["token"]).strip(), probability=float(row["probability"]), rank=i)
                for i, row in enumerate(payload["predictions"], start=1)
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponseError(f"bad response body: {exc}") from exc
        return _validate_predictions(preds)


class MockPredictor:
    """Deterministic offline stand-in: token choice and pseudo-probability
    are pure functions of (seed, query text, rank)."""

    def __init__(self, seed: int, vocabulary: Sequence[str], mask_token: str = "<mask>"):
        if not vocabulary:
            raise ValueError("mock vocabulary must be non-empty")
        self.seed = seed
        self.vocabulary = list(vocabulary)
        self.mask_token = mask_token

    def identity(self) -> str:
        return f"mock:seed={self.seed}"

    def _draw(self, query_text: str, slot: int) -> tuple[int, float]:
        digest = hashlib.blake2b(
            f"{self.seed}|{query_text}|{slot}".encode("utf-8"), digest_size=16
        ).digest()
        index = int.from_bytes(digest[:8], "big") % len(self.vocabulary)
        # (0, 1) exclusive on both ends
        score = (int.from_bytes(digest[8:], "big") + 1) / (2**64 + 2)
        return index, score

    def predict_masked(self, query_text: str, k: int) -> list[MaskPrediction]:
        check_query(query_text, self.mask_token, k)
        chosen: dict[str, float] = {}
        slot = 0
        # probe successive slots until k distinct tokens or vocab exhausted
        while len(chosen) < min(k, len(self.vocabulary)) and slot < 20 * k + len(self.vocabulary):
            index, score = self._draw(query_text, slot)
            token = self.vocabulary[index]
            if token not in chosen:
                chosen[token] = score
            slot += 1
        ordered = sorted(chosen.items(), key=lambda kv: (-kv[1], kv[0]))
        denom = sum(score for _, score in ordered) + 1.0
        return [
            MaskPrediction(token=token, probability=score / denom, rank=i)
            for i, (token, score) in enumerate(ordered, start=1)
        ]


def batch_predict(
    predictor: Predictor,
    queries: Iterable[RenderedQuery],
    k: int = DEFAULT_TOP_K,
    parallelism: int = 1,
    retries: int = 2,
    backoff: float = 0.2,
) -> PredictionBatch:
    """Fan queries out to the predictor and assemble results by key.

    The assembly is a keyed fold, so the outcome is independent of
    parallelism and completion order. Transient backend errors are retried
    with exponential backoff, then recorded as per-query error markers;
    the whole batch fails only when every query found the backend
    unreachable.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    queries = list(queries)
    batch = PredictionBatch(k=k)
    if not queries:
        return batch

    def run_one(query: RenderedQuery) -> tuple[QueryKey, Optional[list[MaskPrediction]], Optional[str]]:
        key = (query.component_surface, query.template_id)
        attempt = 0
        while True:
            try:
                return key, predictor.predict_masked(query.text, k), None
            except BackendUnavailableError as exc:
                if attempt >= retries:
                    return key, None, f"unavailable: {exc}"
                time.sleep(backoff * (2**attempt))
                attempt += 1
            except Exception as exc:  # per-query marker, batch continues
                return key, None, f"{type(exc).__name__}: {exc}"

    if parallelism == 1:
        outcomes = [run_one(q) for q in queries]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(run_one, queries))

    for key, preds, err in outcomes:
        if preds is not None:
            batch.results[key] = preds
        else:
            batch.errors[key] = err or "unknown error"

    if not batch.results and all(e.startswith("unavailable:") for e in batch.errors.values()):
        raise BackendUnavailableError("backend unreachable for every query in the batch")
    return batch


# -- serialization --

def batch_to_records(batch: PredictionBatch) -> list[dict]:
    records = []
    for (surface, template_id), preds in sorted(batch.results.items()):
        for p in preds:
            records.append(
                {
                    "component": surface,
                    "template_id": template_id,
                    "rank": p.rank,
                    "token": p.token,
                    "prob": p.probability,
                }
            )
    for (surface, template_id), err in sorted(batch.errors.items()):
        records.append(
            {"component": surface, "template_id": template_id, "error": err}
        )
    return records


def write_batch(batch: PredictionBatch, path: str | Path) -> None:
    write_jsonl(path, batch_to_records(batch))


def read_batch(path: str | Path, k: int = DEFAULT_TOP_K) -> PredictionBatch:
    batch = PredictionBatch(k=k)
    staging: dict[QueryKey, list[MaskPrediction]] = {}
    for record in read_jsonl(path):
        key = (record["component"], record["template_id"])
        if "error" in record:
            batch.errors[key] = record["error"]
            continue
        staging.setdefault(key, []).append(
            MaskPrediction(token=record["token"], probability=record["prob"], rank=record["rank"])
        )
    for key, preds in staging.items():
        batch.results[key] = sorted(preds, key=lambda p: p.rank)
    return batch

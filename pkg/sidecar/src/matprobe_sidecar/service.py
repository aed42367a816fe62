"""Fill-mask HTTP service over any local masked-LM checkpoint.

Wire protocol:
    POST /v1/fill-mask {"text": str, "top_k": int}
        -> {"model": str, "predictions": [{"token": str, "probability": float}]}
    GET  /v1/info
        -> {"model": str, "mask_token": str, "max_top_k": int}

400 when the mask token is missing or repeated, 413 when the input exceeds
the model's position budget, 503 while no model is loaded.
"""

from __future__ import annotations

import argparse
import threading
from dataclasses import dataclass
from typing import Optional

import torch
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel


@dataclass
class ServiceConfig:
    model: str  # checkpoint directory or hub identifier
    device: str = "cpu"
    max_top_k: int = 50
    host: str = "127.0.0.1"
    port: int = 8301

    def __post_init__(self):
        if self.max_top_k < 1:
            raise ValueError("max_top_k must be >= 1")


class FillMaskRequest(BaseModel):
    text: str
    top_k: int = 5


class ModelBundle:
    """Loaded tokenizer and model plus a lock serializing forward passes."""

    def __init__(self, config: ServiceConfig):
        from transformers import AutoModelForMaskedLM, AutoTokenizer

        self.config = config
        self.tokenizer = AutoTokenizer.from_pretrained(config.model)
        self.model = AutoModelForMaskedLM.from_pretrained(config.model)
        self.model.to(config.device)
        self.model.eval()
        self.lock = threading.Lock()
        # leave room for the two position offsets roberta-style models reserve
        self.max_tokens = int(self.model.config.max_position_embeddings) - 2

    @property
    def mask_token(self) -> str:
        return self.tokenizer.mask_token

    def fill_mask(self, text: str, top_k: int) -> list[dict]:
        encoding = self.tokenizer(text, return_tensors="pt")
        input_ids = encoding["input_ids"][0]
        if input_ids.shape[0] > self.max_tokens:
            raise HTTPException(
                status_code=413,
                detail=f"input of {input_ids.shape[0]} tokens exceeds limit {self.max_tokens}",
            )
        mask_positions = (input_ids == self.tokenizer.mask_token_id).nonzero().flatten()
        if mask_positions.numel() != 1:
            raise HTTPException(
                status_code=400,
                detail=f"text must contain {self.mask_token!r} exactly once "
                f"(found {mask_positions.numel()})",
            )
        top_k = max(1, min(top_k, self.config.max_top_k, self.tokenizer.vocab_size))
        with self.lock, torch.no_grad():
            logits = self.model(
                **{k: v.to(self.config.device) for k, v in encoding.items()}
            ).logits
        probabilities = torch.softmax(logits[0, mask_positions[0]], dim=-1)
        top = torch.topk(probabilities, top_k)
        return [
            {
                "token": self.tokenizer.decode([token_id]).strip(),
                "probability": float(probability),
            }
            for probability, token_id in zip(top.values.tolist(), top.indices.tolist())
        ]


def create_app(config: ServiceConfig, load: bool = True) -> FastAPI:
    app = FastAPI(title="matprobe fill-mask sidecar")
    app.state.config = config
    app.state.bundle = ModelBundle(config) if load else None

    def bundle() -> ModelBundle:
        if app.state.bundle is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        return app.state.bundle

    @app.get("/v1/info")
    def info():
        b = bundle()
        return {
            "model": config.model,
            "mask_token": b.mask_token,
            "max_top_k": config.max_top_k,
        }

    @app.post("/v1/fill-mask")
    def fill_mask(request: FillMaskRequest):
        b = bundle()
        predictions = b.fill_mask(request.text, request.top_k)
        return {"model": config.model, "predictions": predictions}

    return app


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Serve fill-mask over a local checkpoint.")
    parser.add_argument("--model", required=True, help="checkpoint directory")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8301)
    parser.add_argument("--max-top-k", type=int, default=50)
    args = parser.parse_args(argv)

    import uvicorn

    config = ServiceConfig(
        model=args.model,
        device=args.device,
        max_top_k=args.max_top_k,
        host=args.host,
        port=args.port,
    )
    uvicorn.run(create_app(config), host=config.host, port=config.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Masked-LM domain adaptation over plain-text train/validation files.

Recipe: 15% token masking, learning rate 2e-5, weight decay 0.01, three
epochs, effective batch size 1,024 reached through gradient accumulation,
best checkpoint chosen by validation loss. Every epoch appends one record
to training_log.jsonl in the output directory.
"""

from __future__ import annotations

import argparse
import json
import math
from pathlib import Path
from typing import Optional

import torch
from torch.utils.data import DataLoader, Dataset


class LineDataset(Dataset):
    def __init__(self, path: str | Path, tokenizer, max_seq_len: int):
        lines = [
            line.strip()
            for line in Path(path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        self.encodings = [
            tokenizer(line, truncation=True, max_length=max_seq_len)["input_ids"]
            for line in lines
        ]

    def __len__(self):
        return len(self.encodings)

    def __getitem__(self, index):
        return {"input_ids": torch.tensor(self.encodings[index], dtype=torch.long)}


def _run_epoch(model, loader, collator_device, optimizer=None, accumulation_steps=1):
    total_loss = 0.0
    batches = 0
    pending = 0
    if optimizer:
        optimizer.zero_grad()
    for step, batch in enumerate(loader):
        batch = {k: v.to(collator_device) for k, v in batch.items()}
        outputs = model(**batch)
        loss = outputs.loss
        total_loss += float(loss.detach())
        batches += 1
        if optimizer:
            (loss / accumulation_steps).backward()
            pending += 1
            if pending == accumulation_steps:
                optimizer.step()
                optimizer.zero_grad()
                pending = 0
    if optimizer and pending:
        optimizer.step()
        optimizer.zero_grad()
    return total_loss / max(batches, 1)


def finetune(
    model: str,
    train_file: str | Path,
    valid_file: str | Path,
    output_dir: str | Path,
    epochs: int = 3,
    mask_fraction: float = 0.15,
    learning_rate: float = 2e-5,
    weight_decay: float = 0.01,
    effective_batch_size: int = 1024,
    micro_batch_size: int = 16,
    max_seq_len: int = 128,
    seed: int = 0,
    device: str = "cpu",
) -> dict:
    """Adapt a masked-LM checkpoint and return the best-epoch summary."""
    from transformers import (
        AutoModelForMaskedLM,
        AutoTokenizer,
        DataCollatorForLanguageModeling,
    )

    torch.manual_seed(seed)
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    tokenizer = AutoTokenizer.from_pretrained(model)
    lm = AutoModelForMaskedLM.from_pretrained(model)
    lm.to(device)

    collator = DataCollatorForLanguageModeling(
        tokenizer=tokenizer, mlm=True, mlm_probability=mask_fraction
    )
    train_data = LineDataset(train_file, tokenizer, max_seq_len)
    valid_data = LineDataset(valid_file, tokenizer, max_seq_len)
    if len(train_data) == 0 or len(valid_data) == 0:
        raise ValueError("train and validation files must both be non-empty")

    generator = torch.Generator().manual_seed(seed)
    train_loader = DataLoader(
        train_data,
        batch_size=micro_batch_size,
        shuffle=True,
        generator=generator,
        collate_fn=collator,
    )
    valid_loader = DataLoader(
        valid_data, batch_size=micro_batch_size, shuffle=False, collate_fn=collator
    )
    accumulation_steps = max(1, math.ceil(effective_batch_size / micro_batch_size))
    optimizer = torch.optim.AdamW(
        lm.parameters(), lr=learning_rate, weight_decay=weight_decay
    )

    log_path = output_dir / "training_log.jsonl"
    best_dir = output_dir / "best"
    best = {"epoch": None, "valid_loss": float("inf")}
    records = []

    try:
        for epoch in range(1, epochs + 1):
            lm.train()
            train_loss = _run_epoch(
                lm, train_loader, device, optimizer=optimizer,
                accumulation_steps=accumulation_steps,
            )
            lm.eval()
            torch.manual_seed(seed + 1)  # identical validation masking every epoch
            with torch.no_grad():
                valid_loss = _run_epoch(lm, valid_loader, device)
            record = {
                "epoch": epoch,
                "train_loss": train_loss,
                "valid_loss": valid_loss,
                "mask_fraction": mask_fraction,
                "learning_rate": learning_rate,
                "weight_decay": weight_decay,
                "effective_batch_size": effective_batch_size,
                "accumulation_steps": accumulation_steps,
            }
            records.append(record)
            with open(log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")
            if valid_loss < best["valid_loss"]:
                best = {"epoch": epoch, "valid_loss": valid_loss}
                lm.save_pretrained(best_dir)
                tokenizer.save_pretrained(best_dir)
    except torch.cuda.OutOfMemoryError as exc:
        raise RuntimeError(
            "out of memory: lower --micro-batch-size; gradient accumulation "
            "will still reach the configured effective batch size"
        ) from exc

    (output_dir / "best.json").write_text(json.dumps(best, indent=2) + "\n", encoding="utf-8")
    return {"best": best, "epochs": records, "output_dir": str(output_dir)}


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", required=True, help="base checkpoint to adapt")
    parser.add_argument("--train-file", required=True)
    parser.add_argument("--valid-file", required=True)
    parser.add_argument("--output-dir", required=True)
    parser.add_argument("--epochs", type=int, default=3)
    parser.add_argument("--mask-fraction", type=float, default=0.15)
    parser.add_argument("--learning-rate", type=float, default=2e-5)
    parser.add_argument("--weight-decay", type=float, default=0.01)
    parser.add_argument("--effective-batch-size", type=int, default=1024)
    parser.add_argument("--micro-batch-size", type=int, default=16)
    parser.add_argument("--max-seq-len", type=int, default=128)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)

    summary = finetune(
        model=args.model,
        train_file=args.train_file,
        valid_file=args.valid_file,
        output_dir=args.output_dir,
        epochs=args.epochs,
        mask_fraction=args.mask_fraction,
        learning_rate=args.learning_rate,
        weight_decay=args.weight_decay,
        effective_batch_size=args.effective_batch_size,
        micro_batch_size=args.micro_batch_size,
        max_seq_len=args.max_seq_len,
        seed=args.seed,
        device=args.device,
    )
    print(
        f"best checkpoint: epoch {summary['best']['epoch']} "
        f"(valid loss {summary['best']['valid_loss']:.4f}) -> {summary['output_dir']}/best"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

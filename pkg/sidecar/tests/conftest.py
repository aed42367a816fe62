"""Builds a small self-contained masked-LM checkpoint for the tests.

The model-hub is unreachable in CI, so the fixture trains a byte-level BPE
tokenizer on a synthetic domain corpus and pairs it with a randomly
initialized 2-layer RoBERTa-style masked LM. Structure and wire behaviour
match a real checkpoint; prediction quality is irrelevant to these tests.
"""

import random

import pytest

COMPONENT_WORDS = [
    "battery", "tank", "disk", "sensor", "pump", "valve", "switch", "lamp",
    "motor", "pipe", "housing", "bracket",
]
MATERIAL_WORDS = [
    "steel", "copper", "plastic", "rubber", "glass", "aluminium", "iron",
    "brass", "ceramic", "nylon",
]
VERBS = ["consists of", "is made of", "contains", "is manufactured from"]


def synthetic_sentences(n, seed=0):
    rng = random.Random(seed)
    return [
        f"the {rng.choice(COMPONENT_WORDS)} {rng.choice(VERBS)} {rng.choice(MATERIAL_WORDS)}."
        for _ in range(n)
    ]


def build_tiny_checkpoint(directory, corpus=None):
    from tokenizers import ByteLevelBPETokenizer
    from transformers import PreTrainedTokenizerFast, RobertaConfig, RobertaForMaskedLM

    corpus = corpus or synthetic_sentences(400, seed=1)
    trainer = ByteLevelBPETokenizer()
    trainer.train_from_iterator(
        corpus,
        vocab_size=600,
        min_frequency=1,
        special_tokens=["<s>", "<pad>", "</s>", "<unk>", "<mask>"],
    )
    trainer.save(str(directory / "tokenizer.json"))
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_file=str(directory / "tokenizer.json"),
        bos_token="<s>",
        eos_token="</s>",
        unk_token="<unk>",
        pad_token="<pad>",
        mask_token="<mask>",
    )
    config = RobertaConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=66,
        pad_token_id=tokenizer.pad_token_id,
        bos_token_id=tokenizer.bos_token_id,
        eos_token_id=tokenizer.eos_token_id,
    )
    import torch

    torch.manual_seed(7)
    model = RobertaForMaskedLM(config)
    tokenizer.save_pretrained(directory)
    model.save_pretrained(directory)
    return directory


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    directory = tmp_path_factory.mktemp("tiny_mlm")
    return str(build_tiny_checkpoint(directory))

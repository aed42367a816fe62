"""matprobe: learn plausible materials for component terms by probing
masked language models with systematically generated cloze queries,
with a pattern-bootstrapping baseline and evaluation tooling."""

__version__ = "0.1.0"

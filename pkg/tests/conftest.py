"""Shared fixture builders: synthetic dependency-parsed corpora with
planted material words, and small annotation sets."""

import random

SEEDS = (
    "water", "steel", "metal", "glass", "rubber",
    "plastic", "aluminum", "copper", "polyester", "quartz",
)
PLANTED = (
    "brass", "bronze", "titanium", "nickel", "zinc",
    "chrome", "graphite", "kevlar", "ceramic", "nylon",
)
DISTRACTORS = tuple(
    f"{w}" for w in [
        "engine", "wheel", "driver", "road", "garage", "tool", "manual", "bolt",
        "screw", "bracket", "signal", "noise", "report", "window", "door",
        "mirror", "seat", "panel", "cable", "switch", "button", "display",
        "gauge", "meter", "filter", "hose", "clamp", "lever", "pedal", "handle",
        "frame", "cover", "housing", "mount", "shaft", "gear", "belt", "chain",
        "roller", "bearing", "spring", "damper", "valve", "piston", "cylinder",
        "radiator", "fan", "pump", "tank", "line",
    ]
)


def _conllu_sentence(rows):
    lines = []
    for i, (form, lemma, upos, head, deprel) in enumerate(rows, start=1):
        lines.append(f"{i}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{deprel}\t_\t_")
    return "\n".join(lines) + "\n\n"


def frame_manufactured(subject, material):
    return _conllu_sentence([
        (subject + "s", subject, "NOUN", 3, "nsubj:pass"),
        ("are", "be", "AUX", 3, "aux:pass"),
        ("manufactured", "manufacture", "VERB", 0, "root"),
        ("from", "from", "ADP", 5, "case"),
        (material, material, "NOUN", 3, "obl"),
    ])


def frame_made_of(subject, material):
    return _conllu_sentence([
        ("the", "the", "DET", 2, "det"),
        (subject, subject, "NOUN", 4, "nsubj:pass"),
        ("is", "be", "AUX", 4, "aux:pass"),
        ("made", "make", "VERB", 0, "root"),
        ("of", "of", "ADP", 6, "case"),
        (material, material, "NOUN", 4, "obl"),
    ])


def frame_consists_of(subject, material):
    return _conllu_sentence([
        ("the", "the", "DET", 2, "det"),
        (subject, subject, "NOUN", 3, "nsubj"),
        ("consists", "consist", "VERB", 0, "root"),
        ("of", "of", "ADP", 5, "case"),
        (material, material, "NOUN", 3, "obl"),
    ])


def frame_alloy(material):
    return _conllu_sentence([
        ("the", "the", "DET", 3, "det"),
        (material, material, "NOUN", 3, "compound"),
        ("alloy", "alloy", "NOUN", 4, "nsubj"),
        ("melts", "melt", "VERB", 0, "root"),
    ])


def frame_distractor(noun, verb_pair):
    verb, lemma = verb_pair
    return _conllu_sentence([
        ("the", "the", "DET", 2, "det"),
        ("driver", "driver", "NOUN", 3, "nsubj"),
        (verb, lemma, "VERB", 0, "root"),
        ("the", "the", "DET", 5, "det"),
        (noun, noun, "NOUN", 3, "obj"),
    ])


DISTRACTOR_VERBS = [
    ("checked", "check"), ("cleaned", "clean"), ("replaced", "replace"),
    ("inspected", "inspect"), ("adjusted", "adjust"),
]

MATERIAL_FRAMES = [frame_manufactured, frame_made_of, frame_consists_of]
SUBJECTS = ["disk", "tank", "housing", "bracket", "pipe"]


def build_material_corpus(n_sentences=200, rng_seed=4):
    """A deterministic parsed corpus where planted material words share
    contexts with the seed words and distractors do not (two distractors
    leak into material frames as noise)."""
    rng = random.Random(rng_seed)
    chunks = []

    for seed in SEEDS:  # 10 * 3 = 30 sentences
        for frame in MATERIAL_FRAMES:
            chunks.append(frame(rng.choice(SUBJECTS), seed))
    for seed in SEEDS:  # 10
        chunks.append(frame_alloy(seed))
    for planted in PLANTED:  # 10 * 3 = 30
        for frame in MATERIAL_FRAMES:
            chunks.append(frame(rng.choice(SUBJECTS), planted))
    for planted in PLANTED[:5]:  # 5 alloy mentions
        chunks.append(frame_alloy(planted))

    noisy = DISTRACTORS[:2]
    for noun in noisy:  # 2 noise leaks into material frames
        chunks.append(frame_made_of(rng.choice(SUBJECTS), noun))

    while len(chunks) < n_sentences:
        noun = rng.choice(DISTRACTORS)
        chunks.append(frame_distractor(noun, rng.choice(DISTRACTOR_VERBS)))

    rng.shuffle(chunks)
    return "".join(chunks[:n_sentences])


def build_raw_sentences():
    """Raw sentences aligned in spirit with the parsed corpus, for linking."""
    lines = [
        "the brake disk is manufactured from iron.",
        "brake disks are usually manufactured from gray cast iron.",
        "the fuel tank is made of plastic.",
        "the fuel tank contains fuel lines of rubber.",
        "a pressure sensor housing consists of brass.",
        "the pressure sensor is made of ceramic.",
        "steel is strong.",
        "the driver checked the manual.",
        "the battery casing is made of plastic.",
        "the battery terminal consists of copper.",
    ]
    return lines

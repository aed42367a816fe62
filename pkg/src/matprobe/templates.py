"""Cloze query template grammar and rendering.

The grammar crosses verb relations with grammatical number, noun
quantifiers, typicality adverbs, and limiting context phrases:

    [context] + [quantifier] + subject + verb_relation + [adverb slot] + <mask>.

With the default inventory (18 relations, 4 quantifiers, 5 adverbs,
6 contexts) this yields 504 templates per component:
2*18 base + 4*18 quantified + 5*2*18 adverbial + 6*2*18 contextual.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Optional

from .components import Component, indefinite_article, pluralize
from .errors import InvalidConfigError, MorphologyError


class VariantClass(str, Enum):
    BASE = "base"
    QUANTIFIED = "quant"
    ADVERBIAL = "adv"
    CONTEXTUAL = "ctx"


class Number(str, Enum):
    SINGULAR = "sg"
    PLURAL = "pl"


@dataclass(frozen=True)
class VerbRelation:
    """A made-of verb phrase with agreeing forms for both numbers.

    Passive relations conjugate their auxiliary ("is made of" / "are made
    of"); the flag controls where a typicality adverb is inserted.
    """

    id: str
    singular: str
    plural: str
    passive: bool = False

    def conjugated(self, number: Number) -> str:
        return self.singular if number is Number.SINGULAR else self.plural

    def with_adverb(self, number: Number, adverb: str) -> str:
        form = self.conjugated(number)
        if self.passive:
            aux, _, rest = form.partition(" ")
            return f"{aux} {adverb} {rest}"
        return f"{adverb} {form}"


def _active(verb: str, singular: str) -> VerbRelation:
    slug = verb.replace(" ", "_")
    return VerbRelation(id=slug, singular=singular, plural=verb, passive=False)


def _passive(phrase: str) -> VerbRelation:
    # phrase like "made out of"; auxiliary conjugates
    slug = "be_" + phrase.replace(" ", "_")
    return VerbRelation(id=slug, singular=f"is {phrase}", plural=f"are {phrase}", passive=True)


# The 18 made-of relations. "be build of/with" keeps the attested participle.
DEFAULT_RELATIONS = (
    _active("consist of", "consists of"),
    _active("comprise", "comprises"),
    _active("contain", "contains"),
    _passive("formed by"),
    _passive("formed of"),
    _passive("made up of"),
    _passive("made up from"),
    _passive("made of"),
    _passive("made out of"),
    _passive("composed of"),
    _passive("manufactured from"),
    _active("encompass", "encompasses"),
    _active("entail", "entails"),
    _active("include", "includes"),
    _active("involve", "involves"),
    _active("incorporate", "incorporates"),
    _passive("build of"),
    _passive("build with"),
)

# Five high-frequency main verbs with no made-of semantics; used as a
# negative control against the material relations above.
CONTROL_RELATIONS = (
    _active("make", "makes"),
    _active("say", "says"),
    _active("go", "goes"),
    _active("use", "uses"),
    _active("take", "takes"),
)

DEFAULT_QUANTIFIERS = ("most", "all", "many", "some")
DEFAULT_ADVERBS = ("usually", "generally", "normally", "possibly", "plausibly")
# Two attested context phrases plus four shipped defaults; replace via config.
DEFAULT_CONTEXTS = (
    "when used in a vehicle,",
    "when used in vehicles,",
    "in a vehicle,",
    "in vehicles,",
    "in automotive engineering,",
    "in the automotive domain,",
)
DEFAULT_MASK = "<mask>"


@dataclass(frozen=True)
class TemplateConfig:
    relations: tuple[VerbRelation, ...] = DEFAULT_RELATIONS
    quantifiers: tuple[str, ...] = DEFAULT_QUANTIFIERS
    adverbs: tuple[str, ...] = DEFAULT_ADVERBS
    contexts: tuple[str, ...] = DEFAULT_CONTEXTS
    mask_token: str = DEFAULT_MASK
    capitalize: bool = False

    def validate(self) -> None:
        if not self.relations:
            raise InvalidConfigError("template config needs at least one verb relation")
        ids = [r.id for r in self.relations]
        if len(set(ids)) != len(ids):
            raise InvalidConfigError("duplicate relation ids in config")

    def template_count(self) -> int:
        r = len(self.relations)
        return 2 * r + len(self.quantifiers) * r + 2 * len(self.adverbs) * r + 2 * len(self.contexts) * r


@dataclass(frozen=True)
class QueryTemplate:
    variant_class: VariantClass
    number: Number
    relation_id: str
    modifier: Optional[str] = None
    template_id: str = ""


@dataclass(frozen=True)
class RenderedQuery:
    text: str
    component_surface: str
    template_id: str


def _ctx_slug(context: str) -> str:
    return "_".join(context.strip().rstrip(",").split())


def build_template_set(cfg: TemplateConfig) -> list[QueryTemplate]:
    """Enumerate the full template grammar in a stable order."""
    cfg.validate()
    templates: list[QueryTemplate] = []
    for rel in cfg.relations:
        for number in (Number.SINGULAR, Number.PLURAL):
            templates.append(
                QueryTemplate(
                    VariantClass.BASE, number, rel.id,
                    template_id=f"base:{number.value}:{rel.id}",
                )
            )
    for rel in cfg.relations:
        for quant in cfg.quantifiers:
            templates.append(
                QueryTemplate(
                    VariantClass.QUANTIFIED, Number.PLURAL, rel.id, quant,
                    template_id=f"quant:pl:{rel.id}:{quant}",
                )
            )
    for rel in cfg.relations:
        for adverb in cfg.adverbs:
            for number in (Number.SINGULAR, Number.PLURAL):
                templates.append(
                    QueryTemplate(
                        VariantClass.ADVERBIAL, number, rel.id, adverb,
                        template_id=f"adv:{number.value}:{rel.id}:{adverb}",
                    )
                )
    for rel in cfg.relations:
        for ctx in cfg.contexts:
            for number in (Number.SINGULAR, Number.PLURAL):
                templates.append(
                    QueryTemplate(
                        VariantClass.CONTEXTUAL, number, rel.id, ctx,
                        template_id=f"ctx:{number.value}:{rel.id}:{_ctx_slug(ctx)}",
                    )
                )
    return templates


def render(cfg: TemplateConfig, template: QueryTemplate, component: Component) -> RenderedQuery:
    """Realize one template for one component as a cloze sentence."""
    relations = {r.id: r for r in cfg.relations}
    if template.relation_id not in relations:
        raise InvalidConfigError(f"template relation {template.relation_id!r} not in config")
    rel = relations[template.relation_id]

    if template.number is Number.SINGULAR:
        subject = f"{indefinite_article(component.surface)} {component.surface}"
    else:
        plural = pluralize(component.surface, component.plural_override)
        if not plural.strip():
            raise MorphologyError(f"cannot pluralize {component.surface!r}")
        subject = plural

    if template.variant_class is VariantClass.QUANTIFIED:
        subject = f"{template.modifier} {subject}"

    if template.variant_class is VariantClass.ADVERBIAL:
        verb = rel.with_adverb(template.number, template.modifier or "")
    else:
        verb = rel.conjugated(template.number)

    clause = f"{subject} {verb} {cfg.mask_token}."
    if template.variant_class is VariantClass.CONTEXTUAL:
        clause = f"{template.modifier} {clause}"
    if cfg.capitalize:
        clause = clause[0].upper() + clause[1:]

    if clause.count(cfg.mask_token) != 1:
        raise MorphologyError(f"mask token rendered {clause.count(cfg.mask_token)} times in {clause!r}")
    return RenderedQuery(text=clause, component_surface=component.surface, template_id=template.template_id)


def render_all(cfg: TemplateConfig, component: Component) -> list[RenderedQuery]:
    return [render(cfg, t, component) for t in build_template_set(cfg)]


def control_config(cfg: Optional[TemplateConfig] = None) -> TemplateConfig:
    """The same grammar with control verbs in place of made-of relations."""
    base = cfg or TemplateConfig()
    return replace(base, relations=CONTROL_RELATIONS)


def build_control_set(component: Component, cfg: Optional[TemplateConfig] = None) -> list[RenderedQuery]:
    return render_all(control_config(cfg), component)


# -- config file I/O --

def config_from_dict(raw: dict) -> TemplateConfig:
    """Build a config from a plain dict; omitted keys fall back to defaults."""
    relations = tuple(
        VerbRelation(
            id=row["id"],
            singular=row["singular"],
            plural=row["plural"],
            passive=bool(row.get("passive", False)),
        )
        for row in raw["relations"]
    ) if "relations" in raw else DEFAULT_RELATIONS
    cfg = TemplateConfig(
        relations=relations,
        quantifiers=tuple(raw.get("quantifiers", DEFAULT_QUANTIFIERS)),
        adverbs=tuple(raw.get("adverbs", DEFAULT_ADVERBS)),
        contexts=tuple(raw.get("contexts", DEFAULT_CONTEXTS)),
        mask_token=raw.get("mask_token", DEFAULT_MASK),
        capitalize=bool(raw.get("capitalize", False)),
    )
    cfg.validate()
    return cfg


def load_template_config(path: str | Path) -> TemplateConfig:
    return config_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def config_to_dict(cfg: TemplateConfig) -> dict:
    return {
        "relations": [
            {"id": r.id, "singular": r.singular, "plural": r.plural, "passive": r.passive}
            for r in cfg.relations
        ],
        "quantifiers": list(cfg.quantifiers),
        "adverbs": list(cfg.adverbs),
        "contexts": list(cfg.contexts),
        "mask_token": cfg.mask_token,
        "capitalize": cfg.capitalize,
    }

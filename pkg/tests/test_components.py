import pytest
from hypothesis import given
from hypothesis import strategies as st

from matprobe.components import (
    Component,
    ComponentDataset,
    head_of,
    indefinite_article,
    load_component_dataset,
    parse_component,
    pluralize,
)
from matprobe.errors import (
    DuplicateSurfaceError,
    EmptyDatasetError,
    EmptyInputError,
    TooManyConstituentsError,
)


def test_parse_multiword():
    c = parse_component("engine valves rocker arm")
    assert c.constituents == ("engine", "valves", "rocker", "arm")
    assert c.head == "arm"
    assert c.surface == "engine valves rocker arm"


def test_parse_simplex():
    c = parse_component("battery")
    assert c.constituents == ("battery",)
    assert c.head == "battery"


def test_parse_normalizes_case_and_whitespace():
    c = parse_component("Seat Heating   Switch LED")
    assert c.surface == "seat heating switch led"
    assert c.head == "led"


def test_parse_empty_raises():
    with pytest.raises(EmptyInputError):
        parse_component("   ")


def test_parse_constituent_cap():
    with pytest.raises(TooManyConstituentsError):
        parse_component("a b c d e f g h i")
    # configurable cap
    assert parse_component("a b c", max_constituents=3).head == "c"
    with pytest.raises(TooManyConstituentsError):
        parse_component("a b c", max_constituents=2)


@pytest.mark.parametrize(
    "surface,head",
    [
        ("seat heating switch led", "led"),
        ("battery", "battery"),
        ("pressure sensor", "sensor"),
    ],
)
def test_head_of(surface, head):
    assert head_of(parse_component(surface)).surface == head


def test_head_of_idempotent():
    for raw in ["battery", "pressure sensor", "engine valves rocker arm"]:
        c = parse_component(raw)
        assert head_of(head_of(c)) == head_of(c)


@pytest.mark.parametrize(
    "phrase,plural",
    [
        ("battery", "batteries"),
        ("lamp", "lamps"),
        ("cooling blower switch", "cooling blower switches"),
        ("gear box", "gear boxes"),
        ("relay", "relays"),  # vowel + y
        ("buzzer", "buzzers"),
        ("brush", "brushes"),
        ("lens", "lenses"),
    ],
)
def test_pluralize_rules(phrase, plural):
    assert pluralize(phrase) == plural


def test_pluralize_override_wins():
    assert pluralize("chassis", override="chassis") == "chassis"
    assert pluralize("battery", override="battery packs") == "battery packs"


def test_pluralize_irregular_table():
    assert pluralize("wheel tooth") == "wheel teeth"


def test_pluralize_injective_on_fixture():
    nouns = ["battery", "lamp", "switch", "sensor", "box", "relay", "arm", "pump", "brush", "valve"]
    plurals = [pluralize(n) for n in nouns]
    assert len(set(plurals)) == len(plurals)


@pytest.mark.parametrize(
    "phrase,article",
    [
        ("battery", "a"),
        ("engine valves rocker arm", "an"),
        ("universal joint", "a"),
        ("oil pump", "an"),
        ("hour counter", "an"),
        ("european adapter", "a"),
    ],
)
def test_indefinite_article(phrase, article):
    assert indefinite_article(phrase) == article


@given(st.lists(st.text(alphabet="abcdefghij", min_size=1, max_size=6), min_size=1, max_size=8))
def test_parse_render_roundtrip(words):
    surface = " ".join(words)
    assert parse_component(surface).surface == surface


def test_load_dataset_dedup(tmp_path):
    path = tmp_path / "components.txt"
    path.write_text("battery\npressure sensor\nbattery\n")
    dataset = load_component_dataset(path)
    assert len(dataset) == 2


def test_load_dataset_duplicate_error_mode(tmp_path):
    path = tmp_path / "components.txt"
    path.write_text("battery\nbattery\n")
    with pytest.raises(DuplicateSurfaceError):
        load_component_dataset(path, on_duplicate="error")


def test_load_dataset_head_index(tmp_path):
    path = tmp_path / "components.txt"
    path.write_text("battery\npressure sensor\noil pressure sensor\n")
    dataset = load_component_dataset(path)
    assert len(dataset.by_head["sensor"]) == 2
    assert len(dataset.by_head["battery"]) == 1
    # every component under exactly one key, its own head
    total = sum(len(v) for v in dataset.by_head.values())
    assert total == len(dataset)


def test_load_dataset_empty_file(tmp_path):
    path = tmp_path / "components.txt"
    path.write_text("\n\n")
    with pytest.raises(EmptyDatasetError):
        load_component_dataset(path)


def test_load_dataset_json_records(tmp_path):
    path = tmp_path / "components.txt"
    path.write_text('{"surface": "wheel chassis", "plural_override": "wheel chassis"}\nbattery\n')
    dataset = load_component_dataset(path)
    overrides = {c.surface: c.plural_override for c in dataset.components}
    assert overrides["wheel chassis"] == "wheel chassis"
    assert overrides["battery"] is None


def test_constituent_histogram(tmp_path):
    path = tmp_path / "components.txt"
    path.write_text("battery\nbrake disk\npressure sensor\noil pressure sensor\n")
    dataset = load_component_dataset(path)
    assert dataset.constituent_histogram() == {1: 1, 2: 2, 3: 1}


def test_component_invariants_enforced():
    with pytest.raises(ValueError):
        Component(surface="a b", constituents=("a", "b"), head="a")
    with pytest.raises(ValueError):
        Component(surface="a b", constituents=("a",), head="a")

"""Instance file grammar: round trips and parse errors with line numbers."""

import pytest

from opacity import (
    GenParams,
    InstanceSemanticError,
    InstanceSyntaxError,
    fixture,
    FIXTURE_NAMES,
    parse_instance,
    random_instance,
    serialize_instance,
)

F1_TEXT = """\
# a small test system
notion: cso
automaton G
states: 0 1 2
observable: a
unobservable: u
initial: 0
marked:
0 a 1
0 u 2   # unobservable detour
2 a 2
end
secret: 1
nonsecret: 2
"""


def test_parse_f1_file():
    assert parse_instance(F1_TEXT) == fixture("F1")


def test_round_trip_fixtures():
    for name in FIXTURE_NAMES:
        inst = fixture(name)
        text = serialize_instance(inst)
        assert parse_instance(text) == inst
        assert serialize_instance(parse_instance(text)) == text


def test_round_trip_random_instances():
    for notion in ("cso", "iso", "ifo", "lbo", "kso", "inso"):
        for seed in range(25):
            inst = random_instance(notion, GenParams(n=1 + seed % 4, seed=seed, k=1))
            text = serialize_instance(inst)
            assert parse_instance(text) == inst, (notion, seed)


def test_kso_requires_k_line():
    text = serialize_instance(fixture("F1")).replace("notion: cso", "notion: kso")
    with pytest.raises(InstanceSemanticError) as exc:
        parse_instance(text)
    assert "k:" in str(exc.value)


def test_k_line_rejected_elsewhere():
    text = serialize_instance(fixture("F1")).replace(
        "notion: cso", "notion: cso\nk: 1")
    with pytest.raises(InstanceSyntaxError) as exc:
        parse_instance(text)
    assert exc.value.line == 2


def test_duplicate_state_id():
    text = F1_TEXT.replace("states: 0 1 2", "states: 0 1 1")
    with pytest.raises(InstanceSyntaxError) as exc:
        parse_instance(text)
    assert "duplicate state id" in str(exc.value)


def test_unknown_key_rejected():
    text = F1_TEXT.replace("secret: 1", "color: red\nsecret: 1")
    with pytest.raises(InstanceSyntaxError):
        parse_instance(text)


def test_undeclared_event_is_semantic_error():
    text = F1_TEXT.replace("0 a 1", "0 z 1")
    with pytest.raises(InstanceSemanticError) as exc:
        parse_instance(text)
    assert "unknown event 'z'" in str(exc.value)


def test_unterminated_block():
    with pytest.raises(InstanceSyntaxError):
        parse_instance(F1_TEXT.replace("end\n", ""))


def test_bad_transition_arity():
    with pytest.raises(InstanceSyntaxError) as exc:
        parse_instance(F1_TEXT.replace("0 a 1", "0 a"))
    assert exc.value.line == 9


def test_lbo_secret_names_automaton():
    text = serialize_instance(fixture("F5"))
    broken = text.replace("secret: AS", "secret: NOPE")
    with pytest.raises(InstanceSemanticError):
        parse_instance(broken)


def test_ifo_pairs_parse():
    text = """\
notion: ifo
automaton G
states: 0 1 2
observable: a
unobservable: u
initial: 0
marked:
0 a 1
0 u 2
2 a 2
end
secret: 0,1
nonsecret: 0,2
"""
    inst = parse_instance(text)
    assert inst.secret_pairs == {("0", "1")}
    assert inst.nonsecret_pairs == {("0", "2")}
    assert parse_instance(serialize_instance(inst)) == inst


def test_ifo_bad_pair():
    text = """\
notion: ifo
automaton G
states: 0
observable: a
unobservable:
initial: 0
marked:
end
secret: 0,
nonsecret:
"""
    with pytest.raises(InstanceSyntaxError):
        parse_instance(text)


def test_empty_file():
    with pytest.raises(InstanceSyntaxError):
        parse_instance("")
    with pytest.raises(InstanceSyntaxError):
        parse_instance("# only a comment\n")

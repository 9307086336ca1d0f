"""Instance validation, verdict plumbing and the fixture registry."""

import pytest

from opacity import (
    Alphabet,
    CsoInstance,
    IsoInstance,
    KsoInstance,
    LboInstance,
    Nfa,
    Verdict,
    Witness,
    fixture,
    FIXTURE_NAMES,
    notion_of,
    validate_instance,
)


def test_fixture_registry():
    assert set(FIXTURE_NAMES) == {"F1", "F2", "F3", "F4o", "F4x", "F5", "F5x"}
    assert notion_of(fixture("F1")) == "cso"
    assert notion_of(fixture("F4o")) == "iso"
    assert notion_of(fixture("F5")) == "lbo"
    with pytest.raises(KeyError):
        fixture("F9")


def test_validate_instance_clean():
    assert validate_instance(fixture("F1")) == []
    assert validate_instance(fixture("F5")) == []


def test_iso_secret_must_be_initial():
    f4 = fixture("F4o")
    bad = IsoInstance(f4.system, secret_initial={"0", "1"}, nonsecret_initial={"0"})
    assert validate_instance(bad) == []  # both are initial in F4o
    worse = IsoInstance(
        Nfa(("0", "1"), f4.system.alphabet, f4.system.transitions, {"0"}, set()),
        secret_initial={"1"},
        nonsecret_initial={"0"},
    )
    diags = validate_instance(worse)
    assert len(diags) == 1 and "not initial" in diags[0]


def test_lbo_alphabet_mismatch():
    f5 = fixture("F5")
    other = Nfa(("0",), Alphabet.make(["z"]), set(), {"0"}, {"0"})
    diags = validate_instance(LboInstance(f5.secret_aut, other))
    assert any("share one alphabet" in d for d in diags)


def test_lbo_blocking_rejected():
    alpha = Alphabet.make(["a"])
    blocking = Nfa(("0", "1"), alpha, {("0", "a", "1")}, {"0"}, set())
    partner = Nfa(("0",), alpha, set(), {"0"}, {"0"})
    diags = validate_instance(LboInstance(blocking, partner))
    assert any("blocking" in d for d in diags)
    assert validate_instance(LboInstance.make(blocking, partner)) == []


def test_overlapping_secret_nonsecret_is_legal():
    f1 = fixture("F1")
    overlap = CsoInstance(f1.system, {"1", "2"}, {"2"})
    assert validate_instance(overlap) == []


def test_kso_negative_k():
    f1 = fixture("F1")
    bad = KsoInstance(f1.system, f1.secret, f1.nonsecret, -1)
    assert any("non-negative" in d for d in validate_instance(bad))


def test_verdict_witness_consistency():
    with pytest.raises(ValueError):
        Verdict(True, Witness("cso", ("a",)))
    with pytest.raises(ValueError):
        Verdict(False, None)
    Verdict(True)
    Verdict(False, Witness("cso", ("a",)))

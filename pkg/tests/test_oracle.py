"""Bounded definitional oracle: frozen examples and self-consistency."""

import pytest

from opacity import (
    InvalidInstance,
    MalformedWitness,
    Witness,
    fixture,
    oracle_verify,
    witness_check,
)
from opacity.oracle import complete_bound

from helpers import as_inso, as_kso, corpus


F1 = fixture("F1")
F2 = fixture("F2")
F3 = fixture("F3")


def test_f1_cso_opaque_complete_at_8():
    result = oracle_verify(F1, 8)
    assert not result.violated and result.complete and result.bound == 8
    assert complete_bound(F1) == 8


def test_f2_cso_violated_at_tiny_bound():
    result = oracle_verify(F2, 2)
    assert result.violated
    assert result.witness.prefix_obs == ("a",)


def test_f3_kso1_violated():
    inst = as_kso(F3, 1)
    result = oracle_verify(inst, 4)
    assert result.violated
    assert result.witness.prefix_obs == ("a",)
    assert result.witness.suffix_obs == ("a",)


def test_f3_kso0_opaque():
    result = oracle_verify(as_kso(F3, 0), 6)
    assert not result.violated and result.complete


def test_early_exhaustion_is_complete():
    # F3 generates no string longer than 2, so bound 3 exhausts it.
    result = oracle_verify(F3, 3)
    assert not result.violated and result.complete


def test_invalid_instance_rejected():
    from opacity import CsoInstance
    bad = CsoInstance(F1.system, {"9"}, set())
    with pytest.raises(InvalidInstance):
        oracle_verify(bad, 3)
    with pytest.raises(InvalidInstance):
        oracle_verify(F1, -1)


# -- witness_check ------------------------------------------------------------


def test_witness_check_examples():
    assert witness_check(F2, Witness("cso", ("a",)))
    assert not witness_check(F1, Witness("cso", ("a",)))
    assert witness_check(as_kso(F3, 1), Witness("kso", ("a",), ("a",)))


def test_witness_check_rejects_wrong_shape():
    with pytest.raises(MalformedWitness):
        witness_check(F1, Witness("iso", ("a",)))
    with pytest.raises(MalformedWitness):
        witness_check(as_kso(F3, 1), Witness("kso", ("a",)))
    with pytest.raises(MalformedWitness):
        witness_check(F1, Witness("cso", ("a",), ("a",)))
    with pytest.raises(MalformedWitness):
        witness_check(F1, Witness("cso", ("u",)))


def test_kso_witness_with_too_long_suffix_fails():
    assert not witness_check(as_kso(F3, 0), Witness("kso", ("a",), ("a",)))


# -- self-consistency ----------------------------------------------------------


def test_kso0_equals_cso_on_random_instances():
    for inst in corpus("cso", 40, n_max=3, start_seed=100):
        cso = oracle_verify(inst, 6, budget=300_000)
        kso = oracle_verify(as_kso(inst, 0), 6, budget=300_000)
        assert cso.violated == kso.violated
        if cso.violated:
            assert cso.witness.prefix_obs == kso.witness.prefix_obs


def test_kso_antitone_in_k():
    for inst in corpus("cso", 25, n_max=3, start_seed=300):
        verdicts = [oracle_verify(as_kso(inst, k), 6, budget=300_000).violated
                    for k in range(4)]
        # once violated, stays violated for larger K
        for earlier, later in zip(verdicts, verdicts[1:]):
            assert later or not earlier


def test_inso_at_least_as_strict_as_kso():
    for inst in corpus("cso", 25, n_max=3, start_seed=500):
        kso = oracle_verify(as_kso(inst, 3), 6, budget=300_000)
        inso = oracle_verify(as_inso(inst), 6, budget=300_000)
        if kso.violated:
            assert inso.violated


def test_oracle_violations_pass_witness_check():
    for notion in ("cso", "iso", "ifo", "lbo", "kso", "inso"):
        for inst in corpus(notion, 30, n_max=3, start_seed=700):
            result = oracle_verify(inst, 5, budget=300_000)
            if result.violated:
                assert witness_check(inst, result.witness), (notion, inst)

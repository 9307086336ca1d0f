"""Seeded generation: reproducibility, validity, structural postconditions."""

import pytest

from opacity import (
    GenParams,
    InvalidParams,
    LboInstance,
    is_deterministic,
    random_instance,
    random_nfa,
    serialize_instance,
    validate_instance,
)

NOTIONS = ("cso", "iso", "ifo", "lbo", "kso", "inso")


def test_same_seed_same_nfa():
    p = GenParams(n=5, ell=2, uo=1, density=0.4, seed=123)
    assert random_nfa(p) == random_nfa(p)
    assert random_nfa(p) != random_nfa(GenParams(n=5, ell=2, uo=1, density=0.4, seed=124))


def test_same_seed_byte_identical_instance():
    for notion in NOTIONS:
        p = GenParams(n=4, seed=99, k=2)
        a = random_instance(notion, p)
        b = random_instance(notion, p)
        assert a == b
        assert serialize_instance(a) == serialize_instance(b)


def test_deterministic_flag():
    for seed in range(30):
        nfa = random_nfa(GenParams(n=4, ell=2, uo=1, density=0.8,
                                   deterministic=True, seed=seed))
        assert is_deterministic(nfa)
        assert len(nfa.initial) == 1


def test_density_zero_means_no_transitions():
    nfa = random_nfa(GenParams(n=4, density=0.0, seed=5))
    assert nfa.transitions == frozenset()


def test_exact_state_count_and_initial_nonempty():
    for seed in range(20):
        nfa = random_nfa(GenParams(n=6, seed=seed))
        assert len(nfa.states) == 6
        assert nfa.initial


def test_instances_always_validate_10000_samples():
    seed = 0
    per_notion = 10_000 // len(NOTIONS) + 1
    for notion in NOTIONS:
        for _ in range(per_notion):
            p = GenParams(n=1 + seed % 5, ell=1 + seed % 2, uo=seed % 2,
                          density=0.1 + (seed % 5) * 0.15,
                          deterministic=bool(seed % 3 == 0), seed=seed, k=seed % 4)
            inst = random_instance(notion, p)
            assert validate_instance(inst) == [], (notion, seed)
            seed += 1


def test_iso_sets_sampled_within_initials():
    for seed in range(25):
        inst = random_instance("iso", GenParams(n=5, seed=seed,
                                                secret_fraction=0.6,
                                                nonsecret_fraction=0.6))
        assert inst.secret_initial <= inst.system.initial
        assert inst.nonsecret_initial <= inst.system.initial
        assert not inst.secret_initial & inst.nonsecret_initial


def test_lbo_instances_are_trim():
    from opacity import trim
    for seed in range(25):
        inst = random_instance("lbo", GenParams(n=4, seed=seed))
        assert isinstance(inst, LboInstance)
        assert trim(inst.secret_aut) == inst.secret_aut
        assert trim(inst.nonsecret_aut) == inst.nonsecret_aut


def test_param_validation():
    with pytest.raises(InvalidParams):
        random_nfa(GenParams(n=0))
    with pytest.raises(InvalidParams):
        random_nfa(GenParams(n=2, ell=0))
    with pytest.raises(InvalidParams):
        random_nfa(GenParams(n=2, density=1.5))
    with pytest.raises(InvalidParams):
        random_instance("nope", GenParams(n=2))

"""Seeded random automata and opacity instances.

Reproducibility contract: the generator is driven by SplitMix64, a fixed
64-bit mixing PRNG, so identical (notion, params) produce byte-identical
instances on any platform or language that implements the same fifteen
lines.  The draw sequence below is part of the format; reordering draws
is a breaking change.

Secret and non-secret data are sampled disjoint: the @-split
transformations cannot preserve determinism for states that are both
secret and non-secret, and the property suite checks determinism
preservation on generated corpora.  Overlap stays legal in the model
itself.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .errors import InvalidParams
from .fa import Alphabet, Nfa
from .model import (
    CsoInstance,
    IfoInstance,
    InsoInstance,
    IsoInstance,
    KsoInstance,
    LboInstance,
    OpacityInstance,
)

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64: state += 0x9E3779B97F4A7C15; output = mix(state)."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def unit(self) -> float:
        return self.next_u64() / 2 ** 64

    def below(self, n: int) -> int:
        # Modulo bias is irrelevant for test-instance sampling.
        return self.next_u64() % n


@dataclass(frozen=True)
class GenParams:
    n: int
    ell: int = 2
    uo: int = 1
    density: float = 0.3
    secret_fraction: float = 0.3
    nonsecret_fraction: float = 0.3
    deterministic: bool = False
    seed: int = 0
    k: Optional[int] = None


_OBS_NAMES = "abcdefghijklmnopqrst"


def _check(p: GenParams):
    if p.n < 1:
        raise InvalidParams(f"n must be at least 1, got {p.n}")
    if p.ell < 1:
        raise InvalidParams(f"ell must be at least 1, got {p.ell}")
    if p.uo < 0:
        raise InvalidParams(f"uo must be non-negative, got {p.uo}")
    if p.ell > len(_OBS_NAMES):
        raise InvalidParams(f"ell must be at most {len(_OBS_NAMES)}")
    for name, value in (("density", p.density),
                        ("secret_fraction", p.secret_fraction),
                        ("nonsecret_fraction", p.nonsecret_fraction)):
        if not 0.0 <= value <= 1.0:
            raise InvalidParams(f"{name} must be within [0, 1], got {value}")
    if p.k is not None and p.k < 0:
        raise InvalidParams(f"k must be non-negative, got {p.k}")


def random_nfa(p: GenParams) -> Nfa:
    """Exactly n states; each (state, event) slot is filled with
    probability ``density`` (one target if deterministic, else a small
    geometric number of targets); at least one initial state."""
    _check(p)
    rng = SplitMix64(p.seed)
    states = tuple(str(i) for i in range(p.n))
    observable = tuple(_OBS_NAMES[i] for i in range(p.ell))
    unobservable = tuple(f"u{i}" for i in range(p.uo))
    alphabet = Alphabet.make(observable, unobservable)
    transitions = set()
    for s in states:
        for e in alphabet.events:
            if rng.unit() < p.density:
                if p.deterministic:
                    count = 1
                else:
                    count = 1
                    while count < 3 and rng.unit() < 0.5:
                        count += 1
                for _ in range(count):
                    transitions.add((s, e, states[rng.below(p.n)]))
    if p.deterministic:
        initial = frozenset([states[rng.below(p.n)]])
    else:
        initial = frozenset(s for s in states if rng.unit() < 0.35)
        if not initial:
            initial = frozenset([states[rng.below(p.n)]])
    marked = frozenset(s for s in states if rng.unit() < 0.3)
    return Nfa(states, alphabet, frozenset(transitions), initial, marked)


def _sample_disjoint(rng: SplitMix64, pool, first_fraction, second_fraction):
    first = set()
    second = set()
    for item in pool:
        if rng.unit() < first_fraction:
            first.add(item)
        elif rng.unit() < second_fraction:
            second.add(item)
    return frozenset(first), frozenset(second)


def random_instance(notion: str, p: GenParams) -> OpacityInstance:
    """A valid instance of the given notion; always passes validation."""
    _check(p)
    system = random_nfa(p)
    rng = SplitMix64(p.seed ^ 0xA5A5A5A5A5A5A5A5)
    if notion in ("cso", "inso", "kso"):
        secret, nonsecret = _sample_disjoint(
            rng, system.states, p.secret_fraction, p.nonsecret_fraction)
        if notion == "cso":
            return CsoInstance(system, secret, nonsecret)
        if notion == "inso":
            return InsoInstance(system, secret, nonsecret)
        k = p.k if p.k is not None else rng.below(4)
        return KsoInstance(system, secret, nonsecret, k)
    if notion == "iso":
        pool = sorted(system.initial, key=system._index.get)
        secret, nonsecret = _sample_disjoint(
            rng, pool, p.secret_fraction, p.nonsecret_fraction)
        return IsoInstance(system, secret, nonsecret)
    if notion == "ifo":
        idx = system._index
        pool = sorted(
            ((q0, q) for q0 in system.initial for q in system.states),
            key=lambda pair: (idx[pair[0]], idx[pair[1]]),
        )
        secret, nonsecret = _sample_disjoint(
            rng, pool, p.secret_fraction, p.nonsecret_fraction)
        return IfoInstance(system, secret, nonsecret)
    if notion == "lbo":
        marked_s = frozenset(s for s in system.states if rng.unit() < p.secret_fraction)
        marked_ns = frozenset(s for s in system.states if rng.unit() < p.nonsecret_fraction)
        return LboInstance.make(
            replace(system, marked=marked_s), replace(system, marked=marked_ns)
        )
    raise InvalidParams(f"unknown notion {notion!r}")

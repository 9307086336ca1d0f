"""Shared corpus builders and cross-checking utilities for the tests."""

from __future__ import annotations

import itertools

from opacity import (
    BudgetExceeded,
    GenParams,
    InsoInstance,
    KsoInstance,
    oracle_verify,
    random_instance,
)
from opacity.oracle import complete_bound


def corpus(notion: str, count: int, *, n_max=5, ell_max=3, start_seed=1,
           deterministic_every=2, unary=False, k=None, density_choices=(0.2, 0.3, 0.45)):
    """A deterministic stream of `count` random instances for a notion.

    Sizes and densities cycle through small ranges; every
    ``deterministic_every``-th instance is transition-deterministic.
    """
    out = []
    seed = start_seed
    sizes = itertools.cycle(range(1, n_max + 1))
    densities = itertools.cycle(density_choices)
    while len(out) < count:
        n = next(sizes)
        density = next(densities)
        if unary:
            ell, uo = 1, (seed % 2)
        else:
            ell = 2 + (seed % (ell_max - 1)) if ell_max > 2 else 2
            uo = seed % 2
            if ell + uo > ell_max + 1:
                uo = 0
        params = GenParams(
            n=n, ell=ell, uo=uo, density=density,
            deterministic=(seed % deterministic_every == 0),
            seed=seed, k=k,
        )
        out.append(random_instance(notion, params))
        seed += 1
    return out


def oracle_at_complete_bound(inst, budget=400_000):
    """Oracle verdict at the documented complete bound, or None when the
    instance's raw enumeration blows the work budget (caller re-rolls)."""
    try:
        result = oracle_verify(inst, complete_bound(inst), budget=budget)
    except BudgetExceeded:
        return None
    assert result.complete
    return result


def complete_oracle_corpus(notion: str, count: int, *, n_max=3, start_seed=1,
                           budget=400_000):
    """(instance, oracle verdict) pairs where the oracle ran to its
    complete bound within the budget; oversized enumerations re-roll."""
    pairs = []
    seed = start_seed
    sizes = itertools.cycle(range(1, n_max + 1))
    densities = itertools.cycle((0.15, 0.25, 0.35))
    while len(pairs) < count:
        params = GenParams(
            n=next(sizes), ell=1 + (seed % 2), uo=seed % 2,
            density=next(densities), deterministic=(seed % 2 == 0),
            seed=seed, k=(seed % 3) if notion == "kso" else None,
        )
        seed += 1
        inst = random_instance(notion, params)
        result = oracle_at_complete_bound(inst, budget=budget)
        if result is None:
            continue
        pairs.append((inst, result))
    return pairs


def as_inso(inst) -> InsoInstance:
    return InsoInstance(inst.system, inst.secret, inst.nonsecret)


def as_kso(inst, k: int) -> KsoInstance:
    return KsoInstance(inst.system, inst.secret, inst.nonsecret, k)

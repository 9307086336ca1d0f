"""Definitional brute-force deciders, the ground truth for everything else.

The universal side of each definition is checked by enumerating raw
strings over the full alphabet, shortest first and lexicographic within a
length, following the transition relation directly.  The existential side
("does some string with the same observation reach ...") is decided
exactly by a reachability search over (state, observation position)
pairs.  Neither side shares any code with the observer-based verifiers:
no closures, no subset construction, no projected automata.

Violations returned by the oracle are therefore sound at every bound;
only "opaque" answers depend on the bound, and ``BoundedVerdict.complete``
says whether the bound certifies exhaustiveness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import BudgetExceeded, InvalidInstance, MalformedWitness
from .fa import Nfa, estimate, estimate_from
from .model import (
    CsoInstance,
    IfoInstance,
    InsoInstance,
    IsoInstance,
    KsoInstance,
    LboInstance,
    OpacityInstance,
    Verdict,
    Witness,
    notion_of,
    validate_instance,
)


@dataclass(frozen=True)
class BoundedVerdict:
    """Outcome of a bounded enumeration.

    ``complete`` is true when the bound reaches the documented
    exhaustiveness threshold for the notion, or when the enumeration ran
    out of strings early (the generated language is finite and was fully
    explored), so "opaque up to bound" is in fact "opaque".
    """

    violated: bool
    witness: Optional[Witness]
    bound: int
    complete: bool

    @property
    def opaque(self) -> bool:
        return not self.violated

    def as_verdict(self) -> Verdict:
        return Verdict(opaque=not self.violated, witness=self.witness)


def complete_bound(inst: OpacityInstance) -> int:
    """Enumeration depth at which the oracle is certified exhaustive."""
    if isinstance(inst, LboInstance):
        n1 = max(1, len(inst.secret_aut.states))
        n2 = len(inst.nonsecret_aut.states)
        return n1 * 2 ** n2
    n = len(inst.system.states)
    if isinstance(inst, (CsoInstance, IsoInstance, IfoInstance)):
        return 2 ** n
    if isinstance(inst, KsoInstance):
        return 2 ** n + min(inst.k, n * 2 ** n)
    if isinstance(inst, InsoInstance):
        return 2 ** n + n * 2 ** n
    raise TypeError(type(inst).__name__)


class _Budget:
    __slots__ = ("left",)

    def __init__(self, amount: Optional[int]):
        self.left = amount

    def spend(self, units: int = 1):
        if self.left is None:
            return
        self.left -= units
        if self.left < 0:
            raise BudgetExceeded("oracle enumeration budget exhausted")


def _raw_successors(nfa: Nfa, states: frozenset[str], event: str) -> frozenset[str]:
    out: set[str] = set()
    for s in states:
        out |= nfa.successors(s, event)
    return frozenset(out)


def _levels(nfa: Nfa, starts: frozenset[str], bound: int, budget: _Budget):
    """Yield (word, reached set) for all alive raw strings, in (length,
    lexicographic) order, then True if the enumeration exhausted early."""
    events = sorted(nfa.alphabet.events)
    level = [((), starts)] if starts else []
    length = 0
    while level and length <= bound:
        for item in level:
            yield item
        if length == bound:
            break
        nxt = []
        for word, here in level:
            for e in events:
                budget.spend()
                there = _raw_successors(nfa, here, e)
                if there:
                    nxt.append((word + (e,), there))
        level = nxt
        length += 1
    yield not level  # exhausted before the bound


def _realizable_ends(nfa: Nfa, starts, observation: Sequence[str],
                     budget: _Budget) -> frozenset[str]:
    """All states some string projecting to ``observation`` can end in,
    starting anywhere in ``starts``.  Plain (state, position) reachability
    over single paths; no state subsets involved."""
    observable = nfa.alphabet.observable
    uo_events = [e for e in nfa.alphabet.events if e not in observable]
    k = len(observation)
    seen = {(s, 0) for s in starts}
    stack = list(seen)
    while stack:
        state, pos = stack.pop()
        budget.spend()
        moves = []
        for e in uo_events:
            moves.extend((t, pos) for t in nfa.successors(state, e))
        if pos < k:
            moves.extend((t, pos + 1) for t in nfa.successors(state, observation[pos]))
        for node in moves:
            if node not in seen:
                seen.add(node)
                stack.append(node)
    return frozenset(s for s, pos in seen if pos == k)


def oracle_verify(inst: OpacityInstance, bound: int,
                  budget: Optional[int] = None) -> BoundedVerdict:
    """Apply the defining condition of the instance's notion literally to
    every raw string up to ``bound``.  The first violation in (length,
    lexicographic, split-position) order is returned with its witness."""
    diags = validate_instance(inst)
    if diags:
        raise InvalidInstance(diags)
    if bound < 0:
        raise InvalidInstance(["bound must be non-negative"])
    b = _Budget(budget)
    notion = notion_of(inst)
    checker = {
        "cso": _oracle_cso,
        "iso": _oracle_iso,
        "lbo": _oracle_lbo,
        "ifo": _oracle_ifo,
        "kso": _oracle_kso,
        "inso": _oracle_inso,
    }[notion]
    witness, exhausted = checker(inst, bound, b)
    complete = exhausted or bound >= complete_bound(inst)
    return BoundedVerdict(
        violated=witness is not None,
        witness=witness,
        bound=bound,
        complete=complete,
    )


def _oracle_cso(inst: CsoInstance, bound: int, b: _Budget):
    sys = inst.system
    memo: dict[tuple[str, ...], bool] = {}
    exhausted = False
    for item in _levels(sys, sys.initial, bound, b):
        if isinstance(item, bool):
            exhausted = item
            break
        word, here = item
        if here & inst.secret:
            obs = tuple(e for e in word if e in sys.alphabet.observable)
            matched = memo.get(obs)
            if matched is None:
                matched = bool(
                    _realizable_ends(sys, sys.initial, obs, b) & inst.nonsecret)
                memo[obs] = matched
            if not matched:
                return Witness("cso", obs,
                               note=f"string {''.join(word)!r} reaches only secret states"), exhausted
    return None, exhausted


def _oracle_iso(inst: IsoInstance, bound: int, b: _Budget):
    sys = inst.system
    all_states = frozenset(sys.states)
    memo: dict[tuple[str, ...], bool] = {}
    exhausted = False
    for item in _levels(sys, inst.secret_initial, bound, b):
        if isinstance(item, bool):
            exhausted = item
            break
        word, _ = item
        obs = tuple(e for e in word if e in sys.alphabet.observable)
        matched = memo.get(obs)
        if matched is None:
            matched = bool(
                _realizable_ends(sys, inst.nonsecret_initial, obs, b) & all_states)
            memo[obs] = matched
        if not matched:
            return Witness("iso", obs,
                           note=f"string {''.join(word)!r} runs only from secret initials"), exhausted
    return None, exhausted


def _oracle_lbo(inst: LboInstance, bound: int, b: _Budget):
    a_s, a_ns = inst.secret_aut, inst.nonsecret_aut
    memo: dict[tuple[str, ...], bool] = {}
    exhausted = False
    for item in _levels(a_s, a_s.initial, bound, b):
        if isinstance(item, bool):
            exhausted = item
            break
        word, here = item
        if here & a_s.marked:
            obs = tuple(e for e in word if e in a_s.alphabet.observable)
            matched = memo.get(obs)
            if matched is None:
                matched = bool(
                    _realizable_ends(a_ns, a_ns.initial, obs, b) & a_ns.marked)
                memo[obs] = matched
            if not matched:
                return Witness("lbo", obs,
                               note=f"secret string {''.join(word)!r} has no non-secret match"), exhausted
    return None, exhausted


def _oracle_ifo(inst: IfoInstance, bound: int, b: _Budget):
    sys = inst.system
    order = {s: i for i, s in enumerate(sys.states)}
    secret_pairs = sorted(inst.secret_pairs, key=lambda p: (order[p[0]], order[p[1]]))
    ns_pairs = sorted(inst.nonsecret_pairs, key=lambda p: (order[p[0]], order[p[1]]))
    memo: dict[tuple[str, ...], bool] = {}

    def matched(obs):
        hit = memo.get(obs)
        if hit is None:
            hit = any(
                qf in _realizable_ends(sys, frozenset([q0]), obs, b)
                for q0, qf in ns_pairs
            )
            memo[obs] = hit
        return hit

    # Walk all secret pairs level by level so the first witness is still
    # (length, pair order, lexicographic).
    events = sorted(sys.alphabet.events)
    levels = [[((), frozenset([q0]))] for q0, _ in secret_pairs]
    length = 0
    while any(levels) and length <= bound:
        for (q0, qf), level in zip(secret_pairs, levels):
            for word, here in level:
                if qf in here:
                    obs = tuple(e for e in word if e in sys.alphabet.observable)
                    if not matched(obs):
                        return Witness(
                            "ifo", obs,
                            note=f"pair ({q0},{qf}) reached by {''.join(word)!r} with no non-secret match",
                        ), False
        if length == bound:
            break
        new_levels = []
        for level in levels:
            nxt = []
            for word, here in level:
                for e in events:
                    b.spend()
                    there = _raw_successors(sys, here, e)
                    if there:
                        nxt.append((word + (e,), there))
            new_levels.append(nxt)
        levels = new_levels
        length += 1
    return None, not any(levels)


def _two_phase_match(sys: Nfa, nonsecret, obs_s, obs_t, b: _Budget) -> bool:
    """Does some string with observation obs_s end in a non-secret state
    from which some string with observation obs_t is executable?"""
    junction = _realizable_ends(sys, sys.initial, obs_s, b) & nonsecret
    if not junction:
        return False
    return bool(_realizable_ends(sys, junction, obs_t, b))


def _oracle_split(inst, bound: int, b: _Budget, max_suffix: Optional[int]):
    """Shared K-step / infinite-step enumeration over all splits st."""
    sys = inst.system
    kind = notion_of(inst)
    observable = sys.alphabet.observable
    memo: dict[tuple[tuple[str, ...], tuple[str, ...]], bool] = {}
    exhausted = False
    for item in _levels(sys, sys.initial, bound, b):
        if isinstance(item, bool):
            exhausted = item
            break
        word, _ = item
        # Reached sets of every prefix, recomputed by direct simulation.
        sets = [sys.initial]
        for e in word:
            sets.append(_raw_successors(sys, sets[-1], e))
        for i in range(len(word) + 1):
            s, t = word[:i], word[i:]
            obs_t = tuple(e for e in t if e in observable)
            if max_suffix is not None and len(obs_t) > max_suffix:
                continue
            mid = sets[i] & inst.secret
            if not mid:
                continue
            run = mid
            alive = True
            for e in t:
                b.spend()
                run = _raw_successors(sys, run, e)
                if not run:
                    alive = False
                    break
            if not alive:
                continue
            obs_s = tuple(e for e in s if e in observable)
            key = (obs_s, obs_t)
            hit = memo.get(key)
            if hit is None:
                hit = _two_phase_match(sys, inst.nonsecret, obs_s, obs_t, b)
                memo[key] = hit
            if not hit:
                return Witness(
                    kind, obs_s, obs_t,
                    note=f"split {''.join(s)!r}|{''.join(t)!r} has no non-secret match",
                ), exhausted
    return None, exhausted


def _oracle_kso(inst: KsoInstance, bound: int, b: _Budget):
    return _oracle_split(inst, bound, b, max_suffix=inst.k)


def _oracle_inso(inst: InsoInstance, bound: int, b: _Budget):
    return _oracle_split(inst, bound, b, max_suffix=None)


# -- witness replay ----------------------------------------------------------


def witness_check(inst: OpacityInstance, w: Witness) -> bool:
    """True iff replaying the witness certifies the violation definitionally."""
    diags = validate_instance(inst)
    if diags:
        raise InvalidInstance(diags)
    notion = notion_of(inst)
    if w.kind != notion:
        raise MalformedWitness(f"witness kind {w.kind!r} does not match {notion!r} instance")
    two_phase = notion in ("kso", "inso")
    if two_phase and w.suffix_obs is None:
        raise MalformedWitness(f"{notion} witness needs a suffix observation")
    if not two_phase and w.suffix_obs is not None:
        raise MalformedWitness(f"{notion} witness must not carry a suffix observation")

    if isinstance(inst, LboInstance):
        observable = inst.alphabet.observable
    else:
        observable = inst.system.alphabet.observable
    for part in (w.prefix_obs,) + ((w.suffix_obs,) if two_phase else ()):
        for e in part:
            if e not in observable:
                raise MalformedWitness(f"witness event {e!r} is not observable")

    if isinstance(inst, CsoInstance):
        est = estimate(inst.system, w.prefix_obs)
        return bool(est & inst.secret) and not est & inst.nonsecret
    if isinstance(inst, IsoInstance):
        from_secret = estimate_from(inst.system, inst.secret_initial, w.prefix_obs)
        from_nonsecret = estimate_from(inst.system, inst.nonsecret_initial, w.prefix_obs)
        return bool(from_secret) and not from_nonsecret
    if isinstance(inst, LboInstance):
        hits = estimate(inst.secret_aut, w.prefix_obs) & inst.secret_aut.marked
        matches = estimate(inst.nonsecret_aut, w.prefix_obs) & inst.nonsecret_aut.marked
        return bool(hits) and not matches
    if isinstance(inst, IfoInstance):
        reached = any(
            qf in estimate_from(inst.system, frozenset([q0]), w.prefix_obs)
            for q0, qf in inst.secret_pairs
        )
        matched = any(
            qf in estimate_from(inst.system, frozenset([q0]), w.prefix_obs)
            for q0, qf in inst.nonsecret_pairs
        )
        return reached and not matched
    # Two-phase notions.
    if isinstance(inst, KsoInstance) and len(w.suffix_obs) > inst.k:
        return False
    est = estimate(inst.system, w.prefix_obs)
    secret_alive = any(
        estimate_from(inst.system, frozenset([x]), w.suffix_obs)
        for x in est & inst.secret
    )
    nonsecret_alive = estimate_from(inst.system, est & inst.nonsecret, w.suffix_obs)
    return secret_alive and not nonsecret_alive

"""Finite-automata kernel for partially observed discrete-event systems.

An automaton's alphabet is split into observable and unobservable events;
the intruder sees only the observable ones.  This module provides the
handful of primitives everything else is built from: unobservable closure,
the observer macro-step, state estimation, the projected automaton, the
subset-construction observer, totalized complementation, the synchronous
product, and trimming.

Conventions used throughout:

* All values are immutable and every function is pure.
* State subsets are canonically ordered by the owning automaton's state
  list; the canonical name of a subset is ``{a,b}`` with members in that
  order.  This makes observer output byte-stable across runs.
* Every breadth-first exploration expands events in lexicographic order,
  so shortest witnesses are also lexicographically smallest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import AlphabetMismatch, NotDeterministic, UnknownEvent


@dataclass(frozen=True)
class Alphabet:
    """Event universe with its observable/unobservable partition."""

    events: tuple[str, ...]
    observable: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "observable", frozenset(self.observable))

    @staticmethod
    def make(observable: Sequence[str], unobservable: Sequence[str] = ()) -> "Alphabet":
        """Build an alphabet listing observable events first."""
        return Alphabet(tuple(observable) + tuple(unobservable), frozenset(observable))

    @property
    def unobservable(self) -> frozenset[str]:
        return frozenset(self.events) - self.observable

    def observable_events(self) -> tuple[str, ...]:
        """Observable events in declaration order."""
        return tuple(e for e in self.events if e in self.observable)


@dataclass(frozen=True)
class Nfa:
    """Nondeterministic finite automaton over a partitioned alphabet.

    The one representation used for systems, observers and products.
    Constructors are permissive; use :func:`validate` to collect
    invariant violations as diagnostics.
    """

    states: tuple[str, ...]
    alphabet: Alphabet
    transitions: frozenset[tuple[str, str, str]]
    initial: frozenset[str]
    marked: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions",
                           frozenset(tuple(t) for t in self.transitions))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "marked", frozenset(self.marked))

    # -- cached lookup tables -------------------------------------------

    @cached_property
    def _index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def _succ(self) -> dict[tuple[str, str], frozenset[str]]:
        acc: dict[tuple[str, str], set[str]] = {}
        for p, e, q in self.transitions:
            acc.setdefault((p, e), set()).add(q)
        return {k: frozenset(v) for k, v in acc.items()}

    @cached_property
    def _event_target_masks(self) -> dict[str, tuple[int, ...]]:
        """Per event, per source index: bitmask of target indices."""
        n = len(self.states)
        idx = self._index
        table: dict[str, list[int]] = {e: [0] * n for e in self.alphabet.events}
        for p, e, q in self.transitions:
            if p in idx and q in idx and e in table:
                table[e][idx[p]] |= 1 << idx[q]
        return {e: tuple(v) for e, v in table.items()}

    @cached_property
    def _uo_target_masks(self) -> tuple[int, ...]:
        """Per source index: bitmask of unobservable-successor indices."""
        n = len(self.states)
        merged = [0] * n
        for e in self.alphabet.unobservable:
            row = self._event_target_masks.get(e)
            if row:
                for i in range(n):
                    merged[i] |= row[i]
        return tuple(merged)

    # -- subset helpers --------------------------------------------------

    def successors(self, state: str, event: str) -> frozenset[str]:
        return self._succ.get((state, event), frozenset())

    def mask_of(self, states: Iterable[str]) -> int:
        idx = self._index
        m = 0
        for s in states:
            m |= 1 << idx[s]
        return m

    def set_of(self, mask: int) -> frozenset[str]:
        return frozenset(s for i, s in enumerate(self.states) if mask >> i & 1)

    def subset_name(self, states_or_mask) -> str:
        """Canonical name of a subset: members in state-list order."""
        if isinstance(states_or_mask, int):
            members = [s for i, s in enumerate(self.states) if states_or_mask >> i & 1]
        else:
            inside = frozenset(states_or_mask)
            members = [s for s in self.states if s in inside]
        return "{" + ",".join(members) + "}"


# -- validation ----------------------------------------------------------


def validate(nfa: Nfa) -> list[str]:
    """Collect one diagnostic per invariant violation; empty means valid."""
    diags: list[str] = []
    seen_states: set[str] = set()
    for s in nfa.states:
        if not s:
            diags.append("empty state id")
        if s in seen_states:
            diags.append(f"duplicate state id {s!r}")
        seen_states.add(s)
    seen_events: set[str] = set()
    for e in nfa.alphabet.events:
        if not e:
            diags.append("empty event name")
        if e in seen_events:
            diags.append(f"duplicate event name {e!r}")
        seen_events.add(e)
    for e in nfa.alphabet.observable:
        if e not in seen_events:
            diags.append(f"observable event {e!r} not declared")
    for p, e, q in sorted(nfa.transitions):
        if p not in seen_states:
            diags.append(f"unknown source state {p!r} in transition ({p},{e},{q})")
        if q not in seen_states:
            diags.append(f"unknown target state {q!r} in transition ({p},{e},{q})")
        if e not in seen_events:
            diags.append(f"unknown event {e!r} in transition ({p},{e},{q})")
    for s in sorted(nfa.initial):
        if s not in seen_states:
            diags.append(f"initial state {s!r} not declared")
    for s in sorted(nfa.marked):
        if s not in seen_states:
            diags.append(f"marked state {s!r} not declared")
    return diags


# -- closure, step, estimate ----------------------------------------------


def _closure_mask(nfa: Nfa, mask: int) -> int:
    uo = nfa._uo_target_masks
    frontier = mask
    while frontier:
        new = 0
        m = frontier
        while m:
            low = m & -m
            new |= uo[low.bit_length() - 1]
            m ^= low
        frontier = new & ~mask
        mask |= new
    return mask


def _step_mask(nfa: Nfa, mask: int, event: str) -> int:
    if event not in nfa.alphabet.observable:
        raise UnknownEvent(f"event {event!r} is not observable here")
    row = nfa._event_target_masks[event]
    closed = _closure_mask(nfa, mask)
    out = 0
    m = closed
    while m:
        low = m & -m
        out |= row[low.bit_length() - 1]
        m ^= low
    return _closure_mask(nfa, out)


def unobservable_closure(nfa: Nfa, states: Iterable[str]) -> frozenset[str]:
    """Least superset of ``states`` closed under unobservable transitions."""
    return nfa.set_of(_closure_mask(nfa, nfa.mask_of(states)))


def step(nfa: Nfa, states: Iterable[str], event: str) -> frozenset[str]:
    """One observer macro-step: closure, then event moves, then closure."""
    return nfa.set_of(_step_mask(nfa, nfa.mask_of(states), event))


def estimate_from(nfa: Nfa, starts: Iterable[str], observation: Sequence[str]) -> frozenset[str]:
    """States reachable from ``starts`` under some string projecting to ``observation``."""
    mask = _closure_mask(nfa, nfa.mask_of(starts))
    for e in observation:
        mask = _step_mask(nfa, mask, e)
    return nfa.set_of(mask)


def estimate(nfa: Nfa, observation: Sequence[str]) -> frozenset[str]:
    """The intruder's current-state estimate after ``observation``."""
    return estimate_from(nfa, nfa.initial, observation)


# -- projection and observer ----------------------------------------------


def project(nfa: Nfa) -> Nfa:
    """Projected automaton: observable labels only, closures folded in.

    Keeps the state list; adds an edge ``p -e-> q`` whenever ``q`` is in
    ``step({p}, e)``, and replaces the initial set by its unobservable
    closure.  Estimates computed on the result agree with the original.
    """
    obs_events = nfa.alphabet.observable_events()
    out: set[tuple[str, str, str]] = set()
    for p in nfa.states:
        base = _closure_mask(nfa, nfa.mask_of([p]))
        for e in obs_events:
            row = nfa._event_target_masks[e]
            hit = 0
            m = base
            while m:
                low = m & -m
                hit |= row[low.bit_length() - 1]
                m ^= low
            hit = _closure_mask(nfa, hit)
            for q in nfa.set_of(hit):
                out.add((p, e, q))
    return Nfa(
        states=nfa.states,
        alphabet=Alphabet.make(obs_events),
        transitions=frozenset(out),
        initial=unobservable_closure(nfa, nfa.initial),
        marked=nfa.marked,
    )


def observer_masks(nfa: Nfa):
    """Subset-construction exploration in BFS/lexicographic order.

    Returns ``(masks, mask_index, edges, parents)`` where ``masks`` lists
    reachable nonempty subsets in discovery order, ``edges`` holds
    ``(i, event, j)`` index triples, and ``parents[i]`` is ``(j, event)``
    for the discovery edge (``None`` for the initial subset).  The empty
    estimate is never materialized.
    """
    events = sorted(nfa.alphabet.observable)
    start = _closure_mask(nfa, nfa.mask_of(nfa.initial))
    if start == 0:
        return [], {}, [], []
    masks = [start]
    mask_index = {start: 0}
    edges: list[tuple[int, str, int]] = []
    parents: list[tuple[int, str] | None] = [None]
    queue = 0
    while queue < len(masks):
        i = queue
        queue += 1
        for e in events:
            nxt = _step_mask(nfa, masks[i], e)
            if nxt == 0:
                continue
            j = mask_index.get(nxt)
            if j is None:
                j = len(masks)
                masks.append(nxt)
                mask_index[nxt] = j
                parents.append((i, e))
            edges.append((i, e, j))
    return masks, mask_index, edges, parents


def observer_path(parents, state_index: int) -> tuple[str, ...]:
    """Reconstruct the discovery observation leading to an observer state."""
    path: list[str] = []
    i = state_index
    while parents[i] is not None:
        j, e = parents[i]
        path.append(e)
        i = j
    return tuple(reversed(path))


def observer_subsets(nfa: Nfa) -> tuple[Nfa, dict[str, frozenset[str]]]:
    """Observer automaton plus the map from state names to subsets."""
    masks, _, edges, _ = observer_masks(nfa)
    names = [nfa.subset_name(m) for m in masks]
    submap = {name: nfa.set_of(m) for name, m in zip(names, masks)}
    marked = frozenset(name for name, sub in submap.items() if sub & nfa.marked)
    return (
        Nfa(
            states=tuple(names),
            alphabet=Alphabet.make(nfa.alphabet.observable_events()),
            transitions=frozenset((names[i], e, names[j]) for i, e, j in edges),
            initial=frozenset(names[:1]),
            marked=marked,
        ),
        submap,
    )


def observer(nfa: Nfa) -> Nfa:
    """Deterministic observer of the system (subset construction)."""
    return observer_subsets(nfa)[0]


def complete_and_complement(det: Nfa, marking: Iterable[str]) -> Nfa:
    """Totalize a deterministic automaton and complement the given marking.

    A fresh sink is added exactly when some (state, observable event) pair
    is undefined; the sink is marked, being outside the marking.  An
    automaton with no initial state totalizes to the sink alone, which
    accepts everything (the complement of the empty language).
    """
    marking = frozenset(marking)
    if len(det.initial) > 1:
        raise NotDeterministic("more than one initial state")
    obs_events = det.alphabet.observable_events()
    for (p, e), targets in det._succ.items():
        if len(targets) > 1:
            raise NotDeterministic(f"state {p!r} has {len(targets)} successors on {e!r}")
    missing = [
        (p, e)
        for p in det.states
        for e in obs_events
        if not det.successors(p, e)
    ]
    need_sink = bool(missing) or not det.initial
    transitions = set(det.transitions)
    states = det.states
    initial = det.initial
    if need_sink:
        sink = "{}"
        taken = set(det.states)
        while sink in taken:
            sink += "_"
        states = det.states + (sink,)
        transitions.update((p, e, sink) for p, e in missing)
        transitions.update((sink, e, sink) for e in obs_events)
        if not initial:
            initial = frozenset([sink])
    return Nfa(
        states=states,
        alphabet=det.alphabet,
        transitions=frozenset(transitions),
        initial=initial,
        marked=frozenset(states) - marking,
    )


# -- product, determinism, trim --------------------------------------------


def product_pairs(a: Nfa, b: Nfa) -> tuple[Nfa, dict[str, tuple[str, str]]]:
    """Synchronous product on the shared observable alphabet.

    Both operands must be fully observable.  States are the reachable
    pairs; a pair is marked when both components are.
    """
    if a.alphabet.unobservable or b.alphabet.unobservable:
        raise AlphabetMismatch("product operands must be fully observable")
    if a.alphabet.observable != b.alphabet.observable:
        raise AlphabetMismatch("product operands must share their observable alphabet")
    events = sorted(a.alphabet.observable)
    a_idx, b_idx = a._index, b._index
    start = sorted(
        ((a_idx[p], b_idx[q]) for p in a.initial for q in b.initial)
    )
    names: dict[tuple[int, int], str] = {}
    used: set[str] = set()

    def name_pair(pair):
        base = f"({a.states[pair[0]]},{b.states[pair[1]]})"
        while base in used:
            base += "_"
        used.add(base)
        names[pair] = base

    order: list[tuple[int, int]] = []
    for pair in start:
        if pair not in names:
            name_pair(pair)
            order.append(pair)
    edges: list[tuple[str, str, str]] = []
    queue = 0
    while queue < len(order):
        ia, ib = order[queue]
        queue += 1
        p, q = a.states[ia], b.states[ib]
        for e in events:
            for p2 in sorted(a.successors(p, e), key=a_idx.get):
                for q2 in sorted(b.successors(q, e), key=b_idx.get):
                    pair = (a_idx[p2], b_idx[q2])
                    if pair not in names:
                        name_pair(pair)
                        order.append(pair)
                    edges.append((names[(ia, ib)], e, names[pair]))
    state_names = tuple(names[pair] for pair in order)
    marked = frozenset(
        names[(ia, ib)]
        for ia, ib in order
        if a.states[ia] in a.marked and b.states[ib] in b.marked
    )
    nfa = Nfa(
        states=state_names,
        alphabet=Alphabet.make(a.alphabet.observable_events()),
        transitions=frozenset(edges),
        initial=frozenset(names[pair] for pair in start),
        marked=marked,
    )
    return nfa, {names[pair]: (a.states[pair[0]], b.states[pair[1]]) for pair in order}


def product(a: Nfa, b: Nfa) -> Nfa:
    return product_pairs(a, b)[0]


def is_deterministic(nfa: Nfa) -> bool:
    """At most one successor per (state, event) pair.

    The initial-set size is not part of this check; deterministic systems
    with several initial states are common here.
    """
    return all(len(t) <= 1 for t in nfa._succ.values())


def trim(nfa: Nfa) -> Nfa:
    """Restrict to states reachable from the initial set and co-reachable
    to the marked set.  The result may be empty."""
    fwd: dict[str, set[str]] = {s: set() for s in nfa.states}
    bwd: dict[str, set[str]] = {s: set() for s in nfa.states}
    for p, _, q in nfa.transitions:
        fwd[p].add(q)
        bwd[q].add(p)

    def reach(seeds, adj):
        seen = set(seeds)
        stack = list(seeds)
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    alive = reach(nfa.initial, fwd) & reach(nfa.marked, bwd)
    states = tuple(s for s in nfa.states if s in alive)
    return Nfa(
        states=states,
        alphabet=nfa.alphabet,
        transitions=frozenset(
            (p, e, q) for p, e, q in nfa.transitions if p in alive and q in alive
        ),
        initial=nfa.initial & alive,
        marked=nfa.marked & alive,
    )


# -- observable depth (unary machinery) -------------------------------------


def _sccs(n: int, adj: list[list[int]]) -> list[int]:
    """Kosaraju strongly connected components; returns component id per node,
    ids in reverse topological order of the condensation (0 first)."""
    visited = [False] * n
    order: list[int] = []
    for root in range(n):
        if visited[root]:
            continue
        stack = [(root, 0)]
        visited[root] = True
        while stack:
            node, ptr = stack[-1]
            if ptr < len(adj[node]):
                stack[-1] = (node, ptr + 1)
                nxt = adj[node][ptr]
                if not visited[nxt]:
                    visited[nxt] = True
                    stack.append((nxt, 0))
            else:
                order.append(node)
                stack.pop()
    radj: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in adj[u]:
            radj[v].append(u)
    comp = [-1] * n
    current = 0
    for root in reversed(order):
        if comp[root] != -1:
            continue
        comp[root] = current
        stack = [root]
        while stack:
            for nxt in radj[stack.pop()]:
                if comp[nxt] == -1:
                    comp[nxt] = current
                    stack.append(nxt)
        current += 1
    return comp


def observable_depths(nfa: Nfa) -> dict[str, int | float]:
    """Maximum number of observable steps executable from each state.

    ``math.inf`` marks states from which a cycle containing an observable
    transition is reachable; otherwise the depth is a finite integer
    (at most n-1).  Runs in O(states + transitions).
    """
    n = len(nfa.states)
    idx = nfa._index
    observable = nfa.alphabet.observable
    adj: list[list[int]] = [[] for _ in range(n)]
    weight: dict[tuple[int, int], int] = {}
    for p, e, q in sorted(nfa.transitions):
        u, v = idx[p], idx[q]
        w = 1 if e in observable else 0
        prev = weight.get((u, v))
        if prev is None:
            adj[u].append(v)
            weight[(u, v)] = w
        elif w > prev:
            weight[(u, v)] = w
    comp = _sccs(n, adj)
    ncomp = (max(comp) + 1) if n else 0
    infinite = [False] * ncomp
    cedges: dict[tuple[int, int], int] = {}
    for (u, v), w in weight.items():
        cu, cv = comp[u], comp[v]
        if cu == cv:
            if w:
                infinite[cu] = True
        else:
            prev = cedges.get((cu, cv))
            if prev is None or w > prev:
                cedges[(cu, cv)] = w
    csucc: list[list[tuple[int, int]]] = [[] for _ in range(ncomp)]
    for (cu, cv), w in cedges.items():
        csucc[cu].append((cv, w))
    # Kosaraju assigns component ids in topological order (edges go from
    # lower to higher id), so sinks are processed first when descending.
    depth: list[float] = [0.0] * ncomp
    for c in range(ncomp - 1, -1, -1):
        best: float = 0.0
        for cv, w in csucc[c]:
            cand = depth[cv] + w
            if cand > best:
                best = cand
        depth[c] = math.inf if infinite[c] else best
    result: dict[str, int | float] = {}
    for s in nfa.states:
        d = depth[comp[idx[s]]]
        result[s] = d if d == math.inf else int(d)
    return result


def max_observable_depth(nfa: Nfa, starts: Iterable[str]) -> int | float:
    """Depth of the best start state; -1 when ``starts`` is empty
    (no run exists at all, the generated language is empty)."""
    depths = observable_depths(nfa)
    starts = list(starts)
    if not starts:
        return -1
    return max(depths[s] for s in starts)


# -- plain string enumeration (exploration helper for tests/tools) ----------


def iter_language(nfa: Nfa, max_len: int, marked_only: bool = False) -> Iterator[tuple[str, ...]]:
    """Yield generated (or marked) strings up to ``max_len``, shortest first,
    lexicographic within a length."""
    events = sorted(nfa.alphabet.events)
    level: list[tuple[tuple[str, ...], frozenset[str]]] = [((), nfa.initial)]
    for _ in range(max_len + 1):
        nxt: list[tuple[tuple[str, ...], frozenset[str]]] = []
        for word, here in level:
            if not here:
                continue
            if not marked_only or here & nfa.marked:
                yield word
            for e in events:
                there = frozenset().union(*(nfa.successors(s, e) for s in here)) if here else frozenset()
                if there:
                    nxt.append((word + (e,), there))
        level = nxt
    return

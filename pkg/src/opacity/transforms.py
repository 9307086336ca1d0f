"""The complete transformation matrix among the six opacity notions.

Every transformation is polynomial, preserves verdicts, preserves
transition determinism, and (where the event-preserving variant applies)
the number of observable events.  Each returns a
:class:`~opacity.model.TransformOutput` carrying the new instance plus a
total provenance map from every output state and event back to its
origin.

Fresh names: new events are "@" (observable) and "u" (unobservable), with
"_1", "_2", ... suffixes on collision; fresh state names are derived from
their role and uniquified the same way.  The provenance map, not the
names, is the source of truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import fa
from .errors import (
    EmptyInitial,
    InvalidInstance,
    NameClash,
    NotUnary,
    TooFewEvents,
    UnaryObstruction,
    UnknownEvent,
)
from .fa import Alphabet, Nfa
from .model import (
    CsoInstance,
    IfoInstance,
    InsoInstance,
    IsoInstance,
    KsoInstance,
    LboInstance,
    TransformOutput,
    validate_instance,
)


def _require_valid(inst):
    diags = validate_instance(inst)
    if diags:
        raise InvalidInstance(diags)


def _unique(base: str, taken: set[str]) -> str:
    name = base
    i = 0
    while name in taken:
        i += 1
        name = f"{base}_{i}"
    taken.add(name)
    return name


def _original_events(alphabet: Alphabet) -> dict[str, tuple]:
    return {e: ("original",) for e in alphabet.events}


# -- binary encoding (observable-event reduction) ------------------------------


@dataclass(frozen=True)
class EncodingPlan:
    """Binary codes for a set of at least three observable events."""

    encoded_events: tuple[str, ...]
    code_length: int
    code: dict[str, str]


def make_encoding_plan(alphabet: Alphabet, encoded_events=None) -> EncodingPlan:
    """Assign fixed-width binary codewords, in declaration order."""
    if encoded_events is None:
        encoded_events = alphabet.observable_events()
    encoded_events = tuple(encoded_events)
    if len(encoded_events) < 3:
        raise TooFewEvents(f"need at least 3 events to encode, got {len(encoded_events)}")
    for e in encoded_events:
        if e not in alphabet.observable:
            raise UnknownEvent(f"cannot encode non-observable event {e!r}")
    k = math.ceil(math.log2(len(encoded_events)))
    code = {e: format(i, f"0{k}b") for i, e in enumerate(encoded_events)}
    return EncodingPlan(encoded_events, k, code)


def _encode_core(nfa: Nfa, plan: EncodingPlan):
    """Replace each encoded transition by its bit path.

    Intermediate states are keyed (source state, bit prefix) and shared
    across all encoded events leaving that source, which preserves
    determinism: codewords have one fixed width, so a full codeword is
    never a proper prefix of another.
    """
    events = nfa.alphabet.events
    if "0" in events or "1" in events:
        raise NameClash("events '0'/'1' already present")
    gamma = set(plan.encoded_events)
    idx = nfa._index
    event_pos = {e: i for i, e in enumerate(events)}
    taken = set(nfa.states)
    inter: dict[tuple[str, str], str] = {}
    inter_order: list[str] = []
    state_prov: dict[str, tuple] = {s: ("original", s) for s in nfa.states}
    new_transitions: set[tuple[str, str, str]] = set()
    plain = []
    encoded = []
    for t in nfa.transitions:
        (encoded if t[1] in gamma else plain).append(t)
    new_transitions.update(plain)
    for p, e, q in sorted(encoded, key=lambda t: (idx[t[0]], event_pos[t[1]], idx[t[2]])):
        bits = plan.code[e]
        cur = p
        for j, b in enumerate(bits):
            if j == len(bits) - 1:
                nxt = q
            else:
                key = (p, bits[: j + 1])
                nxt = inter.get(key)
                if nxt is None:
                    nxt = _unique(f"{p}~{key[1]}", taken)
                    inter[key] = nxt
                    inter_order.append(nxt)
                    state_prov[nxt] = ("encoding", p, key[1])
            new_transitions.add((cur, b, nxt))
            cur = nxt
    remaining = tuple(e for e in events if e not in gamma)
    alphabet = Alphabet(
        remaining + ("0", "1"),
        (nfa.alphabet.observable - gamma) | {"0", "1"},
    )
    out = Nfa(
        states=nfa.states + tuple(inter_order),
        alphabet=alphabet,
        transitions=frozenset(new_transitions),
        initial=nfa.initial,
        marked=nfa.marked,
    )
    event_prov = {e: ("original",) for e in remaining}
    event_prov["0"] = ("bit", "0")
    event_prov["1"] = ("bit", "1")
    return out, state_prov, event_prov


def binary_encode(nfa: Nfa, plan: EncodingPlan, secret, nonsecret) -> TransformOutput:
    """Encode observable events in binary without touching the secret data.

    The intermediate states are neither secret nor non-secret, so both
    current-state and initial-state verdicts survive the encoding.
    """
    out, state_prov, event_prov = _encode_core(nfa, plan)
    inst = CsoInstance(out, frozenset(secret), frozenset(nonsecret))
    return TransformOutput(inst, state_prov, event_prov, {"encoded": True})


def _encode_events_for(alphabet: Alphabet, at_event: str) -> tuple[str, ...]:
    """The fresh @ plus the first two original observable events."""
    originals = [e for e in alphabet.observable_events() if e != at_event]
    return (at_event, originals[0], originals[1])


# -- CSO <-> LBO ---------------------------------------------------------------


def cso_to_lbo(inst: CsoInstance) -> TransformOutput:
    """Mark the secret states in one copy and the non-secret states in
    another; opacity becomes inclusion of the projected marked languages."""
    _require_valid(inst)
    sys = inst.system
    a_s = fa.trim(replace(sys, marked=inst.secret))
    a_ns = fa.trim(replace(sys, marked=inst.nonsecret))
    out = LboInstance(a_s, a_ns)
    state_prov = {f"S:{q}": ("original", q) for q in a_s.states}
    state_prov.update({f"NS:{q}": ("original", q) for q in a_ns.states})
    return TransformOutput(out, state_prov, _original_events(sys.alphabet), {})


def lbo_to_cso(inst: LboInstance) -> TransformOutput:
    """Disjoint union behind a fresh initial state; the marked states of
    each side become the secret and non-secret state sets."""
    _require_valid(inst)
    a_s, a_ns = inst.secret_aut, inst.nonsecret_aut
    taken: set[str] = set()
    s_name = {q: _unique(f"S:{q}", taken) for q in a_s.states}
    ns_name = {q: _unique(f"NS:{q}", taken) for q in a_ns.states}
    init = _unique("init", taken)
    transitions = {(s_name[p], e, s_name[q]) for p, e, q in a_s.transitions}
    transitions |= {(ns_name[p], e, ns_name[q]) for p, e, q in a_ns.transitions}
    event_taken = set(inst.alphabet.events)
    fresh_events: list[str] = []
    s_idx = a_s._index
    ns_idx = a_ns._index
    for q in sorted(a_s.initial, key=s_idx.get):
        u = _unique("u", event_taken)
        fresh_events.append(u)
        transitions.add((init, u, s_name[q]))
    for q in sorted(a_ns.initial, key=ns_idx.get):
        u = _unique("u", event_taken)
        fresh_events.append(u)
        transitions.add((init, u, ns_name[q]))
    system = Nfa(
        states=tuple(s_name[q] for q in a_s.states)
        + tuple(ns_name[q] for q in a_ns.states)
        + (init,),
        alphabet=Alphabet(
            inst.alphabet.events + tuple(fresh_events), inst.alphabet.observable
        ),
        transitions=frozenset(transitions),
        initial=frozenset([init]),
        marked=frozenset(),
    )
    out = CsoInstance(
        system,
        secret=frozenset(s_name[q] for q in a_s.marked),
        nonsecret=frozenset(ns_name[q] for q in a_ns.marked),
    )
    state_prov: dict[str, tuple] = {s_name[q]: ("original", "S", q) for q in a_s.states}
    state_prov.update({ns_name[q]: ("original", "NS", q) for q in a_ns.states})
    state_prov[init] = ("sink", "init")
    event_prov = _original_events(inst.alphabet)
    event_prov.update({u: ("fresh_u",) for u in fresh_events})
    return TransformOutput(out, state_prov, event_prov, {})


# -- LBO <-> ISO ---------------------------------------------------------------


def lbo_to_iso(inst: LboInstance, preserve_events: bool = False) -> TransformOutput:
    """Stamp acceptance with a fresh observable @ into per-side acceptor
    states; which side a run started on becomes the secret.  With
    ``preserve_events`` the extra event is re-encoded away in binary,
    which needs at least two original observable events."""
    _require_valid(inst)
    if preserve_events and len(inst.alphabet.observable) < 2:
        raise UnaryObstruction(
            "event-count-preserving transformation needs at least two "
            "observable events; none exists for a single observable event"
        )
    a_s, a_ns = inst.secret_aut, inst.nonsecret_aut
    taken: set[str] = set()
    s_name = {q: _unique(f"S:{q}", taken) for q in a_s.states}
    ns_name = {q: _unique(f"NS:{q}", taken) for q in a_ns.states}
    fin_s = _unique("fin_S", taken)
    fin_ns = _unique("fin_NS", taken)
    event_taken = set(inst.alphabet.events)
    at = _unique("@", event_taken)
    transitions = {(s_name[p], e, s_name[q]) for p, e, q in a_s.transitions}
    transitions |= {(ns_name[p], e, ns_name[q]) for p, e, q in a_ns.transitions}
    transitions |= {(s_name[q], at, fin_s) for q in a_s.marked}
    transitions |= {(ns_name[q], at, fin_ns) for q in a_ns.marked}
    states = (
        tuple(s_name[q] for q in a_s.states)
        + (fin_s,)
        + tuple(ns_name[q] for q in a_ns.states)
        + (fin_ns,)
    )
    system = Nfa(
        states=states,
        alphabet=Alphabet(
            inst.alphabet.events + (at,), inst.alphabet.observable | {at}
        ),
        transitions=frozenset(transitions),
        initial=frozenset(s_name[q] for q in a_s.initial)
        | frozenset(ns_name[q] for q in a_ns.initial),
        marked=frozenset(states),
    )
    secret_initial = frozenset(s_name[q] for q in a_s.initial)
    nonsecret_initial = frozenset(ns_name[q] for q in a_ns.initial)
    state_prov: dict[str, tuple] = {s_name[q]: ("original", "S", q) for q in a_s.states}
    state_prov.update({ns_name[q]: ("original", "NS", q) for q in a_ns.states})
    state_prov[fin_s] = ("sink", "fin_S")
    state_prov[fin_ns] = ("sink", "fin_NS")
    event_prov = _original_events(inst.alphabet)
    event_prov[at] = ("fresh_at",)
    flags = {"encoded": False}
    if preserve_events:
        plan = make_encoding_plan(system.alphabet, _encode_events_for(system.alphabet, at))
        system, enc_state_prov, enc_event_prov = _encode_core(system, plan)
        state_prov = _compose_state_prov(state_prov, enc_state_prov)
        event_prov = _compose_event_prov(event_prov, enc_event_prov)
        flags["encoded"] = True
    out = IsoInstance(system, secret_initial, nonsecret_initial)
    return TransformOutput(out, state_prov, event_prov, flags)


def _compose_state_prov(first: dict, second: dict) -> dict:
    """After encoding, pass-through states keep their earlier tags and the
    fresh bit-path states keep their encoding tag (whose source state is a
    pass-through state present in the output)."""
    out = {}
    for state, tag in second.items():
        if tag[0] == "original" and tag[1] in first:
            out[state] = first[tag[1]]
        else:
            out[state] = tag
    return out


def _compose_event_prov(first: dict, second: dict) -> dict:
    out = {}
    for event, tag in second.items():
        if tag == ("original",) and event in first:
            out[event] = first[event]
        else:
            out[event] = tag
    return out


def iso_to_lbo(inst: IsoInstance) -> TransformOutput:
    """Generated languages from the secret and non-secret initial states,
    with every state marked."""
    _require_valid(inst)
    sys = inst.system
    everything = frozenset(sys.states)
    a_s = fa.trim(replace(sys, initial=inst.secret_initial, marked=everything))
    a_ns = fa.trim(replace(sys, initial=inst.nonsecret_initial, marked=everything))
    out = LboInstance(a_s, a_ns)
    state_prov = {f"S:{q}": ("original", q) for q in a_s.states}
    state_prov.update({f"NS:{q}": ("original", q) for q in a_ns.states})
    return TransformOutput(out, state_prov, _original_events(sys.alphabet), {})


# -- into IFO -------------------------------------------------------------------


def iso_to_ifo(inst: IsoInstance) -> TransformOutput:
    """Pair every secret initial state with every state; the final
    component plays no role."""
    _require_valid(inst)
    sys = inst.system
    out = IfoInstance(
        sys,
        secret_pairs=frozenset((q0, q) for q0 in inst.secret_initial for q in sys.states),
        nonsecret_pairs=frozenset(
            (q0, q) for q0 in inst.nonsecret_initial for q in sys.states
        ),
    )
    state_prov = {q: ("original", q) for q in sys.states}
    return TransformOutput(out, state_prov, _original_events(sys.alphabet), {})


def cso_to_ifo(inst: CsoInstance) -> TransformOutput:
    """Pair every initial state with every secret (non-secret) state; the
    initial component plays no role."""
    _require_valid(inst)
    sys = inst.system
    out = IfoInstance(
        sys,
        secret_pairs=frozenset((q0, q) for q0 in sys.initial for q in inst.secret),
        nonsecret_pairs=frozenset((q0, q) for q0 in sys.initial for q in inst.nonsecret),
    )
    state_prov = {q: ("original", q) for q in sys.states}
    return TransformOutput(out, state_prov, _original_events(sys.alphabet), {})


def ifo_to_lbo(inst: IfoInstance) -> TransformOutput:
    """One marked copy of the system per pair, unioned per side."""
    _require_valid(inst)
    sys = inst.system
    idx = sys._index

    def side(pairs, label):
        ordered = sorted(pairs, key=lambda p: (idx[p[0]], idx[p[1]]))
        states: list[str] = []
        transitions: set[tuple[str, str, str]] = set()
        initial: set[str] = set()
        marked: set[str] = set()
        prov: dict[str, tuple] = {}
        for i, (q0, qf) in enumerate(ordered):
            name = {q: f"{label}{i}:{q}" for q in sys.states}
            states.extend(name[q] for q in sys.states)
            transitions |= {(name[p], e, name[q]) for p, e, q in sys.transitions}
            initial.add(name[q0])
            marked.add(name[qf])
            prov.update({name[q]: ("chain", i, q) for q in sys.states})
        return (
            Nfa(tuple(states), sys.alphabet, frozenset(transitions),
                frozenset(initial), frozenset(marked)),
            prov,
        )

    a_s, prov_s = side(inst.secret_pairs, "s")
    a_ns, prov_ns = side(inst.nonsecret_pairs, "n")
    a_s, a_ns = fa.trim(a_s), fa.trim(a_ns)
    out = LboInstance(a_s, a_ns)
    state_prov = {f"S:{q}": prov_s[q] for q in a_s.states}
    state_prov.update({f"NS:{q}": prov_ns[q] for q in a_ns.states})
    return TransformOutput(out, state_prov, _original_events(sys.alphabet), {})


# -- CSO <-> INSO ---------------------------------------------------------------


def cso_to_inso(inst: CsoInstance) -> TransformOutput:
    """Add one absorbing state reachable from every non-secret state by a
    fresh unobservable event; once non-secret, always matchable."""
    _require_valid(inst)
    sys = inst.system
    taken = set(sys.states)
    absorb = _unique("absorb", taken)
    event_taken = set(sys.alphabet.events)
    u = _unique("u", event_taken)
    transitions = set(sys.transitions)
    transitions |= {(q, u, absorb) for q in inst.nonsecret}
    transitions |= {(absorb, a, absorb) for a in sys.alphabet.events}
    system = Nfa(
        states=sys.states + (absorb,),
        alphabet=Alphabet(sys.alphabet.events + (u,), sys.alphabet.observable),
        transitions=frozenset(transitions),
        initial=sys.initial,
        marked=sys.marked,
    )
    out = InsoInstance(system, inst.secret, inst.nonsecret)
    state_prov = {q: ("original", q) for q in sys.states}
    state_prov[absorb] = ("sink", "absorb")
    event_prov = _original_events(sys.alphabet)
    event_prov[u] = ("fresh_u",)
    return TransformOutput(out, state_prov, event_prov, {})


def _three_copies(sys: Nfa, secret, nonsecret):
    """The shared skeleton of the @-split constructions: the system plus a
    plus-copy entered from secret states and a minus-copy entered from
    non-secret states, both via a fresh observable @."""
    taken = set(sys.states)
    plus = {q: _unique(f"{q}+", taken) for q in sys.states}
    minus = {q: _unique(f"{q}-", taken) for q in sys.states}
    event_taken = set(sys.alphabet.events)
    at = _unique("@", event_taken)
    transitions = set(sys.transitions)
    transitions |= {(plus[p], e, plus[q]) for p, e, q in sys.transitions}
    transitions |= {(minus[p], e, minus[q]) for p, e, q in sys.transitions}
    transitions |= {(q, at, plus[q]) for q in secret}
    transitions |= {(q, at, minus[q]) for q in nonsecret}
    states = (
        sys.states
        + tuple(plus[q] for q in sys.states)
        + tuple(minus[q] for q in sys.states)
    )
    state_prov: dict[str, tuple] = {q: ("original", q) for q in sys.states}
    state_prov.update({plus[q]: ("plus", q) for q in sys.states})
    state_prov.update({minus[q]: ("minus", q) for q in sys.states})
    return plus, minus, at, transitions, states, state_prov, taken, event_taken


def inso_to_cso(inst: InsoInstance, preserve_events: bool = False) -> TransformOutput:
    """Split runs at the secret visit with a fresh observable @: the
    plus-copy remembers a secret visit, the minus-copy a non-secret one,
    and current-state opacity of the union decides infinite-step opacity."""
    _require_valid(inst)
    if preserve_events and len(inst.system.alphabet.observable) < 2:
        raise UnaryObstruction(
            "event-count preservation needs two observable events; "
            "use the unary chain construction instead"
        )
    sys = inst.system
    plus, minus, at, transitions, states, state_prov, _, _ = _three_copies(
        sys, inst.secret, inst.nonsecret
    )
    system = Nfa(
        states=states,
        alphabet=Alphabet(sys.alphabet.events + (at,), sys.alphabet.observable | {at}),
        transitions=frozenset(transitions),
        initial=sys.initial,
        marked=frozenset(),
    )
    secret = frozenset(plus[q] for q in sys.states)
    nonsecret = frozenset(minus[q] for q in sys.states)
    event_prov = _original_events(sys.alphabet)
    event_prov[at] = ("fresh_at",)
    flags = {"encoded": False}
    if preserve_events:
        plan = make_encoding_plan(system.alphabet, _encode_events_for(system.alphabet, at))
        system, enc_state_prov, enc_event_prov = _encode_core(system, plan)
        state_prov = _compose_state_prov(state_prov, enc_state_prov)
        event_prov = _compose_event_prov(event_prov, enc_event_prov)
        flags["encoded"] = True
    out = CsoInstance(system, secret, nonsecret)
    return TransformOutput(out, state_prov, event_prov, flags)


# -- CSO <-> K-SO ----------------------------------------------------------------


def cso_to_kso(inst: CsoInstance, k: int) -> TransformOutput:
    """Attach a K-step observable runway behind the non-secret states via
    a fresh unobservable event."""
    _require_valid(inst)
    if k < 0:
        raise InvalidInstance([f"k must be non-negative, got {k}"])
    sys = inst.system
    taken = set(sys.states)
    counters = [_unique(f"k{i}", taken) for i in range(k + 1)]
    event_taken = set(sys.alphabet.events)
    u = _unique("u", event_taken)
    transitions = set(sys.transitions)
    transitions |= {(q, u, counters[0]) for q in inst.nonsecret}
    obs = sys.alphabet.observable_events()
    for i in range(k):
        transitions |= {(counters[i], a, counters[i + 1]) for a in obs}
    system = Nfa(
        states=sys.states + tuple(counters),
        alphabet=Alphabet(sys.alphabet.events + (u,), sys.alphabet.observable),
        transitions=frozenset(transitions),
        initial=sys.initial,
        marked=sys.marked,
    )
    out = KsoInstance(system, inst.secret, inst.nonsecret, k)
    state_prov = {q: ("original", q) for q in sys.states}
    state_prov.update({counters[i]: ("chain", i) for i in range(k + 1)})
    event_prov = _original_events(sys.alphabet)
    event_prov[u] = ("fresh_u",)
    return TransformOutput(out, state_prov, event_prov, {})


def kso_to_cso(inst: KsoInstance, preserve_events: bool = False) -> TransformOutput:
    """The @-split construction plus a counter runway: after the split,
    every minus-copy state can drop onto a K+2 state counter whose first
    and last states are the only non-secret states, so matches are
    possible for exactly K observable steps (and again forever after)."""
    _require_valid(inst)
    if preserve_events and len(inst.system.alphabet.observable) < 2:
        raise UnaryObstruction(
            "event-count preservation needs two observable events; "
            "use the unary chain construction instead"
        )
    sys = inst.system
    k = inst.k
    plus, minus, at, transitions, states, state_prov, taken, event_taken = _three_copies(
        sys, inst.secret, inst.nonsecret
    )
    counters = [_unique(f"k{i}", taken) for i in range(k + 2)]
    u = _unique("u", event_taken)
    transitions |= {(minus[q], u, counters[0]) for q in sys.states}
    obs = sys.alphabet.observable_events()
    for i in range(k + 1):
        transitions |= {(counters[i], a, counters[i + 1]) for a in obs}
    transitions |= {(counters[k + 1], a, counters[k + 1]) for a in obs}
    system = Nfa(
        states=states + tuple(counters),
        alphabet=Alphabet(
            sys.alphabet.events + (at, u), sys.alphabet.observable | {at}
        ),
        transitions=frozenset(transitions),
        initial=sys.initial,
        marked=frozenset(),
    )
    secret = frozenset(plus[q] for q in sys.states)
    nonsecret = frozenset([counters[0], counters[k + 1]])
    state_prov.update({counters[i]: ("chain", i) for i in range(k + 2)})
    event_prov = _original_events(sys.alphabet)
    event_prov[at] = ("fresh_at",)
    event_prov[u] = ("fresh_u",)
    flags = {"encoded": False}
    if preserve_events:
        plan = make_encoding_plan(system.alphabet, _encode_events_for(system.alphabet, at))
        system, enc_state_prov, enc_event_prov = _encode_core(system, plan)
        state_prov = _compose_state_prov(state_prov, enc_state_prov)
        event_prov = _compose_event_prov(event_prov, enc_event_prov)
        flags["encoded"] = True
    out = CsoInstance(system, secret, nonsecret)
    return TransformOutput(out, state_prov, event_prov, flags)


# -- unary chain gadgets -----------------------------------------------------------


def unary_depths(nfa: Nfa, cap: int) -> dict[str, int]:
    """Observable depth per state, saturated at ``cap``.

    Any state from which a cycle containing an observable step is
    reachable gets the cap; otherwise the exact maximal number of
    observable steps executable from the state.
    """
    raw = fa.observable_depths(nfa)
    return {s: cap if d == math.inf else min(int(d), cap) for s, d in raw.items()}


def _unary_chain_gadget(sys: Nfa, secret, nonsecret, chain_len: int, cap: int):
    """Shared INSO/K-SO unary construction: stretch each observable step
    behind a state with positive depth through a chain of ``chain_len``
    fresh states, and mark the first depth-many chain states with the
    secrecy of their base state."""
    obs_events = sys.alphabet.observable_events()
    if len(obs_events) != 1:
        raise NotUnary(f"need exactly one observable event, have {len(obs_events)}")
    event = obs_events[0]
    phi = unary_depths(sys, cap)
    taken = set(sys.states)
    chains: dict[str, list[str]] = {}
    for p in sys.states:
        if phi[p] > 0:
            chains[p] = [_unique(f"{p}.{i}", taken) for i in range(1, chain_len + 1)]
    transitions = set()
    for p, e, q in sys.transitions:
        if e == event and p in chains:
            transitions.add((chains[p][-1], e, q))
        else:
            transitions.add((p, e, q))
    for p, chain in chains.items():
        transitions.add((p, event, chain[0]))
        for i in range(len(chain) - 1):
            transitions.add((chain[i], event, chain[i + 1]))
    states = list(sys.states)
    for p in sys.states:
        if p in chains:
            states.extend(chains[p])
    secret_out = set(secret)
    nonsecret_out = set(nonsecret)
    for p in sys.states:
        if phi[p] > 0:
            if p in secret:
                secret_out.update(chains[p][: phi[p]])
            if p in nonsecret:
                nonsecret_out.update(chains[p][: phi[p]])
    system = Nfa(
        states=tuple(states),
        alphabet=sys.alphabet,
        transitions=frozenset(transitions),
        initial=sys.initial,
        marked=sys.marked,
    )
    state_prov: dict[str, tuple] = {q: ("original", q) for q in sys.states}
    for p, chain in chains.items():
        state_prov.update({name: ("chain", p, i + 1) for i, name in enumerate(chain)})
    return system, frozenset(secret_out), frozenset(nonsecret_out), state_prov


def inso_to_cso_unary(inst: InsoInstance) -> TransformOutput:
    """Chain construction for a single observable event: depths saturate
    at n, chains have length n."""
    _require_valid(inst)
    sys = inst.system
    n = len(sys.states)
    system, secret, nonsecret, state_prov = _unary_chain_gadget(
        sys, inst.secret, inst.nonsecret, chain_len=n, cap=n
    )
    out = CsoInstance(system, secret, nonsecret)
    return TransformOutput(out, state_prov, _original_events(sys.alphabet), {})


def kso_to_cso_unary(inst: KsoInstance) -> TransformOutput:
    """Chain construction with depth cap and chain length K.  Beyond the
    K > n-1 threshold a unary system is K-step opaque exactly when it is
    infinite-step opaque, so the construction delegates to the unbounded
    chains."""
    _require_valid(inst)
    sys = inst.system
    n = len(sys.states)
    if inst.k > n - 1:
        result = inso_to_cso_unary(InsoInstance(sys, inst.secret, inst.nonsecret))
        return TransformOutput(
            result.instance, result.state_provenance, result.event_provenance,
            {**result.flags, "delegated_unbounded": True},
        )
    system, secret, nonsecret, state_prov = _unary_chain_gadget(
        sys, inst.secret, inst.nonsecret, chain_len=inst.k, cap=inst.k
    )
    out = CsoInstance(system, secret, nonsecret)
    return TransformOutput(out, state_prov, _original_events(sys.alphabet), {})


# -- initial-state normalization ----------------------------------------------------


def single_initial(nfa: Nfa) -> TransformOutput:
    """Replace several initial states by one fresh initial state with a
    distinct fresh unobservable event per original initial state; the
    distinct events keep determinism."""
    if not nfa.initial:
        raise EmptyInitial("automaton has no initial state")
    if len(nfa.initial) == 1:
        state_prov = {q: ("original", q) for q in nfa.states}
        return TransformOutput(nfa, state_prov, _original_events(nfa.alphabet),
                               {"no_op": True})
    taken = set(nfa.states)
    init = _unique("init", taken)
    event_taken = set(nfa.alphabet.events)
    idx = nfa._index
    transitions = set(nfa.transitions)
    fresh: list[str] = []
    for q in sorted(nfa.initial, key=idx.get):
        u = _unique("u", event_taken)
        fresh.append(u)
        transitions.add((init, u, q))
    out = Nfa(
        states=nfa.states + (init,),
        alphabet=Alphabet(nfa.alphabet.events + tuple(fresh), nfa.alphabet.observable),
        transitions=frozenset(transitions),
        initial=frozenset([init]),
        marked=nfa.marked,
    )
    state_prov = {q: ("original", q) for q in nfa.states}
    state_prov[init] = ("sink", "init")
    event_prov = _original_events(nfa.alphabet)
    event_prov.update({u: ("fresh_u",) for u in fresh})
    return TransformOutput(out, state_prov, event_prov, {"no_op": False})

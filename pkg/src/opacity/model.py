"""Problem instances for the six opacity notions, verdicts and fixtures.

Secret and non-secret data are always explicit parameters; there is no
implicit "non-secret = everything else", and overlapping secret/non-secret
sets are legal.  Instances are immutable; :func:`validate_instance`
collects invariant violations as diagnostics instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from . import fa
from .fa import Alphabet, Nfa


@dataclass(frozen=True)
class CsoInstance:
    """Current-state opacity: the estimate reaching a secret state must
    also allow a non-secret state.  All states count as marked."""

    system: Nfa
    secret: frozenset[str]
    nonsecret: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "secret", frozenset(self.secret))
        object.__setattr__(self, "nonsecret", frozenset(self.nonsecret))


@dataclass(frozen=True)
class IsoInstance:
    """Initial-state opacity: secrecy of where the run started."""

    system: Nfa
    secret_initial: frozenset[str]
    nonsecret_initial: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "secret_initial", frozenset(self.secret_initial))
        object.__setattr__(self, "nonsecret_initial", frozenset(self.nonsecret_initial))


@dataclass(frozen=True)
class IfoInstance:
    """Initial-and-final-state opacity over (initial, final) state pairs."""

    system: Nfa
    secret_pairs: frozenset[tuple[str, str]]
    nonsecret_pairs: frozenset[tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "secret_pairs",
                           frozenset(tuple(p) for p in self.secret_pairs))
        object.__setattr__(self, "nonsecret_pairs",
                           frozenset(tuple(p) for p in self.nonsecret_pairs))


@dataclass(frozen=True)
class LboInstance:
    """Language-based opacity: the secret marked language must project
    inside the projection of the non-secret one.  Both automata share one
    alphabet and are kept trim (non-blocking)."""

    secret_aut: Nfa
    nonsecret_aut: Nfa

    @staticmethod
    def make(secret_aut: Nfa, nonsecret_aut: Nfa) -> "LboInstance":
        """Construct with both automata trimmed, enforcing non-blocking."""
        return LboInstance(fa.trim(secret_aut), fa.trim(nonsecret_aut))

    @property
    def alphabet(self) -> Alphabet:
        return self.secret_aut.alphabet


@dataclass(frozen=True)
class KsoInstance:
    """K-step opacity: a secret visit stays hidden for K observable steps."""

    system: Nfa
    secret: frozenset[str]
    nonsecret: frozenset[str]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "secret", frozenset(self.secret))
        object.__setattr__(self, "nonsecret", frozenset(self.nonsecret))


@dataclass(frozen=True)
class InsoInstance:
    """Infinite-step opacity: a secret visit stays hidden forever."""

    system: Nfa
    secret: frozenset[str]
    nonsecret: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "secret", frozenset(self.secret))
        object.__setattr__(self, "nonsecret", frozenset(self.nonsecret))


OpacityInstance = Union[
    CsoInstance, IsoInstance, IfoInstance, LboInstance, KsoInstance, InsoInstance
]

_NOTIONS = {
    CsoInstance: "cso",
    IsoInstance: "iso",
    IfoInstance: "ifo",
    LboInstance: "lbo",
    KsoInstance: "kso",
    InsoInstance: "inso",
}


def notion_of(inst: OpacityInstance) -> str:
    return _NOTIONS[type(inst)]


@dataclass(frozen=True)
class Witness:
    """Replayable evidence of a violation.

    ``prefix_obs`` is the violating observation; the two-phase notions
    (K-step, infinite-step) add ``suffix_obs`` for the part after the
    secret visit.
    """

    kind: str
    prefix_obs: tuple[str, ...]
    suffix_obs: Optional[tuple[str, ...]] = None
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "prefix_obs", tuple(self.prefix_obs))
        if self.suffix_obs is not None:
            object.__setattr__(self, "suffix_obs", tuple(self.suffix_obs))


@dataclass(frozen=True)
class Verdict:
    opaque: bool
    witness: Optional[Witness] = None

    def __post_init__(self):
        if self.opaque != (self.witness is None):
            raise ValueError("witness must be present exactly when violated")


@dataclass(frozen=True)
class Metrics:
    """Input and verification-structure sizes.

    ``n`` is the state count of the instance (summed over both automata
    for language-based instances), ``ell`` the observable event count,
    ``m`` the transition count of the projected secret-side automaton
    (None when the chosen algorithm never builds it), and the
    ``constructed_*`` fields the size of the structure the verifier
    actually searched.
    """

    n: int
    ell: int
    m: Optional[int]
    constructed_states: int
    constructed_transitions: int


@dataclass(frozen=True)
class VerificationCertificate:
    """What the two-phase verifiers explored: the observer states, the
    post-split seed pairs (secret state, non-secret estimate), and the
    structure state at which a violation was detected, if any."""

    observer_states: tuple[frozenset[str], ...]
    split_states: tuple[tuple[str, frozenset[str]], ...]
    reached_violation: Optional[str] = None


@dataclass(frozen=True, eq=False)
class TransformOutput:
    """A transformed instance plus full provenance.

    ``state_provenance`` maps every output state to exactly one tag:

    * ``("original", q)`` or ``("original", side, q)`` for carried states
      (``side`` is "S"/"NS" for two-automata instances);
    * ``("plus", q)`` / ``("minus", q)`` for @-split copies;
    * ``("chain", i)`` for fresh counter states, ``("chain", p, i)`` for
      per-state chains and indexed copies;
    * ``("encoding", source, prefix)`` for shared bit-path states;
    * ``("sink", role)`` for single fresh states (acceptors, absorbers,
      fresh initial states).

    ``event_provenance`` tags are ``("original",)``, ``("fresh_at",)``,
    ``("fresh_u",)`` and ``("bit", "0"|"1")``.  For instances with two
    automata the provenance keys are qualified as ``"S:state"`` /
    ``"NS:state"``.
    """

    instance: object
    state_provenance: Mapping[str, tuple]
    event_provenance: Mapping[str, tuple]
    flags: Mapping[str, object] = field(default_factory=dict)


# -- validation -------------------------------------------------------------


def validate_instance(inst: OpacityInstance) -> list[str]:
    """Empty list iff all type invariants (and nested Nfa invariants) hold."""
    diags: list[str] = []
    if isinstance(inst, LboInstance):
        diags += [f"secret automaton: {d}" for d in fa.validate(inst.secret_aut)]
        diags += [f"nonsecret automaton: {d}" for d in fa.validate(inst.nonsecret_aut)]
        a, b = inst.secret_aut.alphabet, inst.nonsecret_aut.alphabet
        if a.events != b.events or a.observable != b.observable:
            diags.append("automata do not share one alphabet")
        for label, aut in (("secret", inst.secret_aut), ("nonsecret", inst.nonsecret_aut)):
            if not diags and fa.trim(aut) != aut:
                diags.append(f"{label} automaton is blocking (not trim)")
        return diags

    diags += fa.validate(inst.system)
    states = set(inst.system.states)
    if isinstance(inst, CsoInstance) or isinstance(inst, InsoInstance):
        pairs = (("secret", inst.secret), ("nonsecret", inst.nonsecret))
    elif isinstance(inst, KsoInstance):
        pairs = (("secret", inst.secret), ("nonsecret", inst.nonsecret))
        if inst.k < 0:
            diags.append(f"k must be non-negative, got {inst.k}")
    elif isinstance(inst, IsoInstance):
        pairs = ()
        for label, group in (("secret", inst.secret_initial),
                             ("nonsecret", inst.nonsecret_initial)):
            for s in sorted(group):
                if s not in states:
                    diags.append(f"{label} initial state {s!r} not declared")
                elif s not in inst.system.initial:
                    diags.append(f"{label} initial state {s!r} is not initial")
    elif isinstance(inst, IfoInstance):
        pairs = ()
        for label, group in (("secret", inst.secret_pairs),
                             ("nonsecret", inst.nonsecret_pairs)):
            for q0, qf in sorted(group):
                if q0 not in inst.system.initial:
                    diags.append(f"{label} pair start {q0!r} is not an initial state")
                if qf not in states:
                    diags.append(f"{label} pair end {qf!r} not declared")
    else:
        raise TypeError(f"not an opacity instance: {type(inst).__name__}")
    for label, group in pairs:
        for s in sorted(group):
            if s not in states:
                diags.append(f"{label} state {s!r} not declared")
    return diags


# -- built-in fixtures --------------------------------------------------------


def _fixtures() -> dict[str, OpacityInstance]:
    ab = Alphabet.make(["a"], ["u"])
    f1_sys = Nfa(
        states=("0", "1", "2"),
        alphabet=ab,
        transitions={("0", "a", "1"), ("0", "u", "2"), ("2", "a", "2")},
        initial={"0"},
        marked=frozenset(),
    )
    f2_sys = Nfa(
        states=("0", "1", "2"),
        alphabet=ab,
        transitions={("0", "a", "1"), ("0", "u", "2")},
        initial={"0"},
        marked=frozenset(),
    )
    f3_sys = Nfa(
        states=("0", "1", "2", "3", "4"),
        alphabet=Alphabet.make(["a", "b"]),
        transitions={("0", "a", "1"), ("0", "a", "2"), ("1", "a", "3"), ("2", "b", "4")},
        initial={"0"},
        marked=frozenset(),
    )
    f4_alpha = Alphabet.make(["a"])
    f4o_sys = Nfa(
        states=("0", "1"),
        alphabet=f4_alpha,
        transitions={("0", "a", "0"), ("1", "a", "1")},
        initial={"0", "1"},
        marked=frozenset(),
    )
    f4x_sys = Nfa(
        states=("0", "1"),
        alphabet=f4_alpha,
        transitions={("1", "a", "1")},
        initial={"0", "1"},
        marked=frozenset(),
    )
    f5_alpha = Alphabet.make(["a", "b"], ["u"])
    f5_secret = Nfa(
        states=("0", "1", "2"),
        alphabet=f5_alpha,
        transitions={("0", "a", "1"), ("1", "b", "2")},
        initial={"0"},
        marked={"2"},
    )
    f5_nonsecret = Nfa(
        states=("0", "1", "2", "3"),
        alphabet=f5_alpha,
        transitions={("0", "u", "1"), ("1", "a", "2"), ("2", "b", "3")},
        initial={"0"},
        marked={"3"},
    )
    f5x_nonsecret = Nfa(
        states=("0", "1", "2"),
        alphabet=f5_alpha,
        transitions={("0", "u", "1"), ("1", "a", "2")},
        initial={"0"},
        marked={"2"},
    )
    return {
        "F1": CsoInstance(f1_sys, {"1"}, {"2"}),
        "F2": CsoInstance(f2_sys, {"1"}, {"2"}),
        "F3": CsoInstance(f3_sys, {"1"}, {"2"}),
        "F4o": IsoInstance(f4o_sys, {"1"}, {"0"}),
        "F4x": IsoInstance(f4x_sys, {"1"}, {"0"}),
        "F5": LboInstance.make(f5_secret, f5_nonsecret),
        "F5x": LboInstance.make(f5_secret, f5x_nonsecret),
    }


FIXTURE_NAMES = tuple(sorted(_fixtures()))


def fixture(name: str) -> OpacityInstance:
    """Named desk-scale instances used across the tests and the CLI."""
    table = _fixtures()
    if name not in table:
        raise KeyError(f"unknown fixture {name!r}; have {', '.join(sorted(table))}")
    return table[name]

"""Line-oriented textual instance files.

Grammar ('#' starts a comment anywhere; tokens are whitespace-separated):

    notion: cso|iso|ifo|lbo|kso|inso
    k: <int>                      # kso only
    automaton <name>
    states: s0 s1 ...
    observable: a b
    unobservable: u
    initial: s0
    marked: s2
    s0 a s1                       # transition lines
    end
    secret: ...                   # state list / pairs q0,qf; ... / automaton name
    nonsecret: ...

lbo instances carry two automaton blocks and name them in the secret /
nonsecret lines.  Unknown keys are rejected.  Serialization is canonical
(sections in the order above, transitions sorted by state and event
declaration order), so output files are byte-stable; the alphabet is
written observable-first, which is also how all fixtures and generated
instances are laid out, making parse . serialize the identity on them.
"""

from __future__ import annotations

from .errors import InstanceSemanticError, InstanceSyntaxError
from .fa import Alphabet, Nfa
from .model import (
    CsoInstance,
    IfoInstance,
    InsoInstance,
    IsoInstance,
    KsoInstance,
    LboInstance,
    OpacityInstance,
    notion_of,
    validate_instance,
)

_NOTIONS = ("cso", "iso", "ifo", "lbo", "kso", "inso")
_AUT_KEYS = ("states", "observable", "unobservable", "initial", "marked")


def _clean_lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


class _Parser:
    def __init__(self, text: str):
        self.lines = list(_clean_lines(text))
        self.pos = 0

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def take(self):
        item = self.peek()
        if item is not None:
            self.pos += 1
        return item

    def expect_key(self, key: str) -> tuple[int, list[str]]:
        item = self.take()
        if item is None:
            raise InstanceSyntaxError(f"unexpected end of file, expected '{key}:'")
        lineno, line = item
        head, _, rest = line.partition(":")
        if head.strip() != key or not line.split(None, 1)[0].endswith(":"):
            raise InstanceSyntaxError(f"expected '{key}:', got {line.split()[0]!r}", lineno)
        return lineno, rest.split()


def _parse_automaton(parser: _Parser) -> tuple[str, Nfa, int]:
    item = parser.take()
    lineno, line = item
    tokens = line.split()
    if tokens[0] != "automaton" or len(tokens) != 2:
        raise InstanceSyntaxError("expected 'automaton <name>'", lineno)
    name = tokens[1]
    fields: dict[str, list[str]] = {}
    for key in _AUT_KEYS:
        _, fields[key] = parser.expect_key(key)
    states = fields["states"]
    seen: set[str] = set()
    for s in states:
        if s in seen:
            raise InstanceSyntaxError(f"duplicate state id {s!r}", lineno)
        seen.add(s)
    transitions: set[tuple[str, str, str]] = set()
    while True:
        item = parser.take()
        if item is None:
            raise InstanceSyntaxError("unterminated automaton block, expected 'end'", lineno)
        tlineno, tline = item
        if tline == "end":
            break
        tokens = tline.split()
        if len(tokens) != 3:
            raise InstanceSyntaxError(
                f"expected transition '<src> <event> <dst>' or 'end', got {tline!r}", tlineno)
        transitions.add((tokens[0], tokens[1], tokens[2]))
    nfa = Nfa(
        states=tuple(states),
        alphabet=Alphabet.make(fields["observable"], fields["unobservable"]),
        transitions=frozenset(transitions),
        initial=frozenset(fields["initial"]),
        marked=frozenset(fields["marked"]),
    )
    return name, nfa, lineno


def _parse_pairs(tokens: list[str], lineno: int) -> frozenset[tuple[str, str]]:
    text = " ".join(tokens)
    pairs = set()
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 2 or not all(parts):
            raise InstanceSyntaxError(f"expected pair 'q0,qf', got {chunk!r}", lineno)
        pairs.add((parts[0], parts[1]))
    return frozenset(pairs)


def parse_instance(text: str) -> OpacityInstance:
    """Parse one instance; invalid content raises with a line number."""
    parser = _Parser(text)
    lineno, tokens = parser.expect_key("notion")
    if len(tokens) != 1 or tokens[0] not in _NOTIONS:
        raise InstanceSyntaxError(
            f"notion must be one of {', '.join(_NOTIONS)}", lineno)
    notion = tokens[0]
    k = None
    item = parser.peek()
    if item is not None and item[1].split(":", 1)[0] == "k":
        klineno, ktokens = parser.expect_key("k")
        if notion != "kso":
            raise InstanceSyntaxError("'k:' is only allowed for kso", klineno)
        if len(ktokens) != 1 or not _is_int(ktokens[0]):
            raise InstanceSyntaxError("'k:' needs one integer", klineno)
        k = int(ktokens[0])
    if notion == "kso" and k is None:
        raise InstanceSemanticError("kso instance needs a 'k:' line", lineno)

    automata: dict[str, Nfa] = {}
    order: list[str] = []
    while True:
        item = parser.peek()
        if item is None or not item[1].startswith("automaton"):
            break
        name, nfa, alineno = _parse_automaton(parser)
        if name in automata:
            raise InstanceSyntaxError(f"duplicate automaton name {name!r}", alineno)
        automata[name] = nfa
        order.append(name)
    expected = 2 if notion == "lbo" else 1
    if len(automata) != expected:
        raise InstanceSyntaxError(
            f"{notion} needs {expected} automaton block(s), found {len(automata)}",
            item[0] if item else lineno)

    slineno, stokens = parser.expect_key("secret")
    nlineno, ntokens = parser.expect_key("nonsecret")
    trailing = parser.peek()
    if trailing is not None:
        raise InstanceSyntaxError(f"unexpected content {trailing[1]!r}", trailing[0])

    if notion == "lbo":
        for label, toks, ln in (("secret", stokens, slineno), ("nonsecret", ntokens, nlineno)):
            if len(toks) != 1 or toks[0] not in automata:
                raise InstanceSemanticError(
                    f"{label} must name one of the automata ({', '.join(order)})", ln)
        inst: OpacityInstance = LboInstance(automata[stokens[0]], automata[ntokens[0]])
    else:
        system = automata[order[0]]
        if notion == "cso":
            inst = CsoInstance(system, frozenset(stokens), frozenset(ntokens))
        elif notion == "inso":
            inst = InsoInstance(system, frozenset(stokens), frozenset(ntokens))
        elif notion == "kso":
            inst = KsoInstance(system, frozenset(stokens), frozenset(ntokens), k)
        elif notion == "iso":
            inst = IsoInstance(system, frozenset(stokens), frozenset(ntokens))
        else:
            inst = IfoInstance(system, _parse_pairs(stokens, slineno),
                               _parse_pairs(ntokens, nlineno))
    diags = validate_instance(inst)
    if diags:
        raise InstanceSemanticError("; ".join(diags), slineno)
    return inst


def _is_int(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


def _serialize_automaton(name: str, nfa: Nfa) -> list[str]:
    idx = {s: i for i, s in enumerate(nfa.states)}
    epos = {e: i for i, e in enumerate(nfa.alphabet.events)}
    obs = nfa.alphabet.observable_events()
    uo = tuple(e for e in nfa.alphabet.events if e not in nfa.alphabet.observable)
    lines = [
        f"automaton {name}",
        "states: " + " ".join(nfa.states),
        "observable: " + " ".join(obs),
        "unobservable: " + " ".join(uo),
        "initial: " + " ".join(sorted(nfa.initial, key=idx.get)),
        "marked: " + " ".join(sorted(nfa.marked, key=idx.get)),
    ]
    for p, e, q in sorted(nfa.transitions, key=lambda t: (idx[t[0]], epos[t[1]], idx[t[2]])):
        lines.append(f"{p} {e} {q}")
    lines.append("end")
    return [line.rstrip() for line in lines]


def serialize_instance(inst: OpacityInstance) -> str:
    """Canonical text for an instance; re-parsing yields an equal value."""
    notion = notion_of(inst)
    lines = [f"notion: {notion}"]
    if isinstance(inst, KsoInstance):
        lines.append(f"k: {inst.k}")
    if isinstance(inst, LboInstance):
        lines += _serialize_automaton("AS", inst.secret_aut)
        lines += _serialize_automaton("ANS", inst.nonsecret_aut)
        lines.append("secret: AS")
        lines.append("nonsecret: ANS")
        return "\n".join(lines) + "\n"
    sys = inst.system
    lines += _serialize_automaton("G", sys)
    idx = {s: i for i, s in enumerate(sys.states)}
    if isinstance(inst, IfoInstance):
        bad = [s for pair in inst.secret_pairs | inst.nonsecret_pairs
               for s in pair if "," in s or ";" in s]
        if bad:
            raise ValueError(
                f"state names {sorted(set(bad))} contain ','/';' and cannot "
                "be written in pair syntax")

        def fmt(pairs):
            ordered = sorted(pairs, key=lambda p: (idx[p[0]], idx[p[1]]))
            return "; ".join(f"{a},{b}" for a, b in ordered)

        lines.append(("secret: " + fmt(inst.secret_pairs)).rstrip())
        lines.append(("nonsecret: " + fmt(inst.nonsecret_pairs)).rstrip())
    else:
        if isinstance(inst, IsoInstance):
            secret, nonsecret = inst.secret_initial, inst.nonsecret_initial
        else:
            secret, nonsecret = inst.secret, inst.nonsecret
        lines.append(("secret: " + " ".join(sorted(secret, key=idx.get))).rstrip())
        lines.append(("nonsecret: " + " ".join(sorted(nonsecret, key=idx.get))).rstrip())
    return "\n".join(lines) + "\n"

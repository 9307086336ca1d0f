"""DOT (graphviz) rendering of automata and verification structures.

Output is byte-stable: states appear in declaration order, parallel
edges are merged into one comma-joined label, and colors mark secret
(red) and non-secret (blue) states.
"""

from __future__ import annotations

from . import fa
from .model import (
    CsoInstance,
    IfoInstance,
    InsoInstance,
    IsoInstance,
    KsoInstance,
    LboInstance,
    OpacityInstance,
    notion_of,
)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def nfa_to_dot(nfa, name="G", secret=frozenset(), nonsecret=frozenset(),
               indent="  ", as_subgraph=False) -> str:
    secret = frozenset(secret)
    nonsecret = frozenset(nonsecret)
    lines = []
    head = f"subgraph cluster_{name}" if as_subgraph else "digraph " + _quote(name)
    lines.append(head + " {")
    if as_subgraph:
        lines.append(f'{indent}label={_quote(name)};')
    else:
        lines.append(f"{indent}rankdir=LR;")
    for i, s in enumerate(nfa.states):
        attrs = ["shape=doublecircle" if s in nfa.marked else "shape=circle"]
        if s in secret:
            attrs.append('style=filled fillcolor="#f8c8c8"')
        elif s in nonsecret:
            attrs.append('style=filled fillcolor="#c8d8f8"')
        lines.append(f"{indent}{_quote(name + '/' + s)} [label={_quote(s)} {' '.join(attrs)}];")
        if s in nfa.initial:
            point = _quote(f"{name}/__init{i}")
            lines.append(f"{indent}{point} [shape=point style=invis];")
            lines.append(f"{indent}{point} -> {_quote(name + '/' + s)};")
    idx = {s: i for i, s in enumerate(nfa.states)}
    epos = {e: i for i, e in enumerate(nfa.alphabet.events)}
    merged: dict[tuple[str, str], list[str]] = {}
    for p, e, q in sorted(nfa.transitions, key=lambda t: (idx[t[0]], idx[t[2]], epos[t[1]])):
        merged.setdefault((p, q), []).append(e)
    unobservable = nfa.alphabet.unobservable
    for (p, q), events in merged.items():
        label = ",".join(events)
        style = " style=dashed" if all(e in unobservable for e in events) else ""
        lines.append(
            f"{indent}{_quote(name + '/' + p)} -> {_quote(name + '/' + q)}"
            f" [label={_quote(label)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def instance_to_dot(inst: OpacityInstance) -> str:
    """The instance's automaton (or both, for language-based instances)."""
    if isinstance(inst, LboInstance):
        inner_s = nfa_to_dot(inst.secret_aut, "AS", as_subgraph=True)
        inner_ns = nfa_to_dot(inst.nonsecret_aut, "ANS", as_subgraph=True)
        body = "\n".join("  " + line for block in (inner_s, inner_ns)
                         for line in block.rstrip("\n").split("\n"))
        return 'digraph "lbo" {\n  rankdir=LR;\n' + body + "\n}\n"
    if isinstance(inst, (CsoInstance, InsoInstance, KsoInstance)):
        return nfa_to_dot(inst.system, "G", inst.secret, inst.nonsecret)
    if isinstance(inst, IsoInstance):
        return nfa_to_dot(inst.system, "G", inst.secret_initial, inst.nonsecret_initial)
    if isinstance(inst, IfoInstance):
        return nfa_to_dot(inst.system, "G")
    raise TypeError(type(inst).__name__)


def structure_to_dot(inst: OpacityInstance) -> str:
    """The verification structure the standard verifier searches."""
    from . import transforms  # local import to keep module load light

    notion = notion_of(inst)
    if notion == "cso":
        obs, submap = fa.observer_subsets(inst.system)
        secret_only = frozenset(
            name for name, sub in submap.items()
            if sub & inst.secret and not sub & inst.nonsecret)
        mixed = frozenset(
            name for name, sub in submap.items()
            if sub & inst.secret and sub & inst.nonsecret)
        return nfa_to_dot(obs, "observer", secret_only, mixed)
    if notion in ("lbo", "iso", "ifo"):
        if notion == "iso":
            inst = transforms.iso_to_lbo(inst).instance
        elif notion == "ifo":
            inst = transforms.ifo_to_lbo(inst).instance
        ps = fa.project(inst.secret_aut)
        obs_nfa, submap = fa.observer_subsets(inst.nonsecret_aut)
        marking = frozenset(
            name for name, sub in submap.items()
            if sub & inst.nonsecret_aut.marked)
        co = fa.complete_and_complement(obs_nfa, marking)
        prod = fa.product(ps, co)
        return nfa_to_dot(prod, "inclusion_check", secret=prod.marked)
    # Two-phase notions: observer plus the post-split product graph.
    sys = inst.system
    obs, submap = fa.observer_subsets(sys)
    lines = ['digraph "split_search" {', "  rankdir=LR;"]
    inner = nfa_to_dot(obs, "observer", as_subgraph=True)
    lines += ["  " + line for line in inner.rstrip("\n").split("\n")]
    cap = inst.k if isinstance(inst, KsoInstance) else None
    pair_nodes: list[str] = []
    pair_edges: list[str] = []
    seen = set()
    frontier = []
    for name, sub in submap.items():
        xs = sorted(sub & inst.secret, key=sys._index.get)
        ns = sub & inst.nonsecret
        if not xs or not ns:
            continue
        for x in xs:
            node = f"({x},{sys.subset_name(ns)})"
            pair_edges.append(
                f"  {_quote('observer/' + name)} -> {_quote('C/' + node)}"
                f" [label={_quote('@')} style=bold];")
            if node not in seen:
                seen.add(node)
                pair_nodes.append(node)
                frontier.append((x, ns, node, 0))
    pg = fa.project(sys)
    while frontier:
        x, ns, node, depth = frontier.pop(0)
        if cap is not None and depth >= cap:
            continue
        for e in sorted(sys.alphabet.observable):
            ns2 = fa.step(sys, ns, e) if ns else frozenset()
            for x2 in sorted(pg.successors(x, e), key=sys._index.get):
                node2 = f"({x2},{sys.subset_name(ns2)})"
                pair_edges.append(
                    f"  {_quote('C/' + node)} -> {_quote('C/' + node2)}"
                    f" [label={_quote(e)}];")
                if node2 not in seen:
                    seen.add(node2)
                    pair_nodes.append(node2)
                    if ns2:
                        frontier.append((x2, ns2, node2, depth + 1))
    for node in pair_nodes:
        dead = node.endswith(",{})")
        style = ' style=filled fillcolor="#f8c8c8"' if dead else ""
        lines.append(f"  {_quote('C/' + node)} [label={_quote(node)} shape=box{style}];")
    lines += pair_edges
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Command-line front end.

Exit codes: 0 = opaque, 1 = violated, 2 = any error.  Subcommands:

    verify --in FILE [--algo fast|oracle --bound B]
    transform --from NOTION --to NOTION --in FILE --out FILE
              [--preserve-events] [--k K]
    oracle --in FILE --bound B
    gen --notion N --n N --seed S --out FILE [generator params]
    bench --notion N --n-range a..b --seed S [--out CSV]
    export-dot --in FILE [--structure]

``--in`` also accepts a built-in fixture name (F1 .. F5x).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from . import dot, fileformat, oracle, transforms, verify
from .errors import OpacityError, UnaryObstruction
from .generate import GenParams, random_instance
from .model import FIXTURE_NAMES, fixture, notion_of

_ARROWS = (
    ("cso", "lbo"),
    ("cso", "ifo"),
    ("cso", "inso"),
    ("cso", "kso"),
    ("lbo", "cso"),
    ("lbo", "iso"),
    ("iso", "lbo"),
    ("iso", "ifo"),
    ("ifo", "lbo"),
    ("inso", "cso"),
    ("kso", "cso"),
)

_NOTIONS = ("cso", "iso", "ifo", "lbo", "kso", "inso")


def _load_instance(name_or_path: str):
    if name_or_path in FIXTURE_NAMES:
        return fixture(name_or_path)
    path = Path(name_or_path)
    return fileformat.parse_instance(path.read_text(encoding="utf-8"))


def _print_witness(witness):
    print("witness_prefix: " + " ".join(witness.prefix_obs))
    if witness.suffix_obs is not None:
        print("witness_suffix: " + " ".join(witness.suffix_obs))
    if witness.note:
        print("note: " + witness.note)


def _cmd_verify(args) -> int:
    inst = _load_instance(args.infile)
    print(f"notion: {notion_of(inst)}")
    if args.algo == "oracle":
        bounded = oracle.oracle_verify(inst, args.bound)
        verdict_text = "violated" if bounded.violated else "opaque_up_to_bound"
        print(f"verdict: {verdict_text}")
        print(f"bound: {bounded.bound}")
        print(f"complete: {'true' if bounded.complete else 'false'}")
        if bounded.violated:
            _print_witness(bounded.witness)
            return 1
        return 0
    verdict, metrics = verify.verify(inst)
    print(f"verdict: {'opaque' if verdict.opaque else 'violated'}")
    if not verdict.opaque:
        _print_witness(verdict.witness)
    print(f"n: {metrics.n}")
    print(f"ell: {metrics.ell}")
    print(f"m: {'' if metrics.m is None else metrics.m}")
    print(f"constructed_states: {metrics.constructed_states}")
    print(f"constructed_transitions: {metrics.constructed_transitions}")
    return 0 if verdict.opaque else 1


def _cmd_oracle(args) -> int:
    inst = _load_instance(args.infile)
    bounded = oracle.oracle_verify(inst, args.bound)
    print(f"notion: {notion_of(inst)}")
    print(f"verdict: {'violated' if bounded.violated else 'opaque_up_to_bound'}")
    print(f"bound: {bounded.bound}")
    print(f"complete: {'true' if bounded.complete else 'false'}")
    if bounded.violated:
        _print_witness(bounded.witness)
        return 1
    return 0


def _route(source: str, target: str) -> list[tuple[str, str]]:
    """Shortest arrow path, deterministic by arrow declaration order."""
    if source == target:
        return []
    frontier = [source]
    back: dict[str, tuple[str, str]] = {}
    seen = {source}
    while frontier:
        nxt = []
        for here in frontier:
            for a, b in _ARROWS:
                if a == here and b not in seen:
                    seen.add(b)
                    back[b] = (a, b)
                    nxt.append(b)
        if target in seen:
            break
        frontier = nxt
    if target not in seen:
        raise OpacityError(f"no transformation route from {source} to {target}")
    path = []
    here = target
    while here != source:
        arrow = back[here]
        path.append(arrow)
        here = arrow[0]
    path.reverse()
    return path


def _is_unary(inst) -> bool:
    if hasattr(inst, "system"):
        return len(inst.system.alphabet.observable) == 1
    return len(inst.alphabet.observable) == 1


def _apply_arrow(arrow, inst, preserve_events: bool, k):
    source, target = arrow
    if arrow == ("cso", "lbo"):
        return transforms.cso_to_lbo(inst)
    if arrow == ("lbo", "cso"):
        return transforms.lbo_to_cso(inst)
    if arrow == ("lbo", "iso"):
        return transforms.lbo_to_iso(inst, preserve_events)
    if arrow == ("iso", "lbo"):
        return transforms.iso_to_lbo(inst)
    if arrow == ("iso", "ifo"):
        return transforms.iso_to_ifo(inst)
    if arrow == ("cso", "ifo"):
        return transforms.cso_to_ifo(inst)
    if arrow == ("ifo", "lbo"):
        return transforms.ifo_to_lbo(inst)
    if arrow == ("cso", "inso"):
        return transforms.cso_to_inso(inst)
    if arrow == ("inso", "cso"):
        if preserve_events and _is_unary(inst):
            return transforms.inso_to_cso_unary(inst)
        return transforms.inso_to_cso(inst, preserve_events)
    if arrow == ("cso", "kso"):
        if k is None:
            raise OpacityError("transforming into kso needs --k")
        return transforms.cso_to_kso(inst, k)
    if arrow == ("kso", "cso"):
        if preserve_events and _is_unary(inst):
            return transforms.kso_to_cso_unary(inst)
        return transforms.kso_to_cso(inst, preserve_events)
    raise OpacityError(f"no such arrow: {source} -> {target}")


def _jsonable(mapping) -> dict:
    return {str(key): list(tag) for key, tag in sorted(mapping.items())}


def _cmd_transform(args) -> int:
    if args.source not in _NOTIONS or args.target not in _NOTIONS:
        raise OpacityError(f"notions must be one of {', '.join(_NOTIONS)}")
    inst = _load_instance(args.infile)
    if notion_of(inst) != args.source:
        raise OpacityError(
            f"input file holds a {notion_of(inst)} instance, --from says {args.source}")
    steps = []
    current = inst
    for arrow in _route(args.source, args.target):
        out = _apply_arrow(arrow, current, args.preserve_events, args.k)
        steps.append((arrow, out))
        current = out.instance
    out_path = Path(args.outfile)
    out_path.write_text(fileformat.serialize_instance(current), encoding="utf-8")
    sidecar = {
        "source": args.source,
        "target": args.target,
        "preserve_events": args.preserve_events,
        "steps": [
            {
                "arrow": f"{a}->{b}",
                "states": _jsonable(out.state_provenance),
                "events": _jsonable(out.event_provenance),
                "flags": dict(out.flags),
            }
            for (a, b), out in steps
        ],
    }
    Path(str(out_path) + ".prov").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def _cmd_gen(args) -> int:
    params = GenParams(
        n=args.n, ell=args.ell, uo=args.uo, density=args.density,
        secret_fraction=args.secret_fraction,
        nonsecret_fraction=args.nonsecret_fraction,
        deterministic=args.deterministic, seed=args.seed, k=args.k,
    )
    inst = random_instance(args.notion, params)
    text = fileformat.serialize_instance(inst)
    if args.outfile:
        Path(args.outfile).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _parse_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    if not sep or not lo.strip().isdigit() or not hi.strip().isdigit():
        raise OpacityError(f"--n-range must look like 'a..b', got {text!r}")
    return range(int(lo), int(hi) + 1)


def _cmd_bench(args) -> int:
    n_values = _parse_range(args.n_range)
    csv_text, figure = bench_mod.run_and_save(
        args.notion, n_values, args.seed,
        out_csv=Path(args.outfile) if args.outfile else None,
        ell=args.ell, uo=args.uo, density=args.density, k=args.k,
    )
    if args.outfile:
        print(f"wrote {args.outfile} and {figure}", file=sys.stderr)
    else:
        sys.stdout.write(csv_text)
    return 0


def _cmd_export_dot(args) -> int:
    inst = _load_instance(args.infile)
    if args.structure:
        sys.stdout.write(dot.structure_to_dot(inst))
    else:
        sys.stdout.write(dot.instance_to_dot(inst))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opacity",
        description="Verify, transform and explore opacity of finite-automata models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="decide opacity of an instance file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--algo", choices=("fast", "oracle"), default="fast")
    p.add_argument("--bound", type=int, default=8)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("transform", help="rewrite an instance into another notion")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--preserve-events", action="store_true")
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("oracle", help="bounded definitional check")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--notion", required=True, choices=_NOTIONS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", dest="outfile", default=None)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--uo", type=int, default=1)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--secret-fraction", type=float, default=0.3)
    p.add_argument("--nonsecret-fraction", type=float, default=0.3)
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="structure sizes over a range of n")
    p.add_argument("--notion", required=True, choices=_NOTIONS)
    p.add_argument("--n-range", dest="n_range", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", dest="outfile", default=None)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--uo", type=int, default=1)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("export-dot", help="DOT text of the automaton")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--structure", action="store_true")
    p.set_defaults(func=_cmd_export_dot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage already; normalize other codes.
        return 2 if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except UnaryObstruction as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OpacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # malformed input must never escape as a crash
        print(f"error: internal failure: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

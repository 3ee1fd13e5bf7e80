"""Command-line front end.

Inputs are either names from the builtin catalog (``phi_plus``, ``ghz``,
``two_bell``, ``partial(theta)``, ``max_entangled(d)``, ``chiral``,
``pr_box``, ``tsirelson_box``) or paths to files in the text formats of the
states and boxes modules.  Output is plain text, one record per line;
``--long`` adds prose.  Exit codes: 0 success, 1 failed demo assertions,
2 malformed input.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import catalog, config
from .boxes import CHSH, Box, HardyScore, LocalModel, MerminGHZ, TiltedCHSH, evaluate, load_box, local_membership
from .demos import DEMOS
from .monotones import optimize_yield
from .preorder import compare_bipartite, factor_spectrum, multipartite_check, verdict_to_text
from .selftest import closure_scan
from .states import Bipartition, PureState, load_state, schmidt_spectrum


class InputError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _load_any(name: str):
    try:
        return catalog.resolve(name)
    except KeyError:
        pass
    if os.path.exists(name):
        try:
            return load_state(name)
        except ValueError:
            try:
                return load_box(name)
            except ValueError as exc:
                raise InputError(f"cannot parse {name}: {exc}") from exc
    raise InputError(
        f"{name!r} is neither a catalog entry ({', '.join(catalog.names())}) nor a readable file"
    )


def _load_pure(name: str) -> PureState:
    obj = _load_any(name)
    if not isinstance(obj, PureState):
        raise InputError(f"{name!r} is not a pure state")
    return obj


def _load_box_arg(name: str) -> Box:
    obj = _load_any(name)
    if not isinstance(obj, Box):
        raise InputError(f"{name!r} is not a box")
    return obj


def _functional(name: str, alpha: float):
    key = name.strip().lower()
    if key == "chsh":
        return CHSH()
    if key == "tilted":
        return TiltedCHSH(alpha)
    if key == "hardy":
        return HardyScore()
    if key == "mermin":
        return MerminGHZ()
    raise InputError(f"unknown functional {name!r} (chsh, tilted, hardy, mermin)")


def cmd_schmidt(args) -> int:
    psi = _load_pure(args.state)
    try:
        beta = Bipartition.parse(args.bipartition, psi.n_parties)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    spec = schmidt_spectrum(psi, beta)
    print(" ".join(_fmt(v) for v in spec.values))
    if args.long:
        print(f"rank {spec.rank()} across {beta.label()}")
    return 0


def cmd_compare(args) -> int:
    psi = _load_pure(args.state1)
    phi = _load_pure(args.state2)
    if psi.n_parties != phi.n_parties:
        raise InputError("states must have the same number of parties")
    verdict = compare_bipartite(psi, phi) if psi.n_parties == 2 else multipartite_check(psi, phi)
    print(verdict_to_text(verdict, long=args.long))
    return 0


def cmd_multi_check(args) -> int:
    psi = _load_pure(args.state1)
    phi = _load_pure(args.state2)
    if psi.n_parties < 3 or phi.n_parties != psi.n_parties:
        raise InputError("multi-check needs two states with the same n >= 3 parties")
    print(verdict_to_text(multipartite_check(psi, phi), long=args.long))
    return 0


def cmd_factor(args) -> int:
    psi = _load_pure(args.state1)
    phi = _load_pure(args.state2)
    if psi.n_parties != phi.n_parties:
        raise InputError("states must have the same number of parties")
    if args.bipartition is None:
        if psi.n_parties != 2:
            raise InputError("--bipartition is required for more than two parties")
        beta = Bipartition(frozenset({0}), 2)
    else:
        try:
            beta = Bipartition.parse(args.bipartition, psi.n_parties)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    res = factor_spectrum(schmidt_spectrum(psi, beta), schmidt_spectrum(phi, beta))
    if res.found:
        print("found " + " ".join(_fmt(v) for v in res.lambda_zeta.values))
        print(f"residual {_fmt(res.residual)}")
    else:
        print(f"not_found {res.reason.value}")
    if args.long and res.borderline:
        print("warning: decision within 10x of the matching tolerance")
    return 0


def cmd_box_local(args) -> int:
    box = _load_box_arg(args.box)
    result = local_membership(box)
    if isinstance(result, LocalModel):
        print(f"Local reconstruction_error {_fmt(result.reconstruction_error)}")
        if args.long:
            nz = [(i, w) for i, w in enumerate(result.weights) if w > 1e-12]
            print("weights: " + " ".join(f"{i}:{_fmt(w)}" for i, w in nz))
    else:
        print(
            f"Nonlocal margin {_fmt(result.margin)} value {_fmt(result.value)} "
            f"local_bound {_fmt(result.local_bound)}"
        )
        if args.long:
            print("functional: " + " ".join(_fmt(v) for v in result.functional))
    return 0


def cmd_box_eval(args) -> int:
    box = _load_box_arg(args.box)
    f = _functional(args.functional, args.alpha)
    try:
        value = evaluate(f, box)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print(_fmt(value))
    if args.long and isinstance(f, HardyScore):
        print(f"max zero-constraint violation {_fmt(f.constraint_violation(box))}")
    return 0


def cmd_yield(args) -> int:
    psi = _load_pure(args.state)
    f = _functional(args.functional, args.alpha)
    try:
        result = optimize_yield(psi, f, restarts=args.restarts, seed=args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print(result.to_text())
    return 0


def cmd_selftest_scan(args) -> int:
    f = _functional(args.functional, args.alpha)
    target_state = _load_pure(args.target_state)
    candidates = [_load_pure(name) for name in args.candidates]
    try:
        report = closure_scan(
            f,
            args.target_value,
            target_state,
            candidates,
            tol=args.tol,
            restarts=args.restarts,
            seed=args.seed,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print(report.to_text())
    return 0


def cmd_demo(args) -> int:
    lines, ok = DEMOS[args.name](seed=args.seed)
    for line in lines:
        print(line)
    print("demo result: " + ("pass" if ok else "fail"))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="losrkit",
        description="LOSR-entanglement convertibility, box classification, and yield monotones.",
    )
    parser.add_argument("--eps-norm", type=float, default=None, help="normalization tolerance")
    parser.add_argument("--tau-rank", type=float, default=None, help="Schmidt rank cutoff")
    parser.add_argument("--eps-match", type=float, default=None, help="spectrum matching tolerance")
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomized procedures")
    parser.add_argument("--restarts", type=int, default=32, help="optimizer restarts")
    parser.add_argument("--long", action="store_true", help="append prose to the records")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schmidt", help="print a Schmidt spectrum")
    p.add_argument("state")
    p.add_argument("bipartition", help="label like A|B or A|BC")
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("compare", help="decide convertibility between two states")
    p.add_argument("state1")
    p.add_argument("state2")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("factor", help="factor one spectrum over another")
    p.add_argument("state1")
    p.add_argument("state2")
    p.add_argument("--bipartition", default=None)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("multi-check", help="multipartite necessary-condition check")
    p.add_argument("state1")
    p.add_argument("state2")
    p.set_defaults(func=cmd_multi_check)

    p = sub.add_parser("box-local", help="local-polytope membership with certificate")
    p.add_argument("box")
    p.set_defaults(func=cmd_box_local)

    p = sub.add_parser("box-eval", help="evaluate a Bell functional on a box")
    p.add_argument("box")
    p.add_argument("functional")
    p.add_argument("--alpha", type=float, default=0.5, help="tilt for the tilted functional")
    p.set_defaults(func=cmd_box_eval)

    p = sub.add_parser("yield", help="optimize a Bell functional over measurements")
    p.add_argument("state")
    p.add_argument("functional")
    p.add_argument("--alpha", type=float, default=0.5)
    p.set_defaults(func=cmd_yield)

    p = sub.add_parser("selftest-scan", help="closure scan over a candidate set")
    p.add_argument("functional")
    p.add_argument("target_value", type=float)
    p.add_argument("target_state")
    p.add_argument("candidates", nargs="+")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_selftest_scan)

    p = sub.add_parser("demo", help="run a built-in demonstration")
    p.add_argument("name", choices=sorted(DEMOS))
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.eps_norm is not None:
        config.tolerances.eps_norm = args.eps_norm
    if args.tau_rank is not None:
        config.tolerances.tau_rank = args.tau_rank
    if args.eps_match is not None:
        config.tolerances.eps_match = args.eps_match
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

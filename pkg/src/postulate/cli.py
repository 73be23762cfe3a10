"""Command line: numerology tables, chain replays, direct oracle checks, certificates.

Exit codes: 0 verified, 1 usage or parse error, 2 inconclusive or failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass

from sympy import isprime

from . import calculus2 as c2
from . import calculus3 as c3
from .certificate import (AnalyticLeaf, CertificateFormatError, OracleLeaf, Specialize3, node_scheme,
                          read_certificate, verify_certificate, write_certificate)
from .model import BScheme, SubStar, TScheme, VScheme, dim_forms_p3, main_theorem_scheme, surplus
from .oracle import DEFAULT_PRIME, OracleConfig, verify_empty
from .search import Policy, SearchFailure, plane_certificate, search_certificate

OK, USAGE, FAILED = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    prime: int = DEFAULT_PRIME
    seed: int = 0
    retries: int = 3
    max_depth: int = 40
    branching_cap: int = 6
    leaf_degree: int = 3
    output: str | None = None

    def __post_init__(self):
        if not (1 < self.prime < 1 << 32 and isprime(self.prime)):
            raise UsageError(f"--prime must be a prime below 2**32, got {self.prime}")
        if self.retries < 1:
            raise UsageError("--retries must be at least 1")
        if self.seed < 0:
            raise UsageError("--seed must be nonnegative")

    @property
    def oracle(self) -> OracleConfig:
        return OracleConfig(self.prime, self.seed, self.retries)

    @property
    def policy(self) -> Policy:
        return Policy(max_depth=self.max_depth, branching_cap=self.branching_cap,
                      leaf_degree=self.leaf_degree, oracle=self.oracle)

    @classmethod
    def from_args(cls, args):
        return cls(prime=args.prime, seed=args.seed, retries=args.retries,
                   max_depth=getattr(args, "max_depth", 40),
                   branching_cap=getattr(args, "branching_cap", 6),
                   leaf_degree=getattr(args, "leaf_degree", 3),
                   output=getattr(args, "out", None))


# ------------------------------------------------------------------ numerology

def numerology_rows(d_max: int):
    for d in range(1, d_max + 1):
        y = main_theorem_scheme(d)
        k, eps = divmod(d, 3)
        conds = y.L * (d + 1) + y.collinear
        yield d, k, eps, y.L, y.collinear, conds, dim_forms_p3(d), surplus(y)


def cmd_numerology(args, out=sys.stdout) -> int:
    if args.max < 1:
        raise UsageError("--max must be at least 1")
    print("d\tk\teps\tlines\tpoints\tconditions\tforms\tsurplus", file=out)
    bad = 0
    for row in numerology_rows(args.max):
        print("\t".join(str(x) for x in row), file=out)
        bad += row[-1] != 0
    return OK if not bad else FAILED


# ------------------------------------------------------------------ chains

def _print_step(step: c3.ChainStep, verdict, out):
    print(f"  {step.move}", file=out)
    v = c2.strip_lines(step.trace)
    tail = "" if verdict is None else f"  {verdict}"
    print(f"    trace    {step.trace}  ->  {v}{tail}", file=out)
    print(f"    residual {step.after}", file=out)


def _replay_p3(start, moves, cfg: RunConfig, verify: bool, out, show=None) -> int:
    steps = c3.run_chain(start, moves)
    show = len(steps) if show is None else show
    print(f"{start}", file=out)
    status = OK
    for step in steps[:show]:
        verdict = None
        if verify:
            verdict = verify_empty(c2.strip_lines(step.trace), cfg.oracle)
            status = status if verdict else FAILED
        _print_step(step, verdict, out)
    if show < len(steps):
        print(f"  ... {len(steps) - show} further steps to {steps[-1].after}", file=out)
    if verify:
        cert_status = _certify(start, moves, cfg, out)
        status = max(status, cert_status)
    return status


def _certify(start, moves, cfg: RunConfig, out) -> int:
    policy = cfg.policy
    try:
        cert = search_certificate(start, Policy(max_depth=len(moves) + 1, branching_cap=1,
                                                leaf_degree=policy.leaf_degree,
                                                oracle=policy.oracle), forced=moves)
    except SearchFailure as exc:
        print(f"not certified: {exc}", file=out)
        return FAILED
    leaf = cert.node
    while isinstance(leaf, Specialize3):
        leaf = leaf.residual_child
    print(f"leaf {_describe_leaf(leaf)}", file=out)
    check = verify_certificate(cert)
    print(check, file=out)
    if cfg.output:
        write_certificate(cert, cfg.output)
        print(f"certificate written to {cfg.output}", file=out)
    return OK if check else FAILED


def _describe_leaf(leaf) -> str:
    if isinstance(leaf, OracleLeaf):
        return f"{leaf.scheme}: Verified rank {leaf.rank}/{leaf.cols} (p={leaf.prime}, seed={leaf.seed})"
    if isinstance(leaf, AnalyticLeaf):
        return f"{leaf.scheme}: {leaf.reason}"
    return str(node_scheme(leaf))


def _replay_p2(start: VScheme, moves, cfg: RunConfig, verify: bool, out) -> int:
    schemes = c2.run_plane_chain(start, moves)
    print(f"{start}", file=out)
    for m, v in zip(moves, schemes[1:]):
        print(f"  {m}  ->  {v}", file=out)
    if not verify:
        return OK
    try:
        cert = plane_certificate(start, moves, cfg.policy)
    except SearchFailure as exc:
        print(f"not certified: {exc}", file=out)
        return FAILED
    print(f"terminal {schemes[-1]}: {verify_empty(schemes[-1], cfg.oracle)}", file=out)
    check = verify_certificate(cert)
    print(check, file=out)
    if cfg.output:
        write_certificate(cert, cfg.output)
        print(f"certificate written to {cfg.output}", file=out)
    return OK if check else FAILED


def cmd_chain(args, out=sys.stdout) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.output and not args.verify:
        raise UsageError("--out needs --verify: only verified chains produce certificates")
    case = args.case
    if case == "hh9":
        return _replay_p3(c3.HH9_START, c3.hh9_chain(), cfg, args.verify, out)
    if case == "lemma":
        k = _need(args.k, "--k")
        if k < 4:
            raise UsageError(f"The initial assumption k ≥ 4 is required; got k={k}")
        start = c3.reduction_lemma_start(k)
        moves = c3.lemma_descent(k) + c3.hh9_chain()
        status = _replay_p3(start, moves, cfg, args.verify, out, show=3)
        print(f"after three steps: {c3.reduction_lemma_start(k - 1)} (the k={k - 1} start)", file=out)
        return status
    if case == "initial":
        d = _need(args.d, "--d")
        if d < 12:
            raise UsageError(f"the initial specialization needs d >= 12, got {d}")
        start, moves = c3.full_chain(d)
        status = _replay_p3(start, moves, cfg, args.verify, out, show=len(c3.initial_chain(d)))
        print(f"entry point: {c3.lemma_entry_scheme(d)}", file=out)
        return status
    k = _need(args.k, "--k")
    if k < 3 or k % 2 == 0:
        raise UsageError(f"{case} needs an odd k >= 3, got {k}")
    if case == "p2-first":
        return _replay_p2(c2.first_example_start(k), c2.section6_chain_first(k), cfg, args.verify, out)
    return _replay_p2(c2.second_example_start(k), c2.section6_chain_second(k), cfg, args.verify, out)


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this case")
    return value


# ------------------------------------------------------------------ schemes

def _substar(text: str) -> SubStar:
    try:
        a, b = (int(x) for x in text.split(","))
        return SubStar(a, b)
    except ValueError as exc:
        raise UsageError(f"--substar expects A,B with 2B <= A, got {text!r} ({exc})") from None


def scheme_from_args(args):
    modes = [args.p3, args.p2, args.main_theorem]
    if sum(bool(m) for m in modes) != 1:
        raise UsageError("give exactly one of --p3, --p2, --main-theorem")
    if args.d is None:
        raise UsageError("--d is required")
    star = _substar(args.substar) if args.substar else SubStar()
    try:
        if args.main_theorem:
            return main_theorem_scheme(args.d)
        if args.p3:
            if args.points or args.double or args.len2 or args.marked:
                raise UsageError("--points/--double/--len2/--marked are plane-only flags")
            return BScheme(args.d, args.lines, args.crosses, star, args.collinear)
        if args.crosses:
            raise UsageError("--crosses is a P^3-only flag")
        if args.lines:
            if args.marked:
                raise UsageError("--marked cannot be combined with --lines")
            return TScheme(args.d, args.lines, args.double, args.len2, star, args.points, args.collinear)
        return VScheme(args.d, args.double, args.len2, star, args.points, args.collinear, args.marked)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify(args, out=sys.stdout) -> int:
    cfg = RunConfig.from_args(args)
    scheme = scheme_from_args(args)
    verdict = verify_empty(scheme, cfg.oracle)
    print(f"{scheme}: surplus {surplus(scheme)}", file=out)
    print(verdict, file=out)
    return OK if verdict else FAILED


def cmd_search(args, out=sys.stdout) -> int:
    cfg = RunConfig.from_args(args)
    scheme = scheme_from_args(args)
    if not isinstance(scheme, BScheme):
        raise UsageError("search works on P^3 schemes (--p3 or --main-theorem)")
    if surplus(scheme) < 0:
        raise UsageError(f"{scheme} has negative surplus {surplus(scheme)}: forms of degree {scheme.d} exist")
    try:
        cert = search_certificate(scheme, cfg.policy)
    except SearchFailure as exc:
        print(exc, file=out)
        return FAILED
    for node in cert.specializations():
        print(f"{node.scheme}  {node.move}  ->  {node.trace} | {node.residual}", file=out)
    check = verify_certificate(cert)
    print(check, file=out)
    if cfg.output:
        write_certificate(cert, cfg.output)
        print(f"certificate written to {cfg.output}", file=out)
    return OK if check else FAILED


def cmd_check(args, out=sys.stdout) -> int:
    try:
        cert = read_certificate(args.file)
    except (OSError, CertificateFormatError) as exc:
        raise UsageError(f"cannot read {args.file}: {exc}") from None
    result = verify_certificate(cert)
    print(f"{cert.root}: {result}", file=out)
    return OK if result else FAILED


# ------------------------------------------------------------------ parser

def _oracle_flags(p):
    p.add_argument("--prime", type=int, default=DEFAULT_PRIME, help="field modulus (default %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="randomness seed (default 0)")
    p.add_argument("--retries", type=int, default=3, help="oracle attempts (default 3)")


def _scheme_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--p3", action="store_true", help="scheme in P^3: lines, crosses, sub-star, collinear points")
    g.add_argument("--p2", action="store_true", help="scheme in the plane")
    g.add_argument("--main-theorem", action="store_true", help="the balanced union of lines at degree --d")
    p.add_argument("--d", type=int, help="degree of forms")
    p.add_argument("--lines", type=int, default=0)
    p.add_argument("--crosses", type=int, default=0)
    p.add_argument("--substar", help="A,B: A star lines with B nodes omitted")
    p.add_argument("--collinear", type=int, default=0)
    p.add_argument("--points", type=int, default=0)
    p.add_argument("--double", type=int, default=0, help="double points (plane)")
    p.add_argument("--len2", type=int, default=0, help="length-2 schemes (plane)")
    p.add_argument("--marked", type=int, default=0, help="marked simple points (plane)")


def _search_flags(p):
    p.add_argument("--max-depth", type=int, default=40)
    p.add_argument("--branching-cap", type=int, default=6)
    p.add_argument("--leaf-degree", type=int, default=3)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="postulate", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("numerology", help="balance table of the main theorem schemes")
    p.add_argument("--max", type=int, required=True)
    p.set_defaults(func=cmd_numerology)

    p = sub.add_parser("chain", help="replay a fixed reduction chain")
    p.add_argument("--case", required=True, choices=["lemma", "initial", "hh9", "p2-first", "p2-second"])
    p.add_argument("--k", type=int)
    p.add_argument("--d", type=int, help="degree, for --case initial")
    p.add_argument("--verify", action="store_true", help="oracle-check traces and leaf, build a certificate")
    p.add_argument("--out", help="certificate file (needs --verify)")
    _oracle_flags(p)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("verify", help="direct oracle check of one scheme")
    _scheme_flags(p)
    _oracle_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="search for a certificate")
    _scheme_flags(p)
    _oracle_flags(p)
    _search_flags(p)
    p.add_argument("--out", help="certificate file")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("check", help="replay a certificate file")
    p.add_argument("file")
    _oracle_flags(p)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args, out=out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except c3.InfeasibleMove as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()

"""Certificate trees, their JSON file format, and the replay checker.

File layout (keys always in this order)::

    {"format_version": "1",
     "config": {"prime": ..., "seed": ...},
     "root": {"scheme": {...}, "node": "<id>"},
     "nodes": [{"id": ..., "kind": ..., ...}, ...]}

Every integer is written as a decimal string.  Nodes are listed in preorder
and refer to their children by id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from typing import Union

from sympy import isprime

from .calculus2 import PlaneMove, PlaneStepError, Target, plane_step, strip_lines
from .calculus3 import apply_move, feasible
from .model import BScheme, Scheme, SpecMove, SubStar, TScheme, VScheme, dim_forms, surplus
from .oracle import RealizationError, attempt

FORMAT_VERSION = "1"


@dataclass
class OracleLeaf:
    scheme: Scheme
    prime: int
    seed: int
    rank: int
    cols: int


@dataclass
class AnalyticLeaf:
    scheme: Scheme
    reason: str  # "negative_degree" or "known_base_fact"


@dataclass
class PlaneStep:
    scheme: VScheme
    move: PlaneMove
    result: VScheme
    child: "Node"


@dataclass
class StripLines:
    source: TScheme
    result: VScheme
    child: "Node"


@dataclass
class Specialize3:
    scheme: BScheme
    move: SpecMove
    trace: TScheme
    residual: BScheme
    trace_child: StripLines
    residual_child: "Node"


Node = Union[Specialize3, StripLines, PlaneStep, OracleLeaf, AnalyticLeaf]


@dataclass
class Certificate:
    root: Scheme
    node: Node
    prime: int
    seed: int

    def specializations(self) -> list[Specialize3]:
        out = []
        n = self.node
        while isinstance(n, Specialize3):
            out.append(n)
            n = n.residual_child
        return out


# Base facts that need no computation beyond what is classically known; the
# test suite re-derives each one with the oracle.
KNOWN_BASE_FACTS = {
    # no plane contains a line and two general points
    BScheme(1, 1, 0, SubStar(3, 1)),
    # no quartic through 15 general points
    VScheme(4, 0, 0, SubStar(3, 1), 13),
    # no quartic through 2 general double points and 9 general points
    VScheme(4, 2, 0, SubStar(3, 1), 7),
}


def node_scheme(n: Node) -> Scheme:
    return n.source if isinstance(n, StripLines) else n.scheme


# ---------------------------------------------------------------- encoding

class CertificateFormatError(ValueError):
    pass


def _i(x: int) -> str:
    return str(int(x))


def encode_scheme(s: Scheme) -> dict:
    if isinstance(s, BScheme):
        return {"type": "B", "d": _i(s.d), "L": _i(s.L), "C": _i(s.C),
                "substar": [_i(s.substar.a), _i(s.substar.b)], "collinear": _i(s.collinear)}
    if isinstance(s, TScheme):
        return {"type": "T", "d": _i(s.d), "lines": _i(s.lines), "dbl": _i(s.dbl),
                "len2": _i(s.len2), "substar": [_i(s.substar.a), _i(s.substar.b)],
                "pts": _i(s.pts), "collinear": _i(s.collinear)}
    return {"type": "V", "d": _i(s.d), "dbl": _i(s.dbl), "len2": _i(s.len2),
            "substar": [_i(s.substar.a), _i(s.substar.b)], "pts": _i(s.pts),
            "collinear": _i(s.collinear), "marked": _i(s.marked)}


def _int(x) -> int:
    if not isinstance(x, str) or not x.lstrip("-").isdigit():
        raise CertificateFormatError(f"expected a decimal string, got {x!r}")
    return int(x)


def _keys(obj, keys, what):
    if not isinstance(obj, dict) or list(obj) != list(keys):
        got = list(obj) if isinstance(obj, dict) else type(obj).__name__
        raise CertificateFormatError(f"{what}: expected keys {list(keys)}, got {got}")


def decode_scheme(obj) -> Scheme:
    kind = obj.get("type") if isinstance(obj, dict) else None
    fields = {
        "B": ("type", "d", "L", "C", "substar", "collinear"),
        "T": ("type", "d", "lines", "dbl", "len2", "substar", "pts", "collinear"),
        "V": ("type", "d", "dbl", "len2", "substar", "pts", "collinear", "marked"),
    }
    if kind not in fields:
        raise CertificateFormatError(f"unknown scheme {obj!r}")
    _keys(obj, fields[kind], "scheme")
    star = obj["substar"]
    if not isinstance(star, list) or len(star) != 2:
        raise CertificateFormatError(f"bad sub-star {star!r}")
    vals = {k: _int(v) for k, v in obj.items() if k not in ("type", "substar")}
    try:
        vals["substar"] = SubStar(_int(star[0]), _int(star[1]))
        cls = {"B": BScheme, "T": TScheme, "V": VScheme}[kind]
        return cls(**vals)
    except ValueError as exc:
        raise CertificateFormatError(str(exc)) from None


def _encode_move(m: SpecMove) -> dict:
    return {"ell": _i(m.ell), "s": _i(m.s), "h": _i(m.h), "c": _i(m.c), "star": bool(m.star)}


def _decode_move(obj) -> SpecMove:
    _keys(obj, ("ell", "s", "h", "c", "star"), "move")
    if not isinstance(obj["star"], bool):
        raise CertificateFormatError("move star flag must be a boolean")
    try:
        return SpecMove(_int(obj["ell"]), _int(obj["s"]), _int(obj["h"]), _int(obj["c"]), obj["star"])
    except ValueError as exc:
        raise CertificateFormatError(str(exc)) from None


def _encode_plane_move(m: PlaneMove) -> dict:
    return {"target": m.target.value, "n_dbl": _i(m.n_dbl), "n_len2": _i(m.n_len2),
            "n_pts": _i(m.n_pts)}


def _decode_plane_move(obj) -> PlaneMove:
    _keys(obj, ("target", "n_dbl", "n_len2", "n_pts"), "plane move")
    try:
        return PlaneMove(Target(obj["target"]), _int(obj["n_dbl"]), _int(obj["n_len2"]),
                         _int(obj["n_pts"]))
    except ValueError as exc:
        raise CertificateFormatError(str(exc)) from None


def to_json(cert: Certificate) -> str:
    nodes = []

    def emit(n: Node) -> str:
        nid = _i(len(nodes))
        rec = {"id": nid}
        nodes.append(rec)
        if isinstance(n, Specialize3):
            rec.update(kind="specialize3", scheme=encode_scheme(n.scheme), move=_encode_move(n.move),
                       trace=encode_scheme(n.trace), residual=encode_scheme(n.residual))
            rec["trace_child"] = emit(n.trace_child)
            rec["residual_child"] = emit(n.residual_child)
        elif isinstance(n, StripLines):
            rec.update(kind="strip_lines", source=encode_scheme(n.source), result=encode_scheme(n.result))
            rec["child"] = emit(n.child)
        elif isinstance(n, PlaneStep):
            rec.update(kind="plane_step", scheme=encode_scheme(n.scheme),
                       move=_encode_plane_move(n.move), result=encode_scheme(n.result))
            rec["child"] = emit(n.child)
        elif isinstance(n, OracleLeaf):
            rec.update(kind="oracle_leaf", scheme=encode_scheme(n.scheme), prime=_i(n.prime),
                       seed=_i(n.seed), rank=_i(n.rank), cols=_i(n.cols))
        elif isinstance(n, AnalyticLeaf):
            rec.update(kind="analytic_leaf", scheme=encode_scheme(n.scheme), reason=n.reason)
        else:
            raise TypeError(f"not a certificate node: {n!r}")
        return nid

    root_id = emit(cert.node)
    doc = {
        "format_version": FORMAT_VERSION,
        "config": {"prime": _i(cert.prime), "seed": _i(cert.seed)},
        "root": {"scheme": encode_scheme(cert.root), "node": root_id},
        "nodes": nodes,
    }
    return json.dumps(doc, indent=2) + "\n"


_NODE_KEYS = {
    "specialize3": ("id", "kind", "scheme", "move", "trace", "residual", "trace_child", "residual_child"),
    "strip_lines": ("id", "kind", "source", "result", "child"),
    "plane_step": ("id", "kind", "scheme", "move", "result", "child"),
    "oracle_leaf": ("id", "kind", "scheme", "prime", "seed", "rank", "cols"),
    "analytic_leaf": ("id", "kind", "scheme", "reason"),
}


def from_json(text: str) -> Certificate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateFormatError(f"not JSON: {exc}") from None
    _keys(doc, ("format_version", "config", "root", "nodes"), "certificate")
    if doc["format_version"] != FORMAT_VERSION:
        raise CertificateFormatError(f"unsupported format_version {doc['format_version']!r}")
    _keys(doc["config"], ("prime", "seed"), "config")
    _keys(doc["root"], ("scheme", "node"), "root")
    records = doc["nodes"]
    if not isinstance(records, list):
        raise CertificateFormatError("nodes must be a list")
    by_id = {}
    for rec in records:
        if not isinstance(rec, dict) or rec.get("kind") not in _NODE_KEYS:
            raise CertificateFormatError(f"bad node {rec!r}")
        _keys(rec, _NODE_KEYS[rec["kind"]], f"node {rec.get('id')}")
        if rec["id"] in by_id:
            raise CertificateFormatError(f"duplicate node id {rec['id']}")
        by_id[rec["id"]] = rec
    used = set()

    def build(nid) -> Node:
        if nid not in by_id:
            raise CertificateFormatError(f"dangling node reference {nid!r}")
        if nid in used:
            raise CertificateFormatError(f"node {nid} referenced twice")
        used.add(nid)
        rec = by_id[nid]
        kind = rec["kind"]
        if kind == "specialize3":
            return Specialize3(decode_scheme(rec["scheme"]), _decode_move(rec["move"]),
                               decode_scheme(rec["trace"]), decode_scheme(rec["residual"]),
                               build(rec["trace_child"]), build(rec["residual_child"]))
        if kind == "strip_lines":
            return StripLines(decode_scheme(rec["source"]), decode_scheme(rec["result"]),
                              build(rec["child"]))
        if kind == "plane_step":
            return PlaneStep(decode_scheme(rec["scheme"]), _decode_plane_move(rec["move"]),
                             decode_scheme(rec["result"]), build(rec["child"]))
        if kind == "oracle_leaf":
            return OracleLeaf(decode_scheme(rec["scheme"]), _int(rec["prime"]), _int(rec["seed"]),
                              _int(rec["rank"]), _int(rec["cols"]))
        if not isinstance(rec["reason"], str):
            raise CertificateFormatError("analytic reason must be a string")
        return AnalyticLeaf(decode_scheme(rec["scheme"]), rec["reason"])

    node = build(doc["root"]["node"])
    if len(used) != len(by_id):
        raise CertificateFormatError("unreferenced nodes in certificate")
    return Certificate(decode_scheme(doc["root"]["scheme"]), node,
                       _int(doc["config"]["prime"]), _int(doc["config"]["seed"]))


def write_certificate(cert: Certificate, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(cert))


def read_certificate(path) -> Certificate:
    with open(path, encoding="utf-8") as fh:
        return from_json(fh.read())


# ---------------------------------------------------------------- checking

@dataclass(frozen=True)
class CheckResult:
    ok: bool
    path: tuple = ()
    reason: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "certificate verified"
        return f"failed at {'/'.join(self.path) or 'root'}: {self.reason}"


class _Reject(Exception):
    def __init__(self, path, reason):
        self.path = tuple(path)
        self.reason = reason


def _strip_excess(lines: int, d: int) -> int:
    # dim_forms_p2 is 0 below degree 0, while the count identities use the
    # binomial polynomial; this is the gap once d - lines < -2
    return comb(lines - d - 1, 2) if lines - d - 1 >= 2 else 0


def conservation_ok(b: BScheme, m: SpecMove, t: TScheme, r: BScheme) -> bool:
    """Curve-degree and surplus conservation for one specialization."""
    v = strip_lines(t)
    curves = b.L + 2 * b.C == r.L + 2 * r.C + t.lines
    counts = surplus(b) == surplus(r) + surplus(v) - _strip_excess(t.lines, t.d)
    return curves and counts


def verify_certificate(cert: Certificate) -> CheckResult:
    """Replay every transition and recompute every oracle leaf from its recorded prime and seed."""
    try:
        _check(cert.node, cert.root, ("root",))
    except _Reject as rej:
        return CheckResult(False, rej.path, rej.reason)
    return CheckResult(True)


def _check(n: Node, expected: Scheme, path):
    if node_scheme(n) != expected:
        raise _Reject(path, f"expected {expected}, node holds {node_scheme(n)}")
    if isinstance(n, Specialize3):
        if not isinstance(n.scheme, BScheme) or not feasible(n.scheme, n.move):
            raise _Reject(path, f"{n.move} is not feasible for {n.scheme}")
        t, r = apply_move(n.scheme, n.move)
        if (t, r) != (n.trace, n.residual):
            raise _Reject(path, f"{n.move} on {n.scheme} gives {t} | {r}, recorded {n.trace} | {n.residual}")
        if not conservation_ok(n.scheme, n.move, t, r):
            raise _Reject(path, "conservation identity violated")
        if not isinstance(n.trace_child, StripLines):
            raise _Reject(path + ("trace",), "trace obligation must start with strip_lines")
        _check(n.trace_child, t, path + ("trace",))
        _check(n.residual_child, r, path + ("residual",))
    elif isinstance(n, StripLines):
        if strip_lines(n.source) != n.result:
            raise _Reject(path, f"stripping {n.source} gives {strip_lines(n.source)}, recorded {n.result}")
        _check(n.child, n.result, path + ("stripped",))
    elif isinstance(n, PlaneStep):
        if not isinstance(n.scheme, VScheme):
            raise _Reject(path, "plane step on a non-plane scheme")
        try:
            res = plane_step(n.scheme, n.move)
        except PlaneStepError as exc:
            raise _Reject(path, str(exc)) from None
        if res != n.result:
            raise _Reject(path, f"{n.move} gives {res}, recorded {n.result}")
        _check(n.child, res, path + ("line",))
    elif isinstance(n, OracleLeaf):
        if not (n.prime < 1 << 32 and isprime(n.prime)):
            raise _Reject(path, f"{n.prime} is not a prime below 2**32")
        cols = dim_forms(n.scheme)
        if n.cols != cols or n.rank != cols:
            raise _Reject(path, f"leaf records rank {n.rank}/{n.cols}, full rank is {cols}")
        try:
            rk, c = attempt(n.scheme, n.prime, n.seed)
        except (RealizationError, ValueError) as exc:
            raise _Reject(path, f"cannot replay oracle leaf: {exc}") from None
        if (rk, c) != (n.rank, n.cols):
            raise _Reject(path, f"oracle replay gives rank {rk}/{c}, recorded {n.rank}/{n.cols}")
    elif isinstance(n, AnalyticLeaf):
        if n.reason == "negative_degree":
            if n.scheme.d >= 0:
                raise _Reject(path, f"{n.scheme} does not have negative degree")
        elif n.reason == "known_base_fact":
            if n.scheme not in KNOWN_BASE_FACTS:
                raise _Reject(path, f"{n.scheme} is not a known base fact")
        else:
            raise _Reject(path, f"unknown analytic reason {n.reason!r}")
    else:
        raise _Reject(path, f"unknown node {n!r}")

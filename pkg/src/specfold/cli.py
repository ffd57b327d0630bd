"""Command line front end.

Exit codes: 0 on success, 1 when a mathematical check fails (a falsifier
fired, or the input is not Dynkin), 2 on input or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .ar_knitting import TableMismatch, knit, nakayama_permutation
from .field_tower import check_prime, default_prime
from .homological import (
    Complex,
    NotAlmostKoszul,
    NotExact,
    almost_koszul_resolution,
    certify_almost_koszul,
    homology,
    split_by_star_degree,
)
from .nakayama import (
    NoFunctional,
    NotWellDefined,
    check_blockwise_pairing,
    check_twisted_symmetry,
    frobenius_certificate,
    nakayama_automorphism,
)
from .segre import HomologyLeak, SignError, product_koszul_complex, vertex_name
from .species import (
    Cyclic,
    Disconnected,
    NotDynkin,
    SpeciesError,
    SpeciesSpec,
    dynkin_species,
    load_species,
)
from .tensor_algebra import TruncationHit, algebra_dump, preprojective, socle

log = logging.getLogger("specfold")

FALSIFIERS = (NotDynkin, Cyclic, Disconnected, TableMismatch, NoFunctional, NotWellDefined, NotExact,
              NotAlmostKoszul, HomologyLeak, SignError, TruncationHit)

_TYPE_NAME = re.compile(r"^([A-G])(\d+)$")


@dataclass
class RunConfig:
    command: str
    inputs: List[str] = field(default_factory=list)
    prime: int = 7
    fmt: str = "text"
    output: Optional[str] = None
    verbosity: int = 0


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input


def read_species(arg: str, prime: int) -> SpeciesSpec:
    """A JSON species file, or a type name such as ``A4`` for the standard orientation."""
    m = _TYPE_NAME.match(arg)
    if m and not os.path.exists(arg):
        return dynkin_species(m.group(1), int(m.group(2)), prime=prime)
    try:
        return load_species(arg, prime)
    except OSError as exc:
        raise InputError(f"cannot read {arg}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{arg}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def require_dynkin(s: SpeciesSpec) -> SpeciesSpec:
    if s.dynkin is None:
        raise NotDynkin("the underlying valued graph is not a Dynkin diagram")
    return s


def parse_simple(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"--simple expects comma separated vertex ids, got {text!r}") from None


# ---------------------------------------------------------------------------
# reports (plain data, shared with the acceptance checks)


def summand_row(vertex, shift) -> list:
    return [vertex_name(vertex), shift[0], shift[1]]


def complex_shape(c: Complex) -> List[List[list]]:
    """Summands per homological index, sorted within each index."""
    return [sorted(summand_row(s.vertex, s.shift) for s in t.summands) for t in c.terms]


def homology_rows(h: Dict[int, Dict]) -> Dict[str, list]:
    out = {}
    for i, blocks in sorted(h.items()):
        out[str(i)] = sorted([vertex_name(v), d[0], d[1], n] for (d, v), n in blocks.items())
    return out


def classify_report(s: SpeciesSpec) -> str:
    t = require_dynkin(s).dynkin
    return f"{t.name}, representation finite, h={t.coxeter_number}"


def ar_report(s: SpeciesSpec) -> dict:
    ar = knit(require_dynkin(s))
    nd = nakayama_permutation(ar)
    rows = []
    for (i, t), v in sorted(ar.vertices.items()):
        rows.append({"orbit": i, "t": t, "dim": list(v.dim),
                     "injective": ar.is_injective((i, t))})
    return {
        "type": s.dynkin.name,
        "vertices": len(ar.vertices),
        "modules": rows,
        "arrows": sorted([list(a.source), list(a.target), a.d] for a in ar.arrows),
        "sigma": {str(k): v for k, v in sorted(nd.sigma.items())},
        "l": {str(k): v for k, v in sorted(nd.lengths.items())},
        "h": nd.h,
        "homogeneous": nd.homogeneous,
    }


def algebra_report(s: SpeciesSpec) -> dict:
    pi = preprojective(require_dynkin(s))
    hil = pi.hilbert()
    return {
        "type": s.dynkin.name,
        "dim": pi.dim,
        "top_degree": pi.top_degree,
        "hilbert": sorted([k[0], k[1], n] for k, n in hil.items()),
        "socle": sorted([vertex_name(x.vertex), x.degree, vertex_name(x.target), x.k_dim, x.d_dim]
                        for x in socle(pi)),
    }


def koszul_report(s: SpeciesSpec, i: int) -> dict:
    pi = preprojective(require_dynkin(s))
    if i not in pi.vertices:
        raise InputError(f"vertex {i} is not in the quiver")
    r = almost_koszul_resolution(pi, i)
    sp = split_by_star_degree(r)
    return {
        "type": s.dynkin.name,
        "simple": i,
        "terms": complex_shape(r),
        "homology": homology_rows(homology(r)),
        "split": {"Q": complex_shape(sp.Q), "R": complex_shape(sp.R)},
        "complex": r.to_json(),
    }


def product_report(s1: SpeciesSpec, s2: SpeciesSpec, simple: Tuple[int, int]) -> Tuple[dict, Complex]:
    if len(simple) != 2:
        raise InputError("--simple needs two vertex ids i,j")
    pi1, pi2 = preprojective(require_dynkin(s1)), preprojective(require_dynkin(s2))
    i, j = simple
    for v, pi in ((i, pi1), (j, pi2)):
        if v not in pi.vertices:
            raise InputError(f"vertex {v} is not in the quiver")
    sp1 = split_by_star_degree(almost_koszul_resolution(pi1, i))
    sp2 = split_by_star_degree(almost_koszul_resolution(pi2, j))
    ps = product_koszul_complex(pi1, sp1, pi2, sp2, simple, check=True)
    c = ps.cone
    report = {
        "left": s1.dynkin.name,
        "right": s2.dynkin.name,
        "simple": list(simple),
        "terms": complex_shape(c),
        "split": {"Q": complex_shape(ps.split.Q), "R": complex_shape(ps.split.R)},
        "homology": homology_rows(c.meta["homology"]),
        "top_star_degrees": c.meta["top_stars"],
    }
    return report, c


def nakayama_report(s: SpeciesSpec, verify: bool) -> dict:
    pi = preprojective(require_dynkin(s))
    nd = nakayama_permutation(knit(s))
    g = nakayama_automorphism(pi, nd.sigma)
    out = {
        "type": s.dynkin.name,
        "sigma": {str(k): v for k, v in sorted(nd.sigma.items())},
        "frobenius_twist": g.twist,
        "generators": dict(sorted(g.generator_images().items())),
    }
    if verify:
        try:
            cert = frobenius_certificate(pi, g)
            ok = (cert.nondegenerate(pi.p) and check_twisted_symmetry(pi, g, cert)
                  and check_blockwise_pairing(pi, cert))
        except NoFunctional:
            ok = False
        out["certificate"] = "PASS" if ok else "FAIL"
    return out


def complex_dot(c: Complex, name: str = "complex") -> str:
    lines = [f'digraph "{name}" {{', "  rankdir=RL;"]
    for i, t in enumerate(c.terms):
        label = " + ".join(f"P{vertex_name(s.vertex)}{tuple(s.shift)}" for s in t.summands) or "0"
        lines.append(f'  "C{i}" [shape=box,label="C{i}: {label}"];')
    for i in sorted(c.d):
        lines.append(f'  "C{i}" -> "C{i - 1}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# text rendering


def _ar_text(rep: dict) -> str:
    lines = [f"{rep['type']}: {rep['vertices']} indecomposables, h={rep['h']}"]
    for m in rep["modules"]:
        name = f"P{m['orbit']}" if m["t"] == 0 else f"tau^-{m['t']} P{m['orbit']}"
        flag = "  (injective)" if m["injective"] else ""
        lines.append(f"  {name:<14} {m['dim']}{flag}")
    sig = " ".join(f"{k}->{v}" for k, v in rep["sigma"].items())
    lines.append(f"sigma: {sig}")
    lines.append("l: " + " ".join(f"{k}:{v}" for k, v in rep["l"].items()))
    hom = rep["homogeneous"]
    lines.append(f"homogeneous: {hom if hom is not None else 'no'}")
    return "\n".join(lines) + "\n"


def _algebra_text(rep: dict) -> str:
    lines = [f"Pi({rep['type']}): dim {rep['dim']}, top degree {rep['top_degree']}", "hilbert (path, star, dim):"]
    lines += [f"  {a} {b} {n}" for a, b, n in rep["hilbert"]]
    lines.append("socle (vertex, degree, target, dim_K, dim_D):")
    lines += ["  " + " ".join(str(x) for x in row) for row in rep["socle"]]
    return "\n".join(lines) + "\n"


def _nakayama_text(rep: dict) -> str:
    lines = [f"{rep['type']}: gamma on generators (frobenius twist {rep['frobenius_twist']})"]
    lines += [f"  {k} -> {v}" for k, v in rep["generators"].items()]
    if "certificate" in rep:
        lines.append(f"frobenius certificate: {rep['certificate']}")
    return "\n".join(lines) + "\n"


def dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=str) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_classify(cfg: RunConfig, args) -> Tuple[str, int]:
    s = read_species(args.species, cfg.prime)
    line = classify_report(s)
    if cfg.fmt == "json":
        t = s.dynkin
        return dump({"type": t.name, "representation_finite": True, "h": t.coxeter_number}), 0
    return line + "\n", 0


def cmd_ar(cfg: RunConfig, args) -> Tuple[str, int]:
    s = require_dynkin(read_species(args.species, cfg.prime))
    if args.dot:
        return knit(s).to_dot(), 0
    rep = ar_report(s)
    return (dump(rep) if cfg.fmt == "json" else _ar_text(rep)), 0


def cmd_algebra(cfg: RunConfig, args) -> Tuple[str, int]:
    if args.dump:
        return dump(algebra_dump(preprojective(require_dynkin(read_species(args.species, cfg.prime))))), 0
    rep = algebra_report(read_species(args.species, cfg.prime))
    if args.certify:
        pi = preprojective(read_species(args.species, cfg.prime))
        c = certify_almost_koszul(pi)
        rep["almost_koszul"] = {"p": c.p, "q": c.q, "degenerate": c.degenerate, "valid_q": c.valid_q}
    if cfg.fmt == "json":
        return dump(rep), 0
    text = _algebra_text(rep)
    if "almost_koszul" in rep:
        ak = rep["almost_koszul"]
        text += f"almost koszul: ({ak['p']}, {ak['q']})" + (" degenerate" if ak["degenerate"] else "") + "\n"
    return text, 0


def cmd_koszul(cfg: RunConfig, args) -> Tuple[str, int]:
    (i,) = parse_simple(args.simple)
    return dump(koszul_report(read_species(args.species, cfg.prime), i)), 0


def cmd_nakayama(cfg: RunConfig, args) -> Tuple[str, int]:
    rep = nakayama_report(read_species(args.species, cfg.prime), args.verify)
    text = dump(rep) if cfg.fmt == "json" else _nakayama_text(rep)
    return text, (1 if rep.get("certificate") == "FAIL" else 0)


def cmd_segre(cfg: RunConfig, args) -> Tuple[str, int]:
    s1 = read_species(args.left, cfg.prime)
    s2 = read_species(args.right, cfg.prime)
    rep, cone = product_report(s1, s2, parse_simple(args.simple))
    if args.emit == "dot":
        return complex_dot(cone, f"{rep['left']} x {rep['right']}"), 0
    return dump(rep), 0


def cmd_selftest(cfg: RunConfig, args) -> Tuple[str, int]:
    from .acceptance import run_all

    results = run_all(cfg.prime, args.golden)
    lines = [f"specfold selftest (prime {cfg.prime})"]
    lines += [r.line() for r in results]
    passed = sum(r.ok for r in results)
    lines.append(f"{passed}/{len(results)} criteria PASS")
    return "\n".join(lines) + "\n", (0 if passed == len(results) else 1)


COMMANDS = {
    "classify": cmd_classify,
    "ar": cmd_ar,
    "algebra": cmd_algebra,
    "koszul": cmd_koszul,
    "nakayama": cmd_nakayama,
    "segre": cmd_segre,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specfold", description="Preprojective algebras of Dynkin species.")
    parser.add_argument("--prime", type=int, default=None, help="base field GF(p); default $SPECFOLD_PRIME or 7")
    parser.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    parser.add_argument("-o", "--output", help="write to this file instead of stdout")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="Dynkin type and Coxeter number")
    p.add_argument("species", help="species JSON file or a type name such as A4")
    p = sub.add_parser("ar", help="knit the Auslander-Reiten quiver")
    p.add_argument("species")
    p.add_argument("--dot", action="store_true", help="emit Graphviz DOT")
    p = sub.add_parser("algebra", help="dimensions and socle of the preprojective algebra")
    p.add_argument("species")
    p.add_argument("--certify", action="store_true", help="also compute the almost Koszul pair (p, q)")
    p.add_argument("--dump", action="store_true", help="emit basis, products and Hilbert table as JSON")
    p = sub.add_parser("koszul", help="almost Koszul complex of a simple module")
    p.add_argument("species")
    p.add_argument("--simple", required=True, help="vertex id")
    p = sub.add_parser("nakayama", help="Nakayama automorphism on generators")
    p.add_argument("species")
    p.add_argument("--verify", action="store_true", help="solve for a Frobenius functional")
    p = sub.add_parser("segre", help="product almost Koszul complex of two species")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--simple", required=True, help="i,j")
    p.add_argument("--emit", choices=("json", "dot"), default="json")
    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.add_argument("--golden", default=None, help="directory with the golden JSON files")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        prime = args.prime if args.prime is not None else default_prime()
        check_prime(prime)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cfg = RunConfig(args.command, [], prime, args.fmt, args.output, args.verbose)
    try:
        text, code = COMMANDS[args.command](cfg, args)
    except FALSIFIERS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except SpeciesError as exc:
        where = f" at {exc.pointer}" if getattr(exc, "pointer", "") else ""
        print(f"input error{where}: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    if cfg.output:
        try:
            with open(cfg.output, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"cannot write {cfg.output}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

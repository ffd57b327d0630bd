"""Valued quivers, Dynkin classification, finite-field species and the Casimir element.

Every species here is built from one tower K = GF(p) < G = GF(p^k).  A vertex
carries D_i = K or D_i = G, and an arrow carries the larger of its two end
fields as bimodule, acted on by multiplication.  Field elements are tuples in
the power basis of G (see ``field_tower.ExtensionField``).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .field_tower import ExtensionField, check_prime, default_prime


class SpeciesError(ValueError):
    """Invalid species input; ``pointer`` is a JSON pointer into the source."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer


class Disconnected(SpeciesError):
    pass


class NotDynkin(SpeciesError):
    pass


class Cyclic(SpeciesError):
    pass


@dataclass(frozen=True)
class Arrow:
    id: str
    source: int
    target: int


@dataclass(frozen=True)
class ValuedQuiver:
    """Quiver with a division degree d_i = dim_K D_i per vertex."""

    vertices: Tuple[int, ...]
    degrees: Tuple[Tuple[int, int], ...]
    arrows: Tuple[Arrow, ...]

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise SpeciesError("duplicate vertex id")
        if set(dict(self.degrees)) != vs:
            raise SpeciesError("every vertex needs a degree")
        seen = set()
        ids = set()
        for a in self.arrows:
            if a.source not in vs or a.target not in vs:
                raise SpeciesError(f"arrow {a.id} has an unknown endpoint")
            if a.source == a.target:
                raise Cyclic(f"arrow {a.id} is a loop")
            pair = frozenset((a.source, a.target))
            if pair in seen:
                raise SpeciesError(f"multiple arrows between {a.source} and {a.target}")
            seen.add(pair)
            if a.id in ids:
                raise SpeciesError(f"duplicate arrow id {a.id}")
            ids.add(a.id)
        big = {d for _, d in self.degrees if d > 1}
        if len(big) > 1 or any(d < 1 or d > 3 for _, d in self.degrees):
            raise SpeciesError("vertex degrees must be 1 or a single k in {2, 3}")

    @classmethod
    def build(cls, degrees: Dict[int, int], arrows: Sequence[Tuple[str, int, int]]) -> "ValuedQuiver":
        vs = tuple(sorted(degrees))
        return cls(vs, tuple((v, degrees[v]) for v in vs), tuple(Arrow(*a) for a in arrows))

    def degree(self, v: int) -> int:
        return dict(self.degrees)[v]

    @property
    def k(self) -> int:
        return max(d for _, d in self.degrees)

    def valuation(self, a: Arrow) -> Tuple[int, int]:
        """(dim_{D_s} M, dim_{D_t} M) with M the larger end field."""
        ds, dt = self.degree(a.source), self.degree(a.target)
        m = max(ds, dt)
        return m // ds, m // dt

    def neighbours(self, v: int) -> List[int]:
        out = []
        for a in self.arrows:
            if a.source == v:
                out.append(a.target)
            elif a.target == v:
                out.append(a.source)
        return sorted(out)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for w in self.neighbours(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def is_acyclic(self) -> bool:
        indeg = {v: 0 for v in self.vertices}
        for a in self.arrows:
            indeg[a.target] += 1
        ready = [v for v in self.vertices if indeg[v] == 0]
        count = 0
        while ready:
            v = ready.pop()
            count += 1
            for a in self.arrows:
                if a.source == v:
                    indeg[a.target] -= 1
                    if indeg[a.target] == 0:
                        ready.append(a.target)
        return count == len(self.vertices)

    def reoriented(self, flips: Sequence[bool]) -> "ValuedQuiver":
        arrows = tuple(
            Arrow(a.id, a.target, a.source) if f else a for a, f in zip(self.arrows, flips)
        )
        return ValuedQuiver(self.vertices, self.degrees, arrows)

    def relabel_degrees(self, degrees: Dict[int, int]) -> "ValuedQuiver":
        return ValuedQuiver(self.vertices, tuple((v, degrees[v]) for v in self.vertices), self.arrows)


# ---------------------------------------------------------------------------
# Dynkin data in the labelling of the standard diagrams


COXETER = {"E6": 12, "E7": 18, "E8": 30, "F4": 12, "G2": 6}


@dataclass(frozen=True)
class DynkinType:
    family: str
    n: int
    # input vertex -> standard label 1..n
    labels: Tuple[Tuple[int, int], ...] = ()

    @property
    def name(self) -> str:
        return f"{self.family}{self.n}"

    def __str__(self) -> str:
        return self.name

    @property
    def coxeter_number(self) -> int:
        return coxeter_number(self.family, self.n)

    def label(self, v: int) -> int:
        return dict(self.labels)[v]

    def vertex(self, label: int) -> int:
        return {b: a for a, b in self.labels}[label]

    def sigma_closed_form(self) -> Dict[int, int]:
        """Nakayama permutation on input vertices, from the closed-form table."""
        table = sigma_table(self.family, self.n)
        return {v: self.vertex(table[self.label(v)]) for v, _ in self.labels}


def coxeter_number(family: str, n: int) -> int:
    if family == "A":
        return n + 1
    if family in ("B", "C"):
        return 2 * n
    if family == "D":
        return 2 * n - 2
    return COXETER[f"{family}{n}"]


def sigma_table(family: str, n: int) -> Dict[int, int]:
    labels = range(1, n + 1)
    if family == "A":
        return {i: n + 1 - i for i in labels}
    if family == "D" and n % 2 == 1:
        return {i: {1: 2, 2: 1}.get(i, i) for i in labels}
    if family == "E" and n == 6:
        return {i: (i if i == 6 else 6 - i) for i in labels}
    return {i: i for i in labels}


def homogeneity_table(family: str, n: int) -> Optional[int]:
    """l for which an l-homogeneous orientation exists, None otherwise."""
    h = coxeter_number(family, n)
    if family == "A" and n % 2 == 0:
        return None
    return h // 2


def dynkin_edges(family: str, n: int) -> List[Tuple[int, int]]:
    if family in ("A", "B", "C", "F", "G"):
        return [(i, i + 1) for i in range(1, n)]
    if family == "D":
        return [(1, 3), (2, 3)] + [(i, i + 1) for i in range(3, n)]
    if family == "E":
        return [(i, i + 1) for i in range(1, n - 1)] + [(3, n)]
    raise ValueError(f"unknown family {family}")


def standard_degrees(family: str, n: int, k: Optional[int] = None) -> Dict[int, int]:
    """Division degrees per the standard species realization.

    B_n: F at 1, G elsewhere.  C_n: G at 1, F elsewhere.  F4: G G F F.
    G2: G F with [G:F] = 3.  A, D, E: F throughout.
    """
    if family == "B":
        return {i: (1 if i == 1 else 2) for i in range(1, n + 1)}
    if family == "C":
        return {i: (2 if i == 1 else 1) for i in range(1, n + 1)}
    if family == "F":
        return {1: 2, 2: 2, 3: 1, 4: 1}
    if family == "G":
        return {1: 3, 2: 1}
    return {i: 1 for i in range(1, n + 1)}


def check_type(family: str, n: int) -> None:
    ok = (
        (family == "A" and n >= 1)
        or (family in ("B", "C") and n >= 2)
        or (family == "D" and n >= 4)
        or (family == "E" and n in (6, 7, 8))
        or (family == "F" and n == 4)
        or (family == "G" and n == 2)
    )
    if not ok:
        raise ValueError(f"no Dynkin diagram {family}{n}")


def dynkin_quiver(family: str, n: int, orientation: Optional[Sequence[bool]] = None) -> ValuedQuiver:
    """Standard-labelled Dynkin quiver; orientation[i] flips the i-th edge.

    Unflipped edges point from the smaller label to the larger one.
    """
    check_type(family, n)
    edges = dynkin_edges(family, n)
    flips = list(orientation) if orientation is not None else [False] * len(edges)
    arrows = []
    for idx, ((a, b), f) in enumerate(zip(edges, flips)):
        s, t = (b, a) if f else (a, b)
        arrows.append((f"a{idx + 1}", s, t))
    return ValuedQuiver.build(standard_degrees(family, n), arrows)


def random_orientations(family: str, n: int, count: int, seed: int = 0) -> List[ValuedQuiver]:
    """``count`` distinct orientations when that many exist, deterministic in ``seed``."""
    m = len(dynkin_edges(family, n))
    rng = random.Random(seed)
    seen = []
    total = 2 ** m
    attempts = 0
    while len(seen) < min(count, total) and attempts < 1000:
        flips = tuple(rng.random() < 0.5 for _ in range(m))
        attempts += 1
        if flips not in seen:
            seen.append(flips)
    return [dynkin_quiver(family, n, f) for f in seen]


def sigma_stable_orientation(family: str, n: int) -> Optional[ValuedQuiver]:
    """An orientation mapped to itself by the Nakayama permutation, if one exists."""
    table = sigma_table(family, n)
    edges = dynkin_edges(family, n)
    m = len(edges)
    for bits in range(2 ** m):
        flips = [(bits >> i) & 1 == 1 for i in range(m)]
        q = dynkin_quiver(family, n, flips)
        arrows = {(a.source, a.target) for a in q.arrows}
        if all((table[s], table[t]) in arrows for s, t in arrows):
            return q
    return None


# ---------------------------------------------------------------------------
# classification


def _path_order(q: ValuedQuiver) -> Optional[List[int]]:
    ends = [v for v in q.vertices if len(q.neighbours(v)) <= 1]
    if len(q.vertices) == 1:
        return list(q.vertices)
    if len(ends) != 2 or any(len(q.neighbours(v)) > 2 for v in q.vertices):
        return None
    order = [min(ends)]
    while len(order) < len(q.vertices):
        nxt = [w for w in q.neighbours(order[-1]) if w not in order]
        order.append(nxt[0])
    return order


def classify(q: ValuedQuiver) -> Optional[DynkinType]:
    """Dynkin type of the underlying valued graph, or None when not Dynkin.

    Representation-finite exactly when a type is returned.  For rank 2 with a
    valuation 2 edge the diagrams B2 and C2 coincide; we report B2.
    """
    if not q.is_connected():
        raise Disconnected("quiver is not connected")
    n = len(q.vertices)
    if len(q.arrows) != n - 1:
        return None  # connected with a cycle in the underlying graph
    ratios = {}
    for a in q.arrows:
        ds, dt = q.degree(a.source), q.degree(a.target)
        ratios[frozenset((a.source, a.target))] = max(ds, dt) // min(ds, dt)
    valued = [e for e, r in ratios.items() if r > 1]
    path = _path_order(q)

    if not valued:
        if path is not None:
            return DynkinType("A", n, tuple((v, i + 1) for i, v in enumerate(path)))
        return _classify_branched(q)
    if len(valued) > 1 or path is None:
        return None
    edge = valued[0]
    r = ratios[edge]
    if r == 3:
        if n != 2:
            return None
        g = max(q.vertices, key=q.degree)
        f = min(q.vertices, key=q.degree)
        return DynkinType("G", 2, ((g, 1), (f, 2)))
    pos = [i for i in range(n - 1) if frozenset((path[i], path[i + 1])) == edge][0]
    if pos == n - 2:
        path = path[::-1]
        pos = 0
    if pos == 0:
        first = path[0]
        small_end = q.degree(first) < q.degree(path[1])
        family = "B" if (small_end or n == 2) else "C"
        if n == 2:
            path = sorted(path, key=q.degree)
        return DynkinType(family, n, tuple((v, i + 1) for i, v in enumerate(path)))
    if n == 4 and pos == 1:
        if q.degree(path[0]) < q.degree(path[3]):
            path = path[::-1]
        return DynkinType("F", 4, tuple((v, i + 1) for i, v in enumerate(path)))
    return None


def _classify_branched(q: ValuedQuiver) -> Optional[DynkinType]:
    branch = [v for v in q.vertices if len(q.neighbours(v)) >= 3]
    if len(branch) != 1 or len(q.neighbours(branch[0])) != 3:
        return None
    b = branch[0]
    arms = []
    for start in q.neighbours(b):
        arm = [start]
        prev = b
        while True:
            nxt = [w for w in q.neighbours(arm[-1]) if w != prev]
            if not nxt:
                break
            if len(nxt) > 1:
                return None
            prev = arm[-1]
            arm.append(nxt[0])
        arms.append(arm)
    arms.sort(key=lambda arm: (len(arm), arm[0]))
    lengths = tuple(len(a) for a in arms)
    n = len(q.vertices)
    if lengths[0] == 1 and lengths[1] == 1:
        order = [arms[0][0], arms[1][0], b] + arms[2]
        return DynkinType("D", n, tuple((v, i + 1) for i, v in enumerate(order)))
    if lengths in ((1, 2, 2), (1, 2, 3), (1, 2, 4)):
        two = arms[1][::-1]
        order = two + [b] + arms[2] + arms[0]
        return DynkinType("E", n, tuple((v, i + 1) for i, v in enumerate(order)))
    return None


# ---------------------------------------------------------------------------
# species


@dataclass(frozen=True)
class SpeciesSpec:
    """A valued quiver realized over GF(p) < GF(p^k)."""

    quiver: ValuedQuiver
    prime: int
    name: str = ""
    dynkin: Optional[DynkinType] = None

    @property
    def k(self) -> int:
        return self.quiver.k

    @property
    def big(self) -> ExtensionField:
        return ExtensionField(self.prime, self.k)

    @property
    def vertices(self) -> Tuple[int, ...]:
        return self.quiver.vertices

    @property
    def arrows(self) -> Tuple[Arrow, ...]:
        return self.quiver.arrows

    def degree(self, v: int) -> int:
        return self.quiver.degree(v)

    def bimodule_degree(self, a: Arrow) -> int:
        return max(self.degree(a.source), self.degree(a.target))

    @property
    def orientation(self) -> str:
        return " ".join(f"{a.source}->{a.target}" for a in self.arrows)


def realize(q: ValuedQuiver, prime: Optional[int] = None, name: str = "") -> SpeciesSpec:
    """Assign fields per the standard pattern of the detected Dynkin type."""
    p = default_prime() if prime is None else prime
    check_prime(p)
    t = classify(q)
    if t is None:
        raise NotDynkin("quiver is not of Dynkin type")
    std = standard_degrees(t.family, t.n)
    degrees = {v: std[t.label(v)] for v in q.vertices}
    return SpeciesSpec(q.relabel_degrees(degrees), p, name or t.name, t)


def dynkin_species(family: str, n: int, orientation: Optional[Sequence[bool]] = None,
                   prime: Optional[int] = None) -> SpeciesSpec:
    return realize(dynkin_quiver(family, n, orientation), prime)


def species_from_arrows(family: str, n: int, arrows: Sequence[Tuple[int, int]],
                        prime: Optional[int] = None) -> SpeciesSpec:
    """Standard-labelled Dynkin species with an explicit orientation."""
    edges = dynkin_edges(family, n)
    want = {frozenset(e) for e in edges}
    if {frozenset(a) for a in arrows} != want or len(arrows) != len(edges):
        raise SpeciesError(f"arrows do not orient the {family}{n} diagram")
    flips = []
    lookup = {frozenset(a): a for a in arrows}
    for a, b in edges:
        flips.append(lookup[frozenset((a, b))] == (b, a))
    return dynkin_species(family, n, flips, prime)


# ---------------------------------------------------------------------------
# JSON input


def species_from_json(data, prime: Optional[int] = None) -> SpeciesSpec:
    """Parse {name, prime, vertices:[{id, ext_degree}], arrows:[{id, source, target}]}."""
    if not isinstance(data, dict):
        raise SpeciesError("expected an object", "")
    for key in ("vertices", "arrows"):
        if key not in data:
            raise SpeciesError(f"missing field '{key}'", f"/{key}")
        if not isinstance(data[key], list):
            raise SpeciesError("expected an array", f"/{key}")
    p = prime if prime is not None else data.get("prime", default_prime())
    if not isinstance(p, int):
        raise SpeciesError("prime must be an integer", "/prime")
    try:
        check_prime(p)
    except ValueError as exc:
        raise SpeciesError(str(exc), "/prime") from None
    degrees = {}
    for i, v in enumerate(data["vertices"]):
        ptr = f"/vertices/{i}"
        if not isinstance(v, dict) or "id" not in v:
            raise SpeciesError("vertex needs an 'id'", ptr)
        if not isinstance(v["id"], int):
            raise SpeciesError("vertex id must be an integer", ptr + "/id")
        d = v.get("ext_degree", 1)
        if d not in (1, 2, 3):
            raise SpeciesError("ext_degree must be 1, 2 or 3", ptr + "/ext_degree")
        if v["id"] in degrees:
            raise SpeciesError("duplicate vertex id", ptr + "/id")
        degrees[v["id"]] = d
    arrows = []
    for i, a in enumerate(data["arrows"]):
        ptr = f"/arrows/{i}"
        if not isinstance(a, dict):
            raise SpeciesError("expected an object", ptr)
        for key in ("id", "source", "target"):
            if key not in a:
                raise SpeciesError(f"missing field '{key}'", f"{ptr}/{key}")
        for key in ("source", "target"):
            if a[key] not in degrees:
                raise SpeciesError("unknown vertex", f"{ptr}/{key}")
        arrows.append((str(a["id"]), a["source"], a["target"]))
    try:
        q = ValuedQuiver.build(degrees, arrows)
    except SpeciesError as exc:
        raise SpeciesError(str(exc), exc.pointer or "/arrows") from None
    t = classify(q)
    return SpeciesSpec(q, p, str(data.get("name", "")), t)


def load_species(path: str, prime: Optional[int] = None) -> SpeciesSpec:
    with open(path) as fh:
        data = json.load(fh)
    return species_from_json(data, prime)


def species_to_json(s: SpeciesSpec) -> dict:
    return {
        "name": s.name,
        "prime": s.prime,
        "vertices": [{"id": v, "ext_degree": s.degree(v)} for v in s.vertices],
        "arrows": [{"id": a.id, "source": a.source, "target": a.target} for a in s.arrows],
    }


# ---------------------------------------------------------------------------
# double quiver and Casimir element


@dataclass(frozen=True)
class BarArrow:
    """An arrow of the double quiver.  ``base`` is the arrow of Q it comes from."""

    id: str
    source: int
    target: int
    base: str
    starred: bool

    @property
    def sgn(self) -> int:
        return -1 if self.starred else 1

    @property
    def star(self) -> int:
        return 1 if self.starred else 0


@dataclass(frozen=True)
class DoubleSpecies:
    species: SpeciesSpec
    arrows: Tuple[BarArrow, ...]

    def arrow(self, aid: str) -> BarArrow:
        return {a.id: a for a in self.arrows}[aid]

    def bimodule_degree(self, a: BarArrow) -> int:
        return max(self.species.degree(a.source), self.species.degree(a.target))

    def right_basis(self, a: BarArrow) -> List[Tuple[int, ...]]:
        """y_a^1, y_a^2, ...: a basis of M_a over its source ring, y_a^1 = 1."""
        return right_basis(self.species, a.source, self.bimodule_degree(a))

    def reverse(self, a: BarArrow) -> BarArrow:
        other = a.base if a.starred else a.id + "*"
        return self.arrow(other)


def right_basis(s: SpeciesSpec, v: int, mdeg: int) -> List[Tuple[int, ...]]:
    g = s.big
    if s.degree(v) == mdeg:
        return [g.one]
    return [g.power(i) for i in range(mdeg)]


def double(s: SpeciesSpec) -> DoubleSpecies:
    arrows = []
    for a in s.arrows:
        arrows.append(BarArrow(a.id, a.source, a.target, a.id, False))
        arrows.append(BarArrow(a.id + "*", a.target, a.source, a.id, True))
    return DoubleSpecies(s, tuple(arrows))


def trace_map(s: SpeciesSpec, v: int, mdeg: int, x) -> Tuple[int, ...]:
    """The D_v-linear projection M -> D_v used to identify the dual bimodule.

    Identity when M = D_v, coefficient of 1 when D_v = K.
    """
    g = s.big
    if s.degree(v) == mdeg:
        return x
    return g.embed(x[0])


def dual_basis(s: SpeciesSpec, v: int, mdeg: int, basis: Sequence) -> List[Tuple[int, ...]]:
    """l_i in M with pi_v(l_i x_j) = delta_ij, where x_j is a D_v-basis of M."""
    g = s.big
    if s.degree(v) == mdeg:
        return [g.inv(basis[0])]
    from .field_tower import Matrix, PrimeField, solve
    K = PrimeField(s.prime)
    # unknown l = sum_c l_c x^c; pi(l x_j) = coeff of 1 in l * x_j
    rows = []
    for xj in basis:
        row = []
        for c in range(mdeg):
            row.append(g.mul(g.power(c), xj)[0])
        rows.append(row)
    m = Matrix.from_rows(K, rows, mdeg)
    out = []
    for i in range(len(basis)):
        rhs = [1 if j == i else 0 for j in range(len(basis))]
        coeffs = solve(m, rhs)
        elem = g.zero
        for c, val in enumerate(coeffs):
            elem = g.add(elem, g.mul(g.embed(val), g.power(c)))
        out.append(elem)
    return out


@dataclass(frozen=True)
class CasimirTerm:
    """coeff * y_left * y_right, with y_right traversed first (composition order)."""

    coeff: int
    left: str
    left_elem: Tuple[int, ...]
    right: str
    right_elem: Tuple[int, ...]


@dataclass(frozen=True)
class CasimirElement:
    terms: Tuple[CasimirTerm, ...]

    def at_vertex(self, d: DoubleSpecies, v: int) -> Tuple[CasimirTerm, ...]:
        return tuple(t for t in self.terms if d.arrow(t.left).target == v)


def casimir_components(d: DoubleSpecies, a: BarArrow, basis=None) -> List[CasimirTerm]:
    """c_a = sum_i x_i (x) f_i for the arrow a of the double quiver.

    x_i runs over a basis of M_a over D_{s(a)} and f_i over the dual basis of
    the reversed arrow's bimodule.  ``basis`` overrides the default x_i.
    """
    s = d.species
    mdeg = d.bimodule_degree(a)
    xs = list(basis) if basis is not None else d.right_basis(a)
    ls = dual_basis(s, a.source, mdeg, xs)
    back = d.reverse(a)
    return [CasimirTerm(a.sgn, a.id, x, back.id, l) for x, l in zip(xs, ls)]


def casimir(d: DoubleSpecies, bases: Optional[Dict[str, Sequence]] = None) -> CasimirElement:
    """c = sum over the double quiver of sgn(a) c_a."""
    terms = []
    for a in d.arrows:
        b = None if bases is None else bases.get(a.id)
        terms.extend(casimir_components(d, a, b))
    return CasimirElement(tuple(terms))

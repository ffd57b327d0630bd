"""Segre products over the star grading.

For star-graded algebras A and B the Segre product is the sum over k of
A_{*k} (x) B_{*k}.  A basis element is a pair (x, y) of equal star degree
and carries the bidegree (l1 + l2 - k, k).  Vertices of the product are
tuples, so iterated products have vertices like (1, 2, 4).

Projectives P_v(a1, k) and P_w(a2, k) with the same star shift have Segre
product P_(v,w)(a1 + a2 - k, k); the product complexes below only combine
summands of matching star shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .homological import (
    ChainMap,
    Complex,
    FreeMap,
    FreeModule,
    Split,
    Summand,
    certify_almost_koszul,
    homology,
    mapping_cone,
)
from .tensor_algebra import BasisInfo, FiniteGradedAlgebra, GenArrow, GradedAlgebra, RelTerm


class DimensionMismatch(AssertionError):
    pass


class HomologyLeak(AssertionError):
    pass


class SignError(AssertionError):
    pass


def _vt(v) -> tuple:
    return v if isinstance(v, tuple) else (v,)


def vertex_name(v) -> str:
    return "".join(str(x) for x in _vt(v))


class SegreAlgebra(GradedAlgebra):
    """Lazy Segre product of two star-graded algebras."""

    def __init__(self, left: GradedAlgebra, right: GradedAlgebra):
        if left.p != right.p:
            raise ValueError("factors live over different primes")
        self.left = left
        self.right = right
        self.p = left.p
        self.name = f"{getattr(left, 'name', 'A')} # {getattr(right, 'name', 'B')}"
        by_star: Dict[int, List[int]] = {}
        for j, b in enumerate(right.info):
            by_star.setdefault(b.deg[1], []).append(j)
        self.pairs: List[Tuple[int, int]] = []
        infos = []
        for i, a in enumerate(left.info):
            for j in by_star.get(a.deg[1], []):
                b = right.info[j]
                k = a.deg[1]
                self.pairs.append((i, j))
                infos.append(BasisInfo(_vt(a.src) + _vt(b.src), _vt(a.tgt) + _vt(b.tgt),
                                       (a.deg[0] + b.deg[0] - k, k), f"{a.label}#{b.label}"))
        self._info = infos
        self.index = {pr: n for n, pr in enumerate(self.pairs)}
        self.vertices = tuple(_vt(v) + _vt(w) for v in left.vertices for w in right.vertices)
        self._split = {_vt(v) + _vt(w): (v, w) for v in left.vertices for w in right.vertices}
        self._mcache: Dict[Tuple[int, int], Dict[int, int]] = {}

    @property
    def info(self) -> List[BasisInfo]:
        return self._info

    def factors_of(self, v) -> tuple:
        return self._split[v]

    def vertex_basis(self, v) -> List[int]:
        a, b = self._split[v]
        return [self.index[(i, j)] for i in self.left.vertex_basis(a) for j in self.right.vertex_basis(b)]

    def mul(self, x: int, y: int) -> Dict[int, int]:
        key = (x, y)
        if key in self._mcache:
            return self._mcache[key]
        (i1, j1), (i2, j2) = self.pairs[x], self.pairs[y]
        out: Dict[int, int] = {}
        left = self.left.mul(i1, i2)
        if left:
            right = self.right.mul(j1, j2)
            for a, c in left.items():
                for b, d in right.items():
                    n = self.index.get((a, b))
                    if n is not None:
                        out[n] = (out.get(n, 0) + c * d) % self.p
        out = {k: v for k, v in out.items() if v}
        self._mcache[key] = out
        return out

    def tensor(self, x: Dict[int, int], y: Dict[int, int]) -> Dict[int, int]:
        """x (x) y restricted to matched star degrees."""
        out: Dict[int, int] = {}
        for a, c in x.items():
            for b, d in y.items():
                n = self.index.get((a, b))
                if n is not None:
                    out[n] = (out.get(n, 0) + c * d) % self.p
        return {k: v for k, v in out.items() if v}


def segre_algebra(a: GradedAlgebra, b: GradedAlgebra) -> SegreAlgebra:
    return SegreAlgebra(a, b)


def star_dims(a: GradedAlgebra) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for b in a.info:
        out[b.deg[1]] = out.get(b.deg[1], 0) + 1
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# modules and maps


def _sparse(vec: np.ndarray) -> Dict[int, int]:
    return {int(k): int(vec[k]) for k in np.nonzero(vec)[0]}


def segre_summand(s: SegreAlgebra, x: Summand, y: Summand) -> Summand:
    if x.shift[1] != y.shift[1]:
        raise ValueError(f"star shifts differ: {x.shift} vs {y.shift}")
    k = x.shift[1]
    return Summand(_vt(x.vertex) + _vt(y.vertex), (x.shift[0] + y.shift[0] - k, k))


def segre_module(s: SegreAlgebra, X: FreeModule, Y: FreeModule) -> Tuple[FreeModule, Dict[Tuple[int, int], int]]:
    """X #  Y as a free module, with the summand index of each pair."""
    summands, where = [], {}
    for a, x in enumerate(X.summands):
        for b, y in enumerate(Y.summands):
            where[(a, b)] = len(summands)
            summands.append(segre_summand(s, x, y))
    return FreeModule(s, summands), where


def _tensor_vectors(s: SegreAlgebra, X: FreeModule, xv: np.ndarray, Y: FreeModule, yv: np.ndarray,
                    T: FreeModule, where: Dict[Tuple[int, int], int]) -> np.ndarray:
    out = np.zeros(T.dim, dtype=np.int64)
    for a in range(len(X.summands)):
        xa = X.component(a, xv)
        if not xa.any():
            continue
        for b in range(len(Y.summands)):
            yb = Y.component(b, yv)
            if not yb.any():
                continue
            elem = s.tensor(_sparse(xa), _sparse(yb))
            t = where[(a, b)]
            for k, c in elem.items():
                out = out + T.embed(t, _unit(s, k) * c)
    return out % s.p


def _unit(s: GradedAlgebra, k: int) -> np.ndarray:
    v = np.zeros(s.dim, dtype=np.int64)
    v[k] = 1
    return v


def segre_map(s: SegreAlgebra, f: FreeMap, g: FreeMap) -> FreeMap:
    """f # g between Segre products of the sources and targets."""
    src, w_src = segre_module(s, f.source, g.source)
    tgt, w_tgt = segre_module(s, f.target, g.target)
    images = [None] * len(src.summands)
    for (a, b), n in w_src.items():
        images[n] = _tensor_vectors(s, f.target, f.images[a], g.target, g.images[b], tgt, w_tgt)
    return FreeMap(src, tgt, images)


def identity_map(X: FreeModule) -> FreeMap:
    return FreeMap(X, X, [X.generator(n) for n in range(len(X.summands))])


# ---------------------------------------------------------------------------
# total complexes


@dataclass
class TotLayout:
    complex: Complex
    where: Dict[int, Dict[Tuple[int, int, int, int], int]]   # n -> (i, j, a, b) -> summand


def tot_segre(s: SegreAlgebra, X: Complex, Y: Complex, check: bool = True) -> TotLayout:
    """Tot(X # Y) with d(x # y) = dx # y + (-1)^i x # dy."""
    p = s.p
    top = X.length + Y.length
    terms, where = [], {}
    for n in range(top + 1):
        summands, w = [], {}
        for i in range(max(0, n - Y.length), min(n, X.length) + 1):
            j = n - i
            for a, x in enumerate(X.terms[i].summands):
                for b, y in enumerate(Y.terms[j].summands):
                    w[(i, j, a, b)] = len(summands)
                    summands.append(segre_summand(s, x, y))
        terms.append(FreeModule(s, summands))
        where[n] = w
    diffs = {}
    for n in range(1, top + 1):
        src, tgt = terms[n], terms[n - 1]
        images = [None] * len(src.summands)
        for (i, j, a, b), idx in where[n].items():
            v = np.zeros(tgt.dim, dtype=np.int64)
            gx, gy = X.terms[i].generator(a), Y.terms[j].generator(b)
            if i >= 1 and i in X.d:
                dx = X.d[i].apply(gx)
                v = v + _place(s, X.terms[i - 1], dx, Y.terms[j], gy, tgt, where[n - 1], i - 1, j)
            if j >= 1 and j in Y.d:
                dy = Y.d[j].apply(gy)
                sign = -1 if i % 2 else 1
                v = v + sign * _place(s, X.terms[i], gx, Y.terms[j - 1], dy, tgt, where[n - 1], i, j - 1)
            images[idx] = v % p
        diffs[n] = FreeMap(src, tgt, images)
    c = Complex(terms, diffs, name=f"Tot({X.name}#{Y.name})")
    if check and not c.check():
        raise SignError("d o d != 0 in the total complex")
    return TotLayout(c, where)


def _place(s, XM: FreeModule, xv, YM: FreeModule, yv, T: FreeModule, where, i, j) -> np.ndarray:
    sub = {(a, b): where[(i, j, a, b)] for a in range(len(XM.summands)) for b in range(len(YM.summands))}
    return _tensor_vectors(s, XM, xv, YM, yv, T, sub)


def tot_map(s: SegreAlgebra, f: ChainMap, g: ChainMap, src: TotLayout, tgt: TotLayout) -> ChainMap:
    """Tot(f # g): Tot(X # Y) -> Tot(X' # Y')."""
    maps = {}
    for n, w in src.where.items():
        T = tgt.complex.terms[n] if n < len(tgt.complex.terms) else None
        S = src.complex.terms[n]
        images = [None] * len(S.summands)
        for (i, j, a, b), idx in w.items():
            v = np.zeros(T.dim if T else 0, dtype=np.int64)
            if T is not None and i in f.maps and j in g.maps:
                fx = f.maps[i].apply(f.source.terms[i].generator(a))
                gy = g.maps[j].apply(g.source.terms[j].generator(b))
                v = _place(s, f.target.terms[i], fx, g.target.terms[j], gy, T, tgt.where[n], i, j)
            images[idx] = v
        if T is not None:
            maps[n] = FreeMap(S, T, images, check=False)
    return ChainMap(src.complex, tgt.complex, maps)


def kunneth_dims(s: SegreAlgebra, X: Complex, Y: Complex) -> Dict[int, Dict]:
    """Right-hand side of the Kunneth formula, block by block."""
    hx, hy = homology(X), homology(Y)
    out: Dict[int, Dict] = {}
    for i, bx in hx.items():
        for j, by in hy.items():
            tgt = out.setdefault(i + j, {})
            for ((dx, kx), vx), nx in bx.items():
                for ((dy, ky), vy), ny in by.items():
                    if kx != ky:
                        continue
                    key = ((dx + dy - kx, kx), _vt(vx) + _vt(vy))
                    tgt[key] = tgt.get(key, 0) + nx * ny
    for n in range(X.length + Y.length + 1):
        out.setdefault(n, {})
    return out


# ---------------------------------------------------------------------------
# product complexes


@dataclass
class ProductSplit:
    """Q, R and phi for a product, so products can be iterated."""

    algebra: GradedAlgebra
    split: Split
    cone: Complex


def product_split(s: SegreAlgebra, a: Split, b: Split, check: bool = True) -> ProductSplit:
    tq = tot_segre(s, a.Q, b.Q, check=check)
    tr = tot_segre(s, a.R, b.R, check=check)
    phi = tot_map(s, a.phi, b.phi, tq, tr)
    tq.complex.name, tr.complex.name = "Q", "R"
    cone = mapping_cone(phi, check=check)
    return ProductSplit(s, Split(tq.complex, tr.complex, phi), cone)


def product_koszul_complex(pi1: GradedAlgebra, split1: Split, pi2: GradedAlgebra, split2: Split,
                           simple, check: bool = True) -> ProductSplit:
    """C(Tot(phi1 # phi2)); with ``check`` the homology is verified to sit at the ends."""
    s = SegreAlgebra(pi1, pi2)
    ps = product_split(s, split1, split2, check=check)
    if check:
        verify_product_homology(ps, simple)
    return ps


def verify_product_homology(ps: ProductSplit, simple) -> Dict[int, Dict]:
    c = ps.cone
    h = homology(c)
    top = c.length
    for i in range(1, top):
        if h[i]:
            raise HomologyLeak(f"H_{i} is nonzero: {h[i]}")
    v = _vt(simple)
    want = {((0, 0), v): c.alg.vertex_dim(v)}
    if h[0] != want:
        raise HomologyLeak(f"H_0 is {h[0]}, expected the simple at {v}")
    stars = {key[0][1] for key in h[top]}
    c.meta["top_stars"] = sorted(stars)
    c.meta["homology"] = h
    return h


def product_from_splits(factors: Sequence[Tuple[GradedAlgebra, Split]], check: bool = False) -> ProductSplit:
    """Left-associated iterated product ((S1 # S2) # S3) ..."""
    alg, split = factors[0]
    ps = None
    for alg2, split2 in factors[1:]:
        s = SegreAlgebra(alg, alg2)
        ps = product_split(s, split, split2, check=check)
        alg, split = s, ps.split
    return ps


# ---------------------------------------------------------------------------
# (p, q) of products


@dataclass
class ProductPQ:
    measured: Tuple[int, int]
    factor_pq: Tuple[Tuple[int, int], Tuple[int, int]]
    l: int
    plus_one: int    # p1 + p2 - l + 1
    plus_two: int    # p1 + p2 - l + 2

    @property
    def matches(self) -> List[str]:
        out = []
        if self.measured[0] == self.plus_one:
            out.append("p1+p2-l+1")
        if self.measured[0] == self.plus_two:
            out.append("p1+p2-l+2")
        return out


def product_pq(pi1: GradedAlgebra, pi2: GradedAlgebra, l: int) -> ProductPQ:
    c1, c2 = certify_almost_koszul(pi1), certify_almost_koszul(pi2)
    cert = certify_almost_koszul(SegreAlgebra(pi1, pi2))
    p1, p2 = c1.p, c2.p
    return ProductPQ(cert.pair, (c1.pair, c2.pair), l, p1 + p2 - l + 1, p1 + p2 - l + 2)


# ---------------------------------------------------------------------------
# presentation of the product


@dataclass
class TensorSpeciesPresentation:
    vertices: Dict[tuple, int]
    arrows: List[GenArrow]
    relations: List[List[RelTerm]]
    big: object

    def algebra(self, cap: int = 64) -> FiniteGradedAlgebra:
        return FiniteGradedAlgebra(self.big, self.vertices, self.arrows, self.relations, cap,
                                   name="presented product")

    def solid_arrows(self) -> List[GenArrow]:
        return [a for a in self.arrows if a.star == 0]

    def dotted_arrows(self) -> List[GenArrow]:
        return [a for a in self.arrows if a.star == 1]


def tensor_species_presentation(pi1: FiniteGradedAlgebra, pi2: FiniteGradedAlgebra) -> TensorSpeciesPresentation:
    """Generators in star degrees 0 and 1 with the transported and commutator relations.

    Both factors are presentations of preprojective type: star-0 arrows
    carry no relations and the star-1 relations are the Casimir elements.
    Vertex rings must stay fields, so at most one factor may use a proper
    extension field.
    """
    if pi1.big.k > 1 and pi2.big.k > 1:
        raise ValueError("both factors use extension fields; the vertex rings would not be fields")
    big = pi1.big if pi1.big.k >= pi2.big.k else pi2.big
    first_big = pi1.big.k >= pi2.big.k

    def elem(y1, y2):
        # one of the two is a base-field scalar
        if first_big:
            return big.mul(tuple(y1), big.embed(y2[0]))
        return big.mul(big.embed(y1[0]), tuple(y2))

    one1, one2 = pi1.big.one, pi2.big.one
    verts = {_vt(v) + _vt(w): pi1.degrees[v] * pi2.degrees[w] for v in pi1.vertices for w in pi2.vertices}
    arrows: List[GenArrow] = []
    for a in pi1.arrows:
        if a.star == 0:
            for w in pi2.vertices:
                arrows.append(GenArrow(f"{a.id}|e{w}", _vt(a.source) + _vt(w), _vt(a.target) + _vt(w),
                                       a.mdeg * pi2.degrees[w], 0))
    for v in pi1.vertices:
        for b in pi2.arrows:
            if b.star == 0:
                arrows.append(GenArrow(f"e{v}|{b.id}", _vt(v) + _vt(b.source), _vt(v) + _vt(b.target),
                                       pi1.degrees[v] * b.mdeg, 0))
    for a in pi1.arrows:
        for b in pi2.arrows:
            if a.star == 1 and b.star == 1:
                arrows.append(GenArrow(f"{a.id}|{b.id}", _vt(a.source) + _vt(b.source),
                                       _vt(a.target) + _vt(b.target), a.mdeg * b.mdeg, 1))
    rels: List[List[RelTerm]] = []
    a1 = {a.id: a for a in pi1.arrows}
    a2 = {b.id: b for b in pi2.arrows}

    def basis(big_f, mdeg):
        return [big_f.power(i) for i in range(mdeg)]

    # commutators of the star-0 arrows of the two factors
    for a in pi1.arrows:
        if a.star:
            continue
        for b in pi2.arrows:
            if b.star:
                continue
            for x in basis(pi1.big, a.mdeg):
                for y in basis(pi2.big, b.mdeg):
                    rels.append([
                        RelTerm(1, f"{a.id}|e{b.target}", elem(x, one2), f"e{a.source}|{b.id}", elem(one1, y)),
                        RelTerm(-1, f"e{a.target}|{b.id}", elem(one1, y), f"{a.id}|e{b.source}", elem(x, one2)),
                    ])
    # Casimir of the first factor against starred arrows of the second
    for rel in pi1.relations:
        for b in pi2.arrows:
            if not b.star:
                continue
            for y in basis(pi2.big, b.mdeg):
                terms = []
                for t in rel:
                    left, right = a1[t.left], a1[t.right]
                    if right.star:
                        terms.append(RelTerm(t.coeff, f"{left.id}|e{b.target}", elem(t.left_elem, one2),
                                             f"{right.id}|{b.id}", elem(t.right_elem, y)))
                    else:
                        terms.append(RelTerm(t.coeff, f"{left.id}|{b.id}", elem(t.left_elem, y),
                                             f"{right.id}|e{b.source}", elem(t.right_elem, one2)))
                rels.append(terms)
    for rel in pi2.relations:
        for a in pi1.arrows:
            if not a.star:
                continue
            for x in basis(pi1.big, a.mdeg):
                terms = []
                for t in rel:
                    left, right = a2[t.left], a2[t.right]
                    if right.star:
                        terms.append(RelTerm(t.coeff, f"e{a.target}|{left.id}", elem(one1, t.left_elem),
                                             f"{a.id}|{right.id}", elem(x, t.right_elem)))
                    else:
                        terms.append(RelTerm(t.coeff, f"{a.id}|{left.id}", elem(x, t.left_elem),
                                             f"e{a.source}|{right.id}", elem(one1, t.right_elem)))
                rels.append(terms)
    return TensorSpeciesPresentation(verts, arrows, rels, big)


def compare_with_segre(pres: TensorSpeciesPresentation, pi1: GradedAlgebra, pi2: GradedAlgebra) -> Dict:
    """Hilbert tables of the presented quotient and of the Segre product; raise on mismatch."""
    quot = pres.algebra().hilbert()
    seg = SegreAlgebra(pi1, pi2).hilbert()
    if quot != seg:
        raise DimensionMismatch(f"presented {quot} != Segre {seg}")
    return seg

"""Finite-dimensional bigraded algebras: T(S), Pi(S) and a common interface.

Construction is degree by degree.  The degree-n component is presented as
T_1 (x)_{T_0} A_{n-1}, spanned by pairs (arrow, right-basis index, basis
element of A_{n-1}), and then cut down by the quadratic relations placed in
the leftmost position.  Because the relations are homogeneous and the pair
ordering is fixed, RREF gives canonical coset representatives: the surviving
pairs form the basis.  Every basis element therefore has a factorization
y * m with y a degree-1 generator and m of lower degree, and products are
evaluated through the stored left-action matrices.

Multiplication is composition order: x * y means "y first, then x", and
x * y is nonzero only when source(x) == target(y).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .field_tower import ExtensionField, Reducer, kernel_mod, rank_mod
from .species import (
    CasimirElement,
    DoubleSpecies,
    SpeciesSpec,
    casimir,
    double,
)

SAFETY_CAP = 64


class TruncationHit(RuntimeError):
    """A graded component at the degree cap is still nonzero."""


@dataclass(frozen=True)
class BasisInfo:
    src: object
    tgt: object
    deg: Tuple[int, int]  # (grading used for Koszul questions, star degree)
    label: str


class GradedAlgebra:
    """Interface shared by presented algebras and Segre products.

    Subclasses provide ``p``, ``info`` (list of BasisInfo), ``vertices``,
    ``vertex_basis(v)`` (degree-0 basis at v, identity first) and ``mul``.
    """

    p: int
    info: List[BasisInfo]
    vertices: Tuple

    @property
    def dim(self) -> int:
        return len(self.info)

    def mul(self, i: int, j: int) -> Dict[int, int]:
        raise NotImplementedError

    def vertex_basis(self, v) -> List[int]:
        raise NotImplementedError

    def unit(self, v) -> int:
        return self.vertex_basis(v)[0]

    def vertex_dim(self, v) -> int:
        return len(self.vertex_basis(v))

    @property
    def top_degree(self) -> int:
        return max(b.deg[0] for b in self.info)

    def hilbert(self) -> Dict[Tuple[int, int], int]:
        return hilbert(self)

    def degree_indices(self, j: int) -> List[int]:
        return [i for i, b in enumerate(self.info) if b.deg[0] == j]

    def generators(self) -> List[int]:
        return self.degree_indices(1)

    def mul_vec(self, x: Dict[int, int], y: Dict[int, int]) -> Dict[int, int]:
        out: Dict[int, int] = {}
        p = self.p
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.mul(i, j).items():
                    out[k] = (out.get(k, 0) + a * b * c) % p
        return {k: v for k, v in out.items() if v}

    def check_associative(self, indices: Optional[Iterable[int]] = None) -> bool:
        idx = list(range(self.dim)) if indices is None else list(indices)
        for a in idx:
            for b in idx:
                ab = self.mul(a, b)
                if not ab and self.info[a].src != self.info[b].tgt:
                    continue
                for c in idx:
                    left = self.mul_vec(ab, {c: 1})
                    right = self.mul_vec({a: 1}, self.mul(b, c))
                    if left != right:
                        return False
        return True


def hilbert(a: GradedAlgebra) -> Dict[Tuple[int, int], int]:
    table: Dict[Tuple[int, int], int] = {}
    for b in a.info:
        table[b.deg] = table.get(b.deg, 0) + 1
    return dict(sorted(table.items()))



def algebra_dump(a: GradedAlgebra) -> dict:
    """Basis, nonzero structure constants and Hilbert table as plain JSON data."""
    basis = [{"id": i, "src": str(b.src), "tgt": str(b.tgt), "deg": list(b.deg)} for i, b in enumerate(a.info)]
    products = []
    for i in range(a.dim):
        for j in range(a.dim):
            prod = a.mul(i, j)
            if prod:
                products.append([i, j, sorted([k, c] for k, c in prod.items())])
    hil = {f"{j},{k}": n for (j, k), n in sorted(a.hilbert().items())}
    return {"basis": basis, "products": products, "hilbert": hil}

# ---------------------------------------------------------------------------
# presented algebras


@dataclass(frozen=True)
class GenArrow:
    id: str
    source: object
    target: object
    mdeg: int
    star: int = 0


@dataclass(frozen=True)
class RelTerm:
    """coeff * y_left * y_right with field elements in the big field."""

    coeff: int
    left: str
    left_elem: Tuple[int, ...]
    right: str
    right_elem: Tuple[int, ...]


class FiniteGradedAlgebra(GradedAlgebra):
    """T(D, M)/(R) for a field species with quadratic relations R.

    ``degrees`` maps each vertex to dim_K D_v; all fields sit inside
    ``big`` = GF(p^k).  The bidegree of a basis element is
    (path length, star degree).
    """

    def __init__(self, big: ExtensionField, degrees: Dict, arrows: Sequence[GenArrow],
                 relations: Sequence[Sequence[RelTerm]] = (), max_degree: int = SAFETY_CAP,
                 name: str = "", strict: bool = True):
        self.big = big
        self.p = big.p
        self.name = name
        self.vertices = tuple(degrees)
        self.degrees = dict(degrees)
        self.arrows = tuple(arrows)
        self._arrow = {a.id: a for a in self.arrows}
        self.relations = [list(r) for r in relations]
        self.max_degree = max_degree
        self.strict = strict
        self._rbasis = {a.id: self._right_basis(a) for a in self.arrows}
        self._build()
        self._lcache: Dict[Tuple[int, int], np.ndarray] = {}
        self._mcache: Dict[Tuple[int, int], Dict[int, int]] = {}

    # -- field helpers -----------------------------------------------------

    def _right_basis(self, a: GenArrow) -> List[Tuple[int, ...]]:
        g = self.big
        if self.degrees[a.source] == a.mdeg:
            return [g.one]
        return [g.power(i) for i in range(a.mdeg)]

    def _coords(self, y, n: int) -> List[int]:
        return [int(c) for c in y[:n]]

    # -- construction ------------------------------------------------------

    def _build(self) -> None:
        p = self.p
        g = self.big
        self.blocks: List[List[BasisInfo]] = []
        self.factor: List[List[Tuple]] = []
        self.F: List[Dict[Tuple, np.ndarray]] = []
        self.A: List[Dict[Tuple, np.ndarray]] = [{}]

        info0, fac0 = [], []
        for v in self.vertices:
            for a in range(self.degrees[v]):
                info0.append(BasisInfo(v, v, (0, 0), f"e{v}" if a == 0 else f"e{v}.x{a}"))
                fac0.append((v, a))
        self.blocks.append(info0)
        self.factor.append(fac0)
        F0 = {}
        for v in self.vertices:
            dv = self.degrees[v]
            for a in range(dv):
                m = np.zeros((len(info0), len(info0)), dtype=np.int64)
                for col, (w, b) in enumerate(fac0):
                    if w != v:
                        continue
                    prod = g.mul(g.power(a), g.power(b))
                    for c in range(dv):
                        row = fac0.index((v, c))
                        m[row, col] = prod[c]
                F0[(v, a)] = m % p
        self.F.append(F0)

        n = 1
        while True:
            if n > self.max_degree:
                if self.blocks[-1] and self.strict:
                    raise TruncationHit(f"component of degree {n - 1} is nonzero")
                break
            added = self._build_degree(n)
            if not added:
                # keep empty block so degree lookups stay valid
                break
            n += 1

    def _field_action(self, n: int, v, y) -> np.ndarray:
        """Matrix of left multiplication by y in D_v on A_n."""
        dim = len(self.blocks[n])
        out = np.zeros((dim, dim), dtype=np.int64)
        for a, c in enumerate(self._coords(y, self.degrees[v])):
            if c:
                out = out + c * self.F[n][(v, a)]
        return out % self.p

    def _arrow_action(self, n: int, aid: str, y) -> np.ndarray:
        """Matrix of left multiplication by y in M_a, from A_{n-1} to A_n."""
        a = self._arrow[aid]
        out = np.zeros((len(self.blocks[n]), len(self.blocks[n - 1])), dtype=np.int64)
        for idx, c in enumerate(self._coords(y, a.mdeg)):
            if c:
                out = out + c * self.A[n][(aid, idx)]
        return out % self.p

    def _pair_layout(self, n: int):
        prev = self.blocks[n - 1]
        pairs = []
        slots = {}
        for a in self.arrows:
            ms = [m for m, b in enumerate(prev) if b.tgt == a.source]
            for i in range(len(self._rbasis[a.id])):
                slots[(a.id, i)] = (np.arange(len(pairs), len(pairs) + len(ms)), np.array(ms, dtype=np.int64))
                pairs.extend((a.id, i, m) for m in ms)
        return pairs, slots

    def _pair_matrix(self, n: int, slots, npairs: int, aid: str, y, vecs: np.ndarray) -> np.ndarray:
        """y (x) vecs in pair coordinates; vecs has columns in A_{n-1}."""
        a = self._arrow[aid]
        out = np.zeros((npairs, vecs.shape[1]), dtype=np.int64)
        if not len(slots.get((aid, 0), ((), ()))[0]):
            return out
        if self.degrees[a.source] == a.mdeg:
            w = self._field_action(n - 1, a.source, y) @ vecs % self.p
            pos, ms = slots[(aid, 0)]
            out[pos] = w[ms]
        else:
            proj = self.F[n - 1][(a.source, 0)] @ vecs % self.p
            for i, c in enumerate(self._coords(y, a.mdeg)):
                if c:
                    pos, ms = slots[(aid, i)]
                    out[pos] = (out[pos] + c * proj[ms]) % self.p
        return out

    def _build_degree(self, n: int) -> bool:
        p = self.p
        g = self.big
        prev = self.blocks[n - 1]
        pairs, slots = self._pair_layout(n)
        npairs = len(pairs)
        rows = []
        if n >= 2 and self.relations and len(self.blocks[n - 2]):
            eye2 = np.eye(len(self.blocks[n - 2]), dtype=np.int64)
            for rel in self.relations:
                tgt = self._arrow[rel[0].left].target
                for a in range(self.degrees[tgt]):
                    d = g.power(a)
                    total = np.zeros((npairs, eye2.shape[1]), dtype=np.int64)
                    for t in rel:
                        inner = self._arrow_action(n - 1, t.right, t.right_elem) @ eye2 % p
                        ly = g.mul(d, t.left_elem)
                        total += t.coeff * self._pair_matrix(n, slots, npairs, t.left, ly, inner)
                    rows.append(total.T % p)
        relmat = np.vstack(rows) if rows else np.zeros((0, npairs), dtype=np.int64)
        red = Reducer(relmat, npairs, p)
        free = red.free
        if not free:
            self.blocks.append([])
            self.factor.append([])
            self.A.append({})
            self.F.append({})
            return False
        infos, facs = [], []
        for c in free:
            aid, i, m = pairs[c]
            a = self._arrow[aid]
            mb = prev[m]
            label = f"{aid}" + (f"^{i}" if len(self._rbasis[aid]) > 1 else "") + "." + mb.label
            infos.append(BasisInfo(mb.src, a.target, (n, mb.deg[1] + a.star), label))
            facs.append((aid, i, m))
        self.blocks.append(infos)
        self.factor.append(facs)
        eye1 = np.eye(len(prev), dtype=np.int64)
        An = {}
        for a in self.arrows:
            for idx in range(a.mdeg):
                pm = self._pair_matrix(n, slots, npairs, a.id, g.power(idx), eye1)
                An[(a.id, idx)] = red.quotient_coords(pm.T).T % p
        self.A.append(An)
        Fn = {}
        dim = len(free)
        for v in self.vertices:
            for av in range(self.degrees[v]):
                m = np.zeros((dim, dim), dtype=np.int64)
                for col, (aid, i, mi) in enumerate(facs):
                    arr = self._arrow[aid]
                    if arr.target != v:
                        continue
                    y = g.mul(g.power(av), self._rbasis[aid][i])
                    unit = np.zeros((len(prev), 1), dtype=np.int64)
                    unit[mi, 0] = 1
                    pm = self._pair_matrix(n, slots, npairs, aid, y, unit)
                    m[:, col] = red.quotient_coords(pm[:, 0])
                Fn[(v, av)] = m % p
        self.F.append(Fn)
        return True

    # -- global indexing ---------------------------------------------------

    @property
    def info(self) -> List[BasisInfo]:
        return [b for blk in self.blocks for b in blk]

    @property
    def offsets(self) -> List[int]:
        out, acc = [], 0
        for blk in self.blocks:
            out.append(acc)
            acc += len(blk)
        return out

    def locate(self, i: int) -> Tuple[int, int]:
        for n, off in enumerate(self.offsets):
            if i < off + len(self.blocks[n]):
                return n, i - off
        raise IndexError(i)

    def vertex_basis(self, v) -> List[int]:
        return [i for i, (w, a) in enumerate(self.factor[0]) if w == v]

    def degree_block(self, n: int) -> List[BasisInfo]:
        return self.blocks[n] if n < len(self.blocks) else []

    # -- multiplication ----------------------------------------------------

    def left_block(self, i: int, n2: int) -> np.ndarray:
        """Matrix of left multiplication by basis element i from A_{n2} to A_{n1+n2}."""
        key = (i, n2)
        if key in self._lcache:
            return self._lcache[key]
        n1, loc = self.locate(i)
        n = n1 + n2
        d2 = len(self.degree_block(n2))
        dn = len(self.degree_block(n))
        if dn == 0 or d2 == 0:
            out = np.zeros((dn, d2), dtype=np.int64)
        elif n1 == 0:
            v, a = self.factor[0][loc]
            out = self.F[n2][(v, a)]
        else:
            aid, ri, m = self.factor[n1][loc]
            inner = self.left_block(self.offsets[n1 - 1] + m, n2)
            out = self._arrow_action(n, aid, self._rbasis[aid][ri]) @ inner % self.p
        self._lcache[key] = out
        return out

    def mul(self, i: int, j: int) -> Dict[int, int]:
        key = (i, j)
        if key in self._mcache:
            return self._mcache[key]
        n2, loc = self.locate(j)
        n1, _ = self.locate(i)
        res: Dict[int, int] = {}
        if self.info[i].src == self.info[j].tgt and n1 + n2 < len(self.blocks) and self.blocks[n1 + n2]:
            col = self.left_block(i, n2)[:, loc]
            off = self.offsets[n1 + n2]
            res = {off + int(k): int(col[k]) for k in np.nonzero(col)[0]}
        self._mcache[key] = res
        return res

    def arrow_element(self, aid: str, y) -> Dict[int, int]:
        """The element y in M_a as a vector of A_1."""
        a = self._arrow[aid]
        col = self._arrow_action(1, aid, y)[:, self.vertex_basis(a.source)[0]]
        off = self.offsets[1]
        return {off + int(k): int(col[k]) for k in np.nonzero(col)[0]}

    def relation_value(self, rel: Sequence[RelTerm]) -> Dict[int, int]:
        total: Dict[int, int] = {}
        for t in rel:
            prod = self.mul_vec(self.arrow_element(t.left, t.left_elem), self.arrow_element(t.right, t.right_elem))
            for k, v in prod.items():
                total[k] = (total.get(k, 0) + t.coeff * v) % self.p
        return {k: v for k, v in total.items() if v}


# ---------------------------------------------------------------------------
# species algebras


def _gen_arrows_single(s: SpeciesSpec) -> List[GenArrow]:
    return [GenArrow(a.id, a.source, a.target, s.bimodule_degree(a), 0) for a in s.arrows]


def _gen_arrows_double(d: DoubleSpecies) -> List[GenArrow]:
    return [GenArrow(a.id, a.source, a.target, d.bimodule_degree(a), a.star) for a in d.arrows]


def tensor_algebra(s: SpeciesSpec, max_degree: int = SAFETY_CAP) -> FiniteGradedAlgebra:
    """T(S) truncated at ``max_degree``; raises TruncationHit if it does not terminate."""
    degrees = {v: s.degree(v) for v in s.vertices}
    return FiniteGradedAlgebra(s.big, degrees, _gen_arrows_single(s), (), max_degree, name=f"T({s.name})")


def double_tensor_algebra(s: SpeciesSpec, max_degree: int) -> FiniteGradedAlgebra:
    """T of the double species up to ``max_degree``, used to compare Casimir elements."""
    d = double(s)
    degrees = {v: s.degree(v) for v in s.vertices}
    return FiniteGradedAlgebra(s.big, degrees, _gen_arrows_double(d), (), max_degree,
                               name=f"T({s.name} double)", strict=False)


def casimir_relations(d: DoubleSpecies, c: Optional[CasimirElement] = None) -> List[List[RelTerm]]:
    """e_v c e_v for each vertex v, as relation lists."""
    c = casimir(d) if c is None else c
    out = []
    for v in d.species.vertices:
        terms = [RelTerm(t.coeff, t.left, t.left_elem, t.right, t.right_elem) for t in c.at_vertex(d, v)]
        if terms:
            out.append(terms)
    return out


def casimir_vector(alg: FiniteGradedAlgebra, c: CasimirElement) -> Dict[int, int]:
    terms = [RelTerm(t.coeff, t.left, t.left_elem, t.right, t.right_elem) for t in c.terms]
    return alg.relation_value(terms)


def preprojective(s: SpeciesSpec, cap: int = SAFETY_CAP) -> FiniteGradedAlgebra:
    """Pi(S) = T(double S)/<c>, bigraded by (path length, star degree)."""
    d = double(s)
    degrees = {v: s.degree(v) for v in s.vertices}
    return FiniteGradedAlgebra(s.big, degrees, _gen_arrows_double(d), casimir_relations(d), cap,
                               name=f"Pi({s.name})")


# ---------------------------------------------------------------------------
# socle


@dataclass(frozen=True)
class SocleSummand:
    vertex: object          # i, for the projective A e_i
    degree: int
    target: object          # the vertex where the socle sits
    k_dim: int
    d_dim: int


def socle(a: FiniteGradedAlgebra) -> List[SocleSummand]:
    """Left socle of each A e_i: elements killed by every degree-1 generator."""
    p = a.p
    gens = a.generators()
    out = []
    for v in a.vertices:
        for n in range(len(a.blocks)):
            blk = a.blocks[n]
            cols = [i for i, b in enumerate(blk) if b.src == v]
            if not cols:
                continue
            mats = []
            for gi in gens:
                m = a.left_block(gi, n)
                if m.size:
                    mats.append(m[:, cols])
            if mats:
                big = np.vstack(mats)
                ker = kernel_mod(big, p)
            else:
                ker = np.eye(len(cols), dtype=np.int64)
            if len(ker) == 0:
                continue
            by_target: Dict[object, int] = {}
            # split the kernel by target vertex (the kernel is a sum of e_t parts)
            for t in a.vertices:
                sub = [k for k, c in enumerate(cols) if blk[c].tgt == t]
                if not sub:
                    continue
                part = ker[:, sub]
                r = rank_mod(part, p) if part.size else 0
                if r:
                    by_target[t] = r
            for t, r in by_target.items():
                out.append(SocleSummand(v, n, t, r, r // a.degrees[t]))
    return out

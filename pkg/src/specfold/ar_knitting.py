"""Auslander-Reiten quivers of Dynkin species, computed on the Grothendieck group.

Classes are integer vectors in the basis of simple modules [D_i] and
listed in the order of ``species.vertices``.  The Coxeter transformation
satisfies c[P_i] = -[I_i] and c[M] = [tau M] for M non-projective, so
tau^{-1} orbits are obtained by applying c^{-1} starting at the projectives.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .species import Cyclic, NotDynkin, SpeciesSpec, classify


class TableMismatch(AssertionError):
    """A computed Nakayama permutation disagrees with the closed-form table."""


K0Vector = Tuple[int, ...]


def _index(s: SpeciesSpec) -> Dict[int, int]:
    return {v: i for i, v in enumerate(s.vertices)}


def _mult(s: SpeciesSpec, a, over: int) -> int:
    """dim of M_a over the field at vertex ``over``."""
    return s.bimodule_degree(a) // s.degree(over)


def _topological(s: SpeciesSpec, reverse: bool) -> List[int]:
    q = s.quiver
    if not q.is_acyclic():
        raise Cyclic("quiver has an oriented cycle")
    succ = {v: [] for v in q.vertices}
    indeg = {v: 0 for v in q.vertices}
    for a in q.arrows:
        u, w = (a.target, a.source) if reverse else (a.source, a.target)
        succ[u].append(w)
        indeg[w] += 1
    order, ready = [], deque(sorted(v for v in q.vertices if indeg[v] == 0))
    while ready:
        v = ready.popleft()
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return order


def projective_classes(s: SpeciesSpec) -> List[K0Vector]:
    """[P_i] = [D_i] + sum over arrows i -> t of dim_{D_t}(M) [P_t]."""
    idx = _index(s)
    n = len(idx)
    cls: Dict[int, np.ndarray] = {}
    for v in reversed(_topological(s, reverse=False)):
        vec = np.zeros(n, dtype=np.int64)
        vec[idx[v]] = 1
        for a in s.arrows:
            if a.source == v:
                vec += _mult(s, a, a.target) * cls[a.target]
        cls[v] = vec
    return [tuple(int(x) for x in cls[v]) for v in s.vertices]


def injective_classes(s: SpeciesSpec) -> List[K0Vector]:
    """[I_i] = [D_i] + sum over arrows s -> i of dim_{D_s}(M) [I_s]."""
    idx = _index(s)
    n = len(idx)
    cls: Dict[int, np.ndarray] = {}
    for v in reversed(_topological(s, reverse=True)):
        vec = np.zeros(n, dtype=np.int64)
        vec[idx[v]] = 1
        for a in s.arrows:
            if a.target == v:
                vec += _mult(s, a, a.source) * cls[a.source]
        cls[v] = vec
    return [tuple(int(x) for x in cls[v]) for v in s.vertices]


def _int_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of a unimodular integer matrix, exactly."""
    n = m.shape[0]
    a = [[Fraction(int(x)) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    out = np.array([[int(x) for x in row[n:]] for row in a], dtype=np.int64)
    if any(x.denominator != 1 for row in a for x in row[n:]):
        raise ValueError("matrix is not unimodular")
    return out


def coxeter(s: SpeciesSpec) -> np.ndarray:
    """Integer matrix c with c[P_i] = -[I_i] (acting on column vectors)."""
    P = np.array(projective_classes(s), dtype=np.int64).T
    I = np.array(injective_classes(s), dtype=np.int64).T
    return -I @ _int_inverse(P)


def coxeter_inverse(s: SpeciesSpec) -> np.ndarray:
    return _int_inverse(coxeter(s))


# ---------------------------------------------------------------------------
# knitting


@dataclass(frozen=True)
class ARVertex:
    i: int          # projective index: the orbit starts at P_i
    t: int          # this vertex is tau^{-t} P_i
    dim: K0Vector
    delta: int


@dataclass(frozen=True)
class ARArrow:
    source: Tuple[int, int]
    target: Tuple[int, int]
    d: int          # dim_K of irreducible maps


@dataclass
class ARQuiver:
    species: SpeciesSpec
    vertices: Dict[Tuple[int, int], ARVertex]
    arrows: List[ARArrow]
    orbit_length: Dict[int, int]
    injective_at: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def tau(self, key: Tuple[int, int]) -> Optional[Tuple[int, int]]:
        i, t = key
        return (i, t - 1) if t > 0 else None

    def tau_inverse(self, key: Tuple[int, int]) -> Optional[Tuple[int, int]]:
        i, t = key
        return (i, t + 1) if t + 1 < self.orbit_length[i] else None

    def is_projective(self, key) -> bool:
        return key[1] == 0

    def is_injective(self, key) -> bool:
        return key in self.injective_at.values()

    def successors(self, key) -> List[ARArrow]:
        return [a for a in self.arrows if a.source == key]

    def predecessors(self, key) -> List[ARArrow]:
        return [a for a in self.arrows if a.target == key]

    def valuation(self, a: ARArrow) -> Tuple[int, int]:
        dx = self.vertices[a.source].delta
        dy = self.vertices[a.target].delta
        return a.d // dx, a.d // dy

    def to_dot(self) -> str:
        lines = ["digraph AR {", "  rankdir=LR;"]
        for key in sorted(self.vertices):
            v = self.vertices[key]
            name = f"P_{v.i}" if v.t == 0 else f"τ^-{v.t}P_{v.i}"
            dims = ",".join(str(x) for x in v.dim)
            lines.append(f'  "{key[0]}_{key[1]}" [label="{name} [{dims}]"];')
        for a in sorted(self.arrows, key=lambda a: (a.source, a.target)):
            lines.append(f'  "{a.source[0]}_{a.source[1]}" -> "{a.target[0]}_{a.target[1]}" [label="{a.d}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _positive(v: np.ndarray) -> bool:
    return bool((v >= 0).all() and v.any())


def _negative(v: np.ndarray) -> bool:
    return bool((v <= 0).all() and v.any())


def knit(s: SpeciesSpec) -> ARQuiver:
    """Advance each tau-orbit by c^{-1} until the class would turn negative."""
    cinv = coxeter_inverse(s)
    idx = _index(s)
    inj = {tuple(v): s.vertices[j] for j, v in enumerate(injective_classes(s))}
    n = len(idx)
    cap = 4 * n + 8
    verts: Dict[Tuple[int, int], ARVertex] = {}
    lengths: Dict[int, int] = {}
    inj_at: Dict[int, Tuple[int, int]] = {}
    for j, v in enumerate(s.vertices):
        cur = np.array(projective_classes(s)[j], dtype=np.int64)
        t = 0
        while True:
            if not _positive(cur):
                raise NotDynkin(f"class {cur.tolist()} is not positive")
            verts[(v, t)] = ARVertex(v, t, tuple(int(x) for x in cur), s.degree(v))
            nxt = cinv @ cur
            if _negative(nxt):
                key = tuple(int(x) for x in cur)
                if key not in inj:
                    raise NotDynkin("orbit ends at a non-injective class")
                inj_at[inj[key]] = (v, t)
                break
            if not _positive(nxt) or t > cap:
                raise NotDynkin("class is neither positive nor negative")
            cur = nxt
            t += 1
        lengths[v] = t + 1
    arrows = []
    for a in s.arrows:
        d = s.bimodule_degree(a)
        for t in range(cap + 1):
            x, y = (a.target, t), (a.source, t)
            if x in verts and y in verts:
                arrows.append(ARArrow(x, y, d))
            x, y = (a.source, t), (a.target, t + 1)
            if x in verts and y in verts:
                arrows.append(ARArrow(x, y, d))
    return ARQuiver(s, verts, arrows, lengths, inj_at)


# ---------------------------------------------------------------------------
# Nakayama data


@dataclass(frozen=True)
class NakayamaData:
    sigma: Dict[int, int]
    lengths: Dict[int, int]   # l_i, length of the orbit containing I_i
    h: int
    homogeneous: Optional[int]

    def to_json(self) -> str:
        return json.dumps({
            "sigma": {str(k): v for k, v in sorted(self.sigma.items())},
            "l": {str(k): v for k, v in sorted(self.lengths.items())},
            "h": self.h,
            "homogeneous": self.homogeneous,
        }, sort_keys=True)


def nakayama_permutation(ar: ARQuiver, check_table: bool = True) -> NakayamaData:
    """sigma(i) = j when the orbit through I_i starts at P_j."""
    sigma, lengths = {}, {}
    for i, (j, t) in ar.injective_at.items():
        sigma[i] = j
        lengths[i] = t + 1
    hs = {lengths[i] + lengths[sigma[i]] for i in sigma}
    if len(hs) != 1:
        raise TableMismatch(f"l_i + l_sigma(i) is not constant: {sorted(hs)}")
    h = hs.pop()
    ls = set(lengths.values())
    nd = NakayamaData(sigma, lengths, h, ls.pop() if len(ls) == 1 else None)
    if check_table:
        t = ar.species.dynkin or classify(ar.species.quiver)
        if t is not None:
            if t.sigma_closed_form() != sigma:
                raise TableMismatch(f"sigma {sigma} disagrees with the table for {t.name}")
            if t.coxeter_number != h:
                raise TableMismatch(f"h = {h} but {t.name} has Coxeter number {t.coxeter_number}")
    return nd


def homogeneity(nd: NakayamaData, q=None) -> Optional[int]:
    """The common orbit length l if all l_i agree, else None."""
    return nd.homogeneous


# ---------------------------------------------------------------------------
# weights


def vertex_weight(s: SpeciesSpec, i: int, j: int) -> int:
    """Sum over the tree path i .. j of -1 per step along an arrow, +1 against."""
    if i == j:
        return 0
    step = {}
    for a in s.arrows:
        step[(a.source, a.target)] = -1
        step[(a.target, a.source)] = 1
    prev = {i: None}
    queue = deque([i])
    while queue:
        u = queue.popleft()
        for (x, y) in step:
            if x == u and y not in prev:
                prev[y] = u
                queue.append(y)
    total, v = 0, j
    while prev[v] is not None:
        total += step[(prev[v], v)]
        v = prev[v]
    return total


def weight(ar: ARQuiver, x: Tuple[int, int], y: Tuple[int, int]) -> int:
    """W(X, Y) for X = tau^{-k1} P_i and Y = tau^{-k2} P_j (k may be any integer)."""
    (i, k1), (j, k2) = x, y
    return 2 * (k2 - k1) + vertex_weight(ar.species, i, j)


def path_weights(ar: ARQuiver, x, y, limit: int = 50) -> List[int]:
    """Arrow counts of directed paths X -> Y in the knitted quiver (each arrow has weight 1)."""
    succ: Dict[Tuple[int, int], List] = {}
    for a in ar.arrows:
        succ.setdefault(a.source, []).append(a.target)
    found = set()
    queue = deque([(x, 0)])
    seen = 0
    while queue and seen < 10000:
        u, length = queue.popleft()
        seen += 1
        if u == y:
            found.add(length)
        if length < limit:
            for w in succ.get(u, []):
                queue.append((w, length + 1))
    return sorted(found)

"""The Nakayama automorphism of Pi(S) and a Frobenius-form certificate.

gamma sends e_i to e_sigma(i) and a generator y in M_a to the same field
element in M_sigma(a), where sigma(a) is the arrow of the double quiver
between the sigma-images of the endpoints of a.  Arrows of Q keep their
sign; a starred arrow picks up sgn(sigma(a)).

When some vertex carries a proper extension field the socle loops
e_v soc e_v can be Frobenius-twisted bimodules, and then no twist of the
generators alone is compatible with a Frobenius form.  The field part of
gamma is measured from the socle (``socle_twist``) and applied on D_v and
on every bimodule coefficient; the generator 1 of each M_a is sent as above.

The certificate is a functional lam on the top degree with
lam(x y) = lam(y gamma(x)) for all x, y and a nondegenerate pairing
beta(x, y) = lam(x y).  Because gamma is multiplicative it suffices to
impose the equations for x of degree at most one.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .field_tower import Inconsistent, kernel_mod, rank_mod, solve_mod
from .tensor_algebra import FiniteGradedAlgebra, GradedAlgebra


class NotWellDefined(RuntimeError):
    """The generator assignment does not preserve the relations."""


class NoFunctional(RuntimeError):
    """No nondegenerate functional is compatible with the given twist."""


class NotHomogeneous(ValueError):
    pass


@dataclass
class AlgebraMorphism:
    alg: GradedAlgebra
    matrix: np.ndarray                # column x = image of basis element x
    arrow_map: Dict[str, tuple]       # arrow id -> (image arrow id, sign)
    twist: int = 0                    # Frobenius power applied to field coefficients

    def image(self, x: int) -> Dict[int, int]:
        col = self.matrix[:, x]
        return {int(k): int(col[k]) for k in np.nonzero(col)[0]}

    def generator_images(self) -> Dict[str, str]:
        out = {}
        for i in self.alg.degree_indices(0) + self.alg.degree_indices(1):
            terms = []
            for k, c in sorted(self.image(i).items()):
                coeff = c if c <= self.alg.p // 2 else c - self.alg.p
                terms.append(f"{coeff}*{self.alg.info[k].label}")
            out[self.alg.info[i].label] = " + ".join(terms) if terms else "0"
        return out

    def to_json(self) -> str:
        return json.dumps({"generators": self.generator_images(),
                           "arrows": {k: [v[0], v[1]] for k, v in sorted(self.arrow_map.items())}},
                          sort_keys=True)

    def is_identity(self) -> bool:
        return bool((self.matrix % self.alg.p == np.eye(self.alg.dim, dtype=np.int64)).all())

    def preserves_grading(self, path_only: bool = False) -> bool:
        """Bidegree preserved; with ``path_only`` just the path length.

        The star grading is only preserved when the orientation is sigma-stable.
        """
        info = self.alg.info
        for x in range(self.alg.dim):
            for k in np.nonzero(self.matrix[:, x])[0]:
                a, b = info[int(k)].deg, info[x].deg
                if (a[0] != b[0]) if path_only else (a != b):
                    return False
        return True

    def square_signs(self) -> Optional[Dict[int, int]]:
        """gamma^2 on degree <= 1 generators as +-1, or None if not diagonal."""
        p = self.alg.p
        sq = self.matrix @ self.matrix % p
        out = {}
        for x in self.alg.degree_indices(0) + self.alg.degree_indices(1):
            col = sq[:, x]
            nz = np.nonzero(col)[0]
            if list(nz) != [x] or int(col[x]) not in (1, p - 1):
                return None
            out[x] = 1 if int(col[x]) == 1 else -1
        return out


def _vec(a: GradedAlgebra, d: Dict[int, int]) -> np.ndarray:
    v = np.zeros(a.dim, dtype=np.int64)
    for k, c in d.items():
        v[k] = c % a.p
    return v


def arrow_permutation(pi: FiniteGradedAlgebra, sigma: Dict, flip: Optional[str] = None) -> Dict[str, tuple]:
    """a -> (sigma(a), sign) on the double quiver; ``flip`` negates one arrow's sign."""
    by_ends = {(a.source, a.target): a for a in pi.arrows}
    out = {}
    for a in pi.arrows:
        b = by_ends.get((sigma[a.source], sigma[a.target]))
        if b is None:
            raise NotWellDefined(f"sigma does not map arrow {a.id} to an arrow")
        sign = 1 if a.star == 0 else (1 if b.star == 0 else -1)
        if a.id == flip:
            sign = -sign
        out[a.id] = (b.id, sign)
    return out


def _field_vector(pi: FiniteGradedAlgebra, v, y) -> Dict[int, int]:
    basis = pi.vertex_basis(v)
    return {basis[a]: int(c) for a, c in enumerate(y[:len(basis)]) if c}


def socle_twist(pi: FiniteGradedAlgebra) -> int:
    """t with x s = s frob^t(x) on every top-degree loop space e_v soc e_v.

    Returns 0 when every vertex carries the base field.
    """
    from .homological import left_matrix, right_matrix

    big = pi.big
    top = pi.degree_indices(pi.top_degree)
    found = set()
    for v in pi.vertices:
        if pi.degrees[v] == 1:
            continue
        loops = [i for i in top if pi.info[i].src == v and pi.info[i].tgt == v]
        if not loops:
            continue
        x = pi.vertex_basis(v)[1]
        L = left_matrix(pi, x)[:, loops] % pi.p
        hits = []
        for t in range(big.k):
            fx = _field_vector(pi, v, big.frobenius(big.gen(), t))
            R = sum(c * right_matrix(pi, k) for k, c in fx.items()) % pi.p
            if (R[:, loops] == L).all():
                hits.append(t)
        if len(hits) != 1:
            raise NotWellDefined(f"socle at vertex {v} is not a twisted field bimodule")
        found.add(hits[0])
    if len(found) > 1:
        raise NotWellDefined(f"vertices disagree on the socle twist: {sorted(found)}")
    return found.pop() if found else 0


def nakayama_automorphism(pi: FiniteGradedAlgebra, sigma: Dict, flip: Optional[str] = None,
                          check: bool = True, twist: Optional[int] = None) -> AlgebraMorphism:
    """Extend the generator assignment along the factorization of each basis element."""
    p = pi.p
    big = pi.big
    t = socle_twist(pi) if twist is None else twist
    amap = arrow_permutation(pi, sigma, flip)
    gen_image = {}
    for a in pi.arrows:
        b, sign = amap[a.id]
        gen_image[a.id] = (b, sign)
    dim = pi.dim
    G = np.zeros((dim, dim), dtype=np.int64)
    offs = pi.offsets
    for loc, (v, a) in enumerate(pi.factor[0]):
        for k, c in _field_vector(pi, sigma[v], big.frobenius(big.power(a), t)).items():
            G[k, loc] = c
    for n in range(1, len(pi.blocks)):
        for loc, (aid, ri, m) in enumerate(pi.factor[n]):
            b, sign = gen_image[aid]
            y = big.frobenius(pi._rbasis[aid][ri], t)
            head = {k: sign * c % p for k, c in pi.arrow_element(b, y).items()}
            tail_idx = offs[n - 1] + m
            tail = {int(k): int(G[k, tail_idx]) for k in np.nonzero(G[:, tail_idx])[0]}
            G[:, offs[n] + loc] = _vec(pi, pi.mul_vec(head, tail))
    g = AlgebraMorphism(pi, G % p, amap, t)
    if check:
        check_relations(pi, g)
    return g


def _apply(g: AlgebraMorphism, d: Dict[int, int]) -> Dict[int, int]:
    v = g.matrix @ _vec(g.alg, d) % g.alg.p
    return {int(k): int(v[k]) for k in np.nonzero(v)[0]}


def check_relations(pi: FiniteGradedAlgebra, g: AlgebraMorphism) -> None:
    """gamma of every relation vanishes, and gamma is multiplicative on generators."""
    p = pi.p
    big = pi.big
    for rel in pi.relations:
        tgt = pi._arrow[rel[0].left].target
        for a in range(pi.degrees[tgt]):
            d = big.power(a)
            total: Dict[int, int] = {}
            for t in rel:
                left = _apply(g, pi.arrow_element(t.left, big.mul(d, t.left_elem)))
                right = _apply(g, pi.arrow_element(t.right, t.right_elem))
                for k, c in pi.mul_vec(left, right).items():
                    total[k] = (total.get(k, 0) + t.coeff * c) % p
            if any(total.values()):
                raise NotWellDefined("the image of a relation is nonzero")
    gens = pi.degree_indices(0) + pi.degree_indices(1)
    for x in gens:
        gx = g.image(x)
        for y in range(pi.dim):
            lhs = _apply(g, pi.mul(x, y))
            rhs = pi.mul_vec(gx, g.image(y))
            if lhs != rhs:
                raise NotWellDefined(f"gamma is not multiplicative at ({x}, {y})")


# ---------------------------------------------------------------------------
# Frobenius certificate


@dataclass
class FrobeniusCertificate:
    functional: Dict[int, int]   # values on top-degree basis elements
    beta: np.ndarray             # beta[x, y] = lam(x y)

    def nondegenerate(self, p: int) -> bool:
        return rank_mod(self.beta, p) == self.beta.shape[0]


def _beta(a: GradedAlgebra, lam: Dict[int, int]) -> np.ndarray:
    top = a.top_degree
    info = a.info
    by_deg: Dict[int, List[int]] = {}
    for i, b in enumerate(info):
        by_deg.setdefault(b.deg[0], []).append(i)
    B = np.zeros((a.dim, a.dim), dtype=np.int64)
    for x, bx in enumerate(info):
        for y in by_deg.get(top - bx.deg[0], []):
            if info[y].tgt != bx.src:
                continue
            val = sum(c * lam.get(k, 0) for k, c in a.mul(x, y).items())
            B[x, y] = val % a.p
    return B


def frobenius_certificate(a: GradedAlgebra, g: AlgebraMorphism, seed: int = 0) -> FrobeniusCertificate:
    """Solve lam(x y - y gamma(x)) = 0 on the top degree; normalize on socle elements."""
    p = a.p
    info = a.info
    top = a.top_degree
    top_idx = a.degree_indices(top)
    col = {k: n for n, k in enumerate(top_idx)}
    by_deg: Dict[int, List[int]] = {}
    for i, b in enumerate(info):
        by_deg.setdefault(b.deg[0], []).append(i)
    eqs = []
    for x in a.degree_indices(0) + a.degree_indices(1):
        gx = g.image(x)
        for y in by_deg.get(top - info[x].deg[0], []):
            row = np.zeros(len(top_idx), dtype=np.int64)
            for k, c in a.mul(x, y).items():
                row[col[k]] += c
            for k, c in a.mul_vec({y: 1}, gx).items():
                if k in col:
                    row[col[k]] -= c
            row %= p
            if row.any():
                eqs.append(row)
    E = np.array(eqs, dtype=np.int64) if eqs else np.zeros((0, len(top_idx)), dtype=np.int64)
    V = kernel_mod(E, p)
    if len(V) == 0:
        raise NoFunctional("only the zero functional is compatible")
    # normalization: value 1 on the first top basis element of each A e_i
    norm = []
    for v in a.vertices:
        first = next((n for n, k in enumerate(top_idx) if info[k].src == v), None)
        if first is not None:
            norm.append(first)
    candidates = []
    try:
        c = solve_mod(V[:, norm].T, np.ones(len(norm), dtype=np.int64), p)
        candidates.append(c @ V % p)
    except Inconsistent:
        pass
    rng = random.Random(seed)
    for _ in range(4):
        c = np.array([rng.randrange(p) for _ in range(len(V))], dtype=np.int64)
        candidates.append(c @ V % p)
    for lam_vec in candidates:
        lam = {top_idx[n]: int(lam_vec[n]) for n in np.nonzero(lam_vec)[0]}
        cert = FrobeniusCertificate(lam, _beta(a, lam))
        if cert.nondegenerate(p):
            return cert
    raise NoFunctional("every compatible functional is degenerate")


def check_twisted_symmetry(a: GradedAlgebra, g: AlgebraMorphism, cert: FrobeniusCertificate) -> bool:
    """beta(x, y) == beta(y, gamma(x)) for all basis pairs."""
    p = a.p
    lhs = cert.beta % p
    rhs = (g.matrix.T @ cert.beta.T) % p
    return bool((lhs == rhs).all())


def check_blockwise_pairing(a: GradedAlgebra, cert: FrobeniusCertificate) -> bool:
    top = a.top_degree
    for j in range(top + 1):
        xs, ys = a.degree_indices(j), a.degree_indices(top - j)
        if len(xs) != len(ys):
            return False
        if xs and rank_mod(cert.beta[np.ix_(xs, ys)], a.p) != len(xs):
            return False
    return True


# ---------------------------------------------------------------------------
# Segre products


def segre_nakayama(g1: AlgebraMorphism, g2: AlgebraMorphism, product, nd1=None, nd2=None) -> AlgebraMorphism:
    """The star-degreewise tensor of two automorphisms on their Segre product."""
    for nd in (nd1, nd2):
        if nd is not None and nd.homogeneous is None:
            raise NotHomogeneous("factor is not l-homogeneous")
    if nd1 is not None and nd2 is not None and nd1.homogeneous != nd2.homogeneous:
        raise NotHomogeneous("factors have different l")
    p = product.p
    index = {pair: n for n, pair in enumerate(product.pairs)}
    G = np.zeros((product.dim, product.dim), dtype=np.int64)
    for n, (i, j) in enumerate(product.pairs):
        ci, cj = g1.matrix[:, i], g2.matrix[:, j]
        for k1 in np.nonzero(ci)[0]:
            for k2 in np.nonzero(cj)[0]:
                m = index.get((int(k1), int(k2)))
                if m is None:
                    raise NotHomogeneous("factor morphism changes star degree")
                G[m, n] = (G[m, n] + ci[k1] * cj[k2]) % p
    amap = {f"{a}|{b}": (f"{v[0]}|{w[0]}", v[1] * w[1])
            for a, v in g1.arrow_map.items() for b, w in g2.arrow_map.items()}
    return AlgebraMorphism(product, G, amap)

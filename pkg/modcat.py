"""
Module category of a finite-dimensional algebra: modules, morphisms, exact
sequences, covers, syzygies, decomposition and Tor
"""

import hashlib
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Poly, symbols

import exactla as la
from algebra import Algebra, AlgebraMap
from errors import (
    AlgebraMismatch,
    DecompositionInconclusive,
    InvariantViolation,
    NoSolution,
    NotAHomomorphism,
    NotExact,
)

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 64
ISO_TRIALS = 8

_x = symbols("x")


@dataclass(frozen=True)
class ExceedsCap:
    """Result of a capped computation that did not terminate within the cap"""

    cap: int

    def __str__(self) -> str:
        return f">{self.cap}"


PdValue = Union[int, ExceedsCap]


@dataclass(frozen=True, eq=False)
class Module:
    """Right module: action[i] is the matrix of basis element i, m.b = m @ action[i]"""

    algebra: Algebra
    action: np.ndarray
    name: Optional[str] = None
    # (vertex, rows of e_v A in algebra coordinates) per summand when the module is a sum of e_v A
    free_summands: Optional[Tuple[Tuple[str, np.ndarray], ...]] = None

    @property
    def dim(self) -> int:
        return int(self.action.shape[1])

    @property
    def p(self) -> int:
        return self.algebra.p

    def __repr__(self) -> str:
        label = self.name or "M"
        return f"{label}(dim={self.dim}, dimvec={self.dimension_vector})"

    def act(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("i,ijk->jk", np.asarray(x, dtype=np.int64) % self.p, self.action) % self.p

    def act_many(self, xs: np.ndarray) -> np.ndarray:
        return np.einsum("ri,ijk->rjk", np.asarray(xs, dtype=np.int64) % self.p, self.action) % self.p

    def idempotent_matrix(self, v: str) -> np.ndarray:
        return self.act(self.algebra.idempotent(v))

    @cached_property
    def dimension_vector(self) -> Dict[str, int]:
        return {v: la.rank(self.act(e), self.p) for v, e in self.algebra.idempotents}

    @cached_property
    def generator_actions(self) -> Tuple[np.ndarray, ...]:
        """Matrices of the vertex idempotents followed by the radical generators"""
        vecs = [e for _, e in self.algebra.idempotents] + [g.vector for g in self.algebra.generators]
        return tuple(self.act(v) for v in vecs)

    @cached_property
    def vertex_basis(self) -> Tuple[np.ndarray, np.ndarray, Dict[str, slice]]:
        """Basis adapted to the vertex decomposition, its inverse, and the block per vertex"""
        rows, slices, start = [], {}, 0
        for v, e in self.algebra.idempotents:
            block = la.row_basis(self.act(e), self.p)
            rows.append(block)
            slices[v] = slice(start, start + block.shape[0])
            start += block.shape[0]
        basis = la.vstack(rows) if self.dim else np.zeros((0, 0), dtype=np.int64)
        return basis, la.inverse(basis, self.p), slices

    @cached_property
    def generator_blocks(self) -> Tuple[np.ndarray, ...]:
        """Each radical generator e_s g e_t as a block from the s-part to the t-part"""
        basis, inv, slices = self.vertex_basis
        out = []
        for g in self.algebra.generators:
            full = la.mul_chain([basis, self.act(g.vector), inv], self.p)
            out.append(full[slices[g.source], slices[g.target]])
        return tuple(out)

    def check(self) -> Dict[str, bool]:
        a, p, n = self.algebra, self.p, self.dim
        act = self.action % p
        results = {"shape": act.shape == (a.dim, n, n)}
        if not results["shape"]:
            return results
        results["unital"] = bool(np.array_equal(self.act(a.unit), np.eye(n, dtype=np.int64)))
        lhs = np.einsum("iab,jbc->ijac", act, act) % p
        rhs = np.einsum("ijk,kac->ijac", a.mult, act) % p
        results["multiplicative"] = bool(np.array_equal(lhs, rhs))
        return results

    def verify(self) -> "Module":
        for name, ok in self.check().items():
            if not ok:
                raise InvariantViolation(f"module {name}", repr(self))
        return self

    def named(self, name: str) -> "Module":
        return Module(self.algebra, self.action, name, self.free_summands)


@dataclass(frozen=True, eq=False)
class Morphism:
    """Module homomorphism as a dim(source) x dim(target) matrix"""

    source: Module
    target: Module
    matrix: np.ndarray

    def __post_init__(self):
        if self.source.algebra is not self.target.algebra:
            raise AlgebraMismatch("morphism between modules over different algebras")
        if self.matrix.shape != (self.source.dim, self.target.dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not fit {self.source.dim}x{self.target.dim}")

    @property
    def p(self) -> int:
        return self.source.p

    @property
    def rank(self) -> int:
        return la.rank(self.matrix, self.p)

    def is_homomorphism(self) -> bool:
        p = self.p
        for a_src, a_tgt in zip(self.source.generator_actions, self.target.generator_actions):
            if not np.array_equal(la.mul(a_src, self.matrix, p), la.mul(self.matrix, a_tgt, p)):
                return False
        return True

    def verify(self) -> "Morphism":
        if not self.is_homomorphism():
            raise NotAHomomorphism(f"{self.source!r} -> {self.target!r}")
        return self

    def then(self, other: "Morphism") -> "Morphism":
        """Composite: first self, then other"""
        if self.target is not other.source:
            raise AlgebraMismatch("composite of non-composable morphisms")
        return Morphism(self.source, other.target, la.mul(self.matrix, other.matrix, self.p))

    def is_mono(self) -> bool:
        return self.rank == self.source.dim

    def is_epi(self) -> bool:
        return self.rank == self.target.dim

    def is_iso(self) -> bool:
        return self.source.dim == self.target.dim and self.is_mono()


def identity(m: Module) -> Morphism:
    return Morphism(m, m, np.eye(m.dim, dtype=np.int64))


def zero_map(m: Module, n: Module) -> Morphism:
    return Morphism(m, n, np.zeros((m.dim, n.dim), dtype=np.int64))


@dataclass(frozen=True, eq=False)
class ShortExact:
    """0 -> left -f-> middle -g-> right -> 0, verified on construction"""

    f: Morphism
    g: Morphism

    def __post_init__(self):
        p = self.f.p
        if self.f.target is not self.g.source:
            raise NotExact("maps are not composable")
        if np.any(la.mul(self.f.matrix, self.g.matrix, p)):
            raise NotExact("composite is not zero")
        if not self.f.is_mono():
            raise NotExact("left map is not injective")
        if not self.g.is_epi():
            raise NotExact("right map is not surjective")
        if self.f.source.dim + self.g.target.dim != self.f.target.dim:
            raise NotExact("dimensions do not add up")

    @property
    def left(self) -> Module:
        return self.f.source

    @property
    def middle(self) -> Module:
        return self.f.target

    @property
    def right(self) -> Module:
        return self.g.target


@dataclass(frozen=True, eq=False)
class ExactChain:
    """0 -> objects[0] -> ... -> objects[-1] -> 0, exact at every object.

    The last object is the tail; the others are the internal terms. length is
    the number of internal terms minus one.
    """

    objects: Tuple[Module, ...]
    maps: Tuple[Morphism, ...]

    def __post_init__(self):
        if len(self.maps) != len(self.objects) - 1:
            raise NotExact("a chain needs one map between consecutive objects")
        for k, f in enumerate(self.maps):
            if f.source is not self.objects[k] or f.target is not self.objects[k + 1]:
                raise NotExact(f"map {k} does not connect objects {k} and {k + 1}")
        for k, obj in enumerate(self.objects):
            incoming = self.maps[k - 1] if k > 0 else None
            outgoing = self.maps[k] if k < len(self.maps) else None
            r_in = incoming.rank if incoming is not None else 0
            r_out = outgoing.rank if outgoing is not None else 0
            if r_in + r_out != obj.dim:
                raise NotExact(f"not exact at position {k}: ranks {r_in} + {r_out} != {obj.dim}")
            if incoming is not None and outgoing is not None:
                if np.any(la.mul(incoming.matrix, outgoing.matrix, obj.p)):
                    raise NotExact(f"consecutive maps at position {k} do not compose to zero")

    @classmethod
    def from_maps(cls, maps: Sequence[Morphism]) -> "ExactChain":
        maps = tuple(maps)
        return cls((maps[0].source,) + tuple(f.target for f in maps), maps)

    @classmethod
    def trivial(cls, m: Module) -> "ExactChain":
        """0 -> m -> m -> 0"""
        return cls((m, m), (identity(m),))

    @property
    def head(self) -> Module:
        return self.objects[0]

    @property
    def tail(self) -> Module:
        return self.objects[-1]

    @property
    def internal_terms(self) -> Tuple[Module, ...]:
        return self.objects[:-1]

    @property
    def length(self) -> int:
        return len(self.objects) - 2

    @property
    def dims(self) -> List[int]:
        return [m.dim for m in self.objects]

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(",".join(str(d) for d in self.dims).encode())
        for f in self.maps:
            h.update(np.ascontiguousarray(f.matrix % f.p, dtype=np.int64).tobytes())
        return h.hexdigest()


# Construction

def zero_module(a: Algebra) -> Module:
    return Module(a, np.zeros((a.dim, 0, 0), dtype=np.int64), "0", ())


def restrict_scalars(m: Module, phi: AlgebraMap) -> Module:
    """m viewed over phi.source through the algebra map phi"""
    if m.algebra is not phi.target:
        raise AlgebraMismatch("restriction along a map into a different algebra")
    p = m.p
    if m.dim == 0:
        return zero_module(phi.source)
    action = np.einsum("ij,jab->iab", phi.matrix % p, m.action) % p
    return Module(phi.source, action, m.name)


def from_representation(
    a: Algebra,
    dims: Dict[str, int],
    generator_matrices: Dict[str, np.ndarray],
    name: Optional[str] = None,
) -> Module:
    """Module from one vector space per vertex and one matrix per radical generator"""
    p = a.p
    for v in dims:
        a.idempotent(v)
    offsets, start = {}, 0
    for v in a.vertices:
        k = int(dims.get(v, 0))
        offsets[v] = slice(start, start + k)
        start += k
    n = start
    vertex_mats = {}
    for v in a.vertices:
        m = np.zeros((n, n), dtype=np.int64)
        s = offsets[v]
        m[s, s] = np.eye(s.stop - s.start, dtype=np.int64)
        vertex_mats[v] = m
    gen_mats = []
    for g in a.generators:
        m = np.zeros((n, n), dtype=np.int64)
        block = np.asarray(generator_matrices.get(g.name, np.zeros((0, 0))), dtype=np.int64)
        rs, cs = offsets[g.source], offsets[g.target]
        if block.size:
            if block.shape != (rs.stop - rs.start, cs.stop - cs.start):
                raise InvariantViolation("representation", f"matrix of {g.name} has shape {block.shape}")
            m[rs, cs] = block % p
        gen_mats.append(m)
    words, coeffs = a.word_basis
    word_mats = []
    for vi, gw in words:
        m = vertex_mats[a.vertices[vi]]
        for gi in gw:
            m = la.mul(m, gen_mats[gi], p)
        word_mats.append(m)
    stacked = np.stack(word_mats) if word_mats else np.zeros((0, n, n), dtype=np.int64)
    action = np.einsum("ik,kab->iab", coeffs, stacked) % p
    return Module(a, action, name).verify()


def submodule(m: Module, rows: np.ndarray) -> Tuple[Module, Morphism]:
    """Submodule spanned by rows (assumed closed under the action) and its inclusion"""
    p = m.p
    basis = la.row_basis(np.asarray(rows, dtype=np.int64).reshape(-1, m.dim), p)
    k = basis.shape[0]
    if k == 0:
        z = zero_module(m.algebra)
        return z, Morphism(z, m, np.zeros((0, m.dim), dtype=np.int64))
    images = np.einsum("ra,iab->irb", basis, m.action) % p
    coords = la.solve(basis, images.reshape(-1, m.dim), p).reshape(m.algebra.dim, k, k)
    sub = Module(m.algebra, coords)
    return sub, Morphism(sub, m, basis)


def generated_submodule(m: Module, vectors: np.ndarray) -> Tuple[Module, Morphism]:
    """Smallest submodule containing the given vectors"""
    vectors = np.asarray(vectors, dtype=np.int64).reshape(-1, m.dim)
    if vectors.shape[0] == 0:
        return submodule(m, vectors)
    rows = np.einsum("ra,iab->irb", vectors, m.action).reshape(-1, m.dim)
    return submodule(m, rows)


def quotient(m: Module, rows: np.ndarray) -> Tuple[Module, Morphism, np.ndarray]:
    """Quotient by the submodule spanned by rows: (module, projection, section rows)"""
    p = m.p
    sub = la.row_basis(np.asarray(rows, dtype=np.int64).reshape(-1, m.dim), p)
    r = sub.shape[0]
    comp = la.complement_basis(sub, m.dim, p)
    change = la.vstack([sub, comp]) if r else comp
    proj = la.inverse(change, p)[:, r:] if m.dim else np.zeros((0, 0), dtype=np.int64)
    k = comp.shape[0]
    action = np.einsum("ra,iab,bc->irc", comp, m.action, proj) % p if k else np.zeros((m.algebra.dim, 0, 0), dtype=np.int64)
    q = Module(m.algebra, action)
    return q, Morphism(m, q, proj), comp


@lru_cache(maxsize=4096)
def regular(a: Algebra) -> Module:
    action = np.ascontiguousarray(np.transpose(a.mult, (1, 0, 2))) % a.p
    return Module(a, action, "A")


@lru_cache(maxsize=4096)
def projective(a: Algebra, v: str) -> Module:
    """e_v A as a right module, basis in algebra coordinates stored as its free data"""
    rows = la.row_basis(a.left_matrix(a.idempotent(v)), a.p)
    sub, _ = submodule(regular(a), rows)
    return Module(a, sub.action, f"P({v})", ((v, rows),))


@lru_cache(maxsize=4096)
def simple(a: Algebra, v: str) -> Module:
    t, _ = top(projective(a, v))
    return t.named(f"S({v})")


def direct_sum(mods: Sequence[Module]) -> Module:
    mods = [m for m in mods]
    if not mods:
        raise ValueError("direct sum of an empty family needs an algebra; use zero_module")
    a = mods[0].algebra
    for m in mods:
        if m.algebra is not a:
            raise AlgebraMismatch("direct sum over different algebras")
    n = sum(m.dim for m in mods)
    action = np.zeros((a.dim, n, n), dtype=np.int64)
    start = 0
    for m in mods:
        action[:, start : start + m.dim, start : start + m.dim] = m.action
        start += m.dim
    free = None
    if all(m.free_summands is not None for m in mods):
        free = tuple(s for m in mods for s in m.free_summands)
    return Module(a, action, None, free)


def direct_sum_maps(mods: Sequence[Module]) -> Tuple[Module, List[Morphism], List[Morphism]]:
    """Direct sum with its canonical inclusions and projections"""
    total = direct_sum(mods)
    incs, projs, start = [], [], 0
    for m in mods:
        inc = np.zeros((m.dim, total.dim), dtype=np.int64)
        inc[:, start : start + m.dim] = np.eye(m.dim, dtype=np.int64)
        incs.append(Morphism(m, total, inc))
        projs.append(Morphism(total, m, inc.T.copy()))
        start += m.dim
    return total, incs, projs


# Hom spaces

def hom_basis(m: Module, n: Module) -> List[Morphism]:
    """Basis of Hom(m, n) solved blockwise in vertex-adapted coordinates"""
    if m.algebra is not n.algebra:
        raise AlgebraMismatch("hom between modules over different algebras")
    a, p = m.algebra, m.p
    if m.dim == 0 or n.dim == 0:
        return []
    bm, bm_inv, sm = m.vertex_basis
    bn, _, sn = n.vertex_basis
    offsets, total = {}, 0
    for v in a.vertices:
        size = (sm[v].stop - sm[v].start) * (sn[v].stop - sn[v].start)
        offsets[v] = (total, total + size)
        total += size
    if total == 0:
        return []
    eqs = []
    for g, gm, gn in zip(a.generators, m.generator_blocks, n.generator_blocks):
        s, t = g.source, g.target
        ms, mt = gm.shape
        ns, nt = gn.shape
        if ms * nt == 0:
            continue
        block = np.zeros((ms * nt, total), dtype=np.int64)
        if mt * nt:
            block[:, offsets[t][0] : offsets[t][1]] += np.kron(gm, np.eye(nt, dtype=np.int64))
        if ms * ns:
            block[:, offsets[s][0] : offsets[s][1]] -= np.kron(np.eye(ms, dtype=np.int64), gn.T)
        eqs.append(block % p)
    if eqs:
        system = la.vstack(eqs)
        sols = la.kernel_basis(system.T, p)
    else:
        sols = np.eye(total, dtype=np.int64)
    out = []
    for x in sols:
        t_adapted = np.zeros((m.dim, n.dim), dtype=np.int64)
        for v in a.vertices:
            lo, hi = offsets[v]
            rows, cols = sm[v], sn[v]
            t_adapted[rows, cols] = x[lo:hi].reshape(rows.stop - rows.start, cols.stop - cols.start)
        out.append(Morphism(m, n, la.mul_chain([bm_inv, t_adapted, bn], p)))
    return out


def hom_dim(m: Module, n: Module) -> int:
    return len(hom_basis(m, n))


def endomorphism_matrices(m: Module) -> np.ndarray:
    basis = hom_basis(m, m)
    if not basis:
        return np.zeros((0, m.dim, m.dim), dtype=np.int64)
    return np.stack([f.matrix for f in basis])


def combine(maps: Sequence[Morphism], coeffs: Sequence[int]) -> np.ndarray:
    p = maps[0].p
    return np.einsum("k,kab->ab", np.asarray(coeffs, dtype=np.int64) % p, np.stack([f.matrix for f in maps])) % p


# Kernels, cokernels, images, pullbacks

def kernel(f: Morphism) -> Tuple[Module, Morphism]:
    rows = la.kernel_basis(f.matrix, f.p) if f.source.dim else np.zeros((0, 0), dtype=np.int64)
    return submodule(f.source, rows.reshape(-1, f.source.dim))


def image(f: Morphism) -> Tuple[Module, Morphism]:
    return submodule(f.target, f.matrix)


def cokernel(f: Morphism) -> Tuple[Module, Morphism]:
    q, proj, _ = quotient(f.target, f.matrix)
    return q, proj


def factor_through_mono(h: Morphism, f: Morphism) -> Morphism:
    """The unique k with k f = h, for f injective and im h inside im f"""
    k = la.solve(f.matrix, h.matrix, h.p) if h.source.dim else np.zeros((0, f.source.dim), dtype=np.int64)
    return Morphism(h.source, f.source, k)


def factor_through_epi(h: Morphism, g: Morphism) -> Morphism:
    """The unique k with g k = h, for g surjective and ker g inside ker h"""
    p = h.p
    if g.source.dim == 0:
        return zero_map(g.target, h.target)
    inv = la.solve(g.matrix, np.eye(g.target.dim, dtype=np.int64), p) if g.target.dim else np.zeros((0, g.source.dim), dtype=np.int64)
    return Morphism(g.target, h.target, la.mul(inv, h.matrix, p))


def pullback(f: Morphism, g: Morphism) -> Tuple[Module, Morphism, Morphism]:
    """Pullback of X -f-> Z <-g- Y as the kernel of (f, -g) on X + Y"""
    if f.target is not g.target:
        raise AlgebraMismatch("pullback needs a common target")
    x, y, p = f.source, g.source, f.p
    total, _, projs = direct_sum_maps([x, y])
    diff = Morphism(total, f.target, la.vstack([f.matrix, (-g.matrix) % p]))
    pb, inc = kernel(diff)
    return pb, inc.then(projs[0]), inc.then(projs[1])


def pushout(f: Morphism, g: Morphism) -> Tuple[Module, Morphism, Morphism]:
    """Pushout of X <-f- Z -g-> Y as the cokernel of (f, -g) into X + Y"""
    if f.source is not g.source:
        raise AlgebraMismatch("pushout needs a common source")
    p = f.p
    total, incs, _ = direct_sum_maps([f.target, g.target])
    diff = Morphism(f.source, total, la.hstack([f.matrix, (-g.matrix) % p]))
    po, proj = cokernel(diff)
    return po, incs[0].then(proj), incs[1].then(proj)


# Tops, covers and syzygies

def radical_submodule(m: Module) -> np.ndarray:
    rad = m.algebra.radical_basis
    if rad.shape[0] == 0 or m.dim == 0:
        return np.zeros((0, m.dim), dtype=np.int64)
    return la.row_basis(m.act_many(rad).reshape(-1, m.dim), m.p)


def top(m: Module) -> Tuple[Module, Morphism]:
    q, proj, _ = quotient(m, radical_submodule(m))
    return q, proj


def map_from_free(pm: Module, target: Module, images: Sequence[np.ndarray]) -> Morphism:
    """Homomorphism out of a sum of e_v A sending the generator of summand k to images[k]"""
    if pm.free_summands is None:
        raise ValueError("map_from_free needs a module with free summand data")
    blocks = []
    for (v, rows), y in zip(pm.free_summands, images):
        y = np.asarray(y, dtype=np.int64) % target.p
        blocks.append(np.einsum("a,jab->jb", y, target.act_many(rows)) % target.p)
    matrix = la.vstack(blocks) if blocks else np.zeros((0, target.dim), dtype=np.int64)
    return Morphism(pm, target, matrix)


def free_generators(pm: Module) -> List[np.ndarray]:
    """Coordinates in pm of the generator e_v of each free summand"""
    out, start = [], 0
    for v, rows in pm.free_summands:
        k = rows.shape[0]
        c = la.solve(rows, pm.algebra.idempotent(v).reshape(1, -1), pm.p)[0]
        vec = np.zeros(pm.dim, dtype=np.int64)
        vec[start : start + k] = c
        out.append(vec)
        start += k
    return out


def lift_through_epi(h: Morphism, g: Morphism) -> Morphism:
    """A morphism s out of the projective h.source with s g = h"""
    if h.target is not g.target:
        raise AlgebraMismatch("lift needs a common target")
    pm, y, p = h.source, g.source, h.p
    if pm.dim == 0:
        return zero_map(pm, y)
    if pm.free_summands is not None:
        images = []
        for (v, _), gen in zip(pm.free_summands, free_generators(pm)):
            z = la.mul(gen.reshape(1, -1), h.matrix, p)
            pre = la.solve(g.matrix, z, p)
            images.append(la.mul(pre, y.idempotent_matrix(v), p)[0])
        return map_from_free(pm, y, images)
    basis = hom_basis(pm, y)
    if not basis:
        if np.any(h.matrix):
            raise NoSolution("no lift through the epimorphism")
        return zero_map(pm, y)
    rows = np.stack([la.mul(f.matrix, g.matrix, p).reshape(-1) for f in basis])
    c = la.solve(rows, h.matrix.reshape(1, -1), p)[0]
    return Morphism(pm, y, combine(basis, c))


@lru_cache(maxsize=4096)
def projective_cover(m: Module) -> Morphism:
    """Minimal projective cover: a sum of e_v A, one copy per top basis vector at v"""
    a, p = m.algebra, m.p
    if m.dim == 0:
        return zero_map(zero_module(a), m)
    t, pi = top(m)
    summands, images = [], []
    for v, e in a.idempotents:
        for row in la.row_basis(t.act(e), p):
            pre = la.solve(pi.matrix, row.reshape(1, -1), p)
            images.append(la.mul(pre, m.idempotent_matrix(v), p)[0])
            summands.append(projective(a, v))
    pm = direct_sum(summands)
    cover = map_from_free(pm, m, images)
    if not cover.is_epi():
        raise InvariantViolation("projective cover", f"not surjective onto {m!r}")
    logger.debug(f"projective cover of {m!r}: {pm.dim}-dimensional")
    return cover


@lru_cache(maxsize=4096)
def syzygy_with_inclusion(m: Module) -> Tuple[Module, Morphism]:
    cover = projective_cover(m)
    return kernel(cover)


def syzygy(m: Module) -> Module:
    return syzygy_with_inclusion(m)[0]


def syzygy_n(m: Module, n: int) -> Module:
    if n < 0:
        raise ValueError("syzygy depth must be non-negative")
    out = m
    for _ in range(n):
        out = syzygy(out)
    return out


def is_projective(m: Module) -> bool:
    return projective_cover(m).source.dim == m.dim


def pd(m: Module, cap: int = 64) -> PdValue:
    """Least n with the n-th syzygy projective, or ExceedsCap"""
    current = m
    for n in range(cap + 1):
        if is_projective(current):
            return n
        current = syzygy(current)
    return ExceedsCap(cap)


def resolution_maps(m: Module, steps: int) -> List[Morphism]:
    """d_0: P_0 -> m, then d_k: P_k -> P_(k-1) from minimal covers, at most steps+1 maps"""
    cover = projective_cover(m)
    maps = [cover]
    current = m
    for _ in range(steps):
        omega, inc = syzygy_with_inclusion(current)
        if omega.dim == 0:
            break
        nxt = projective_cover(omega)
        maps.append(nxt.then(inc))
        current = omega
    return maps


# Krull-Schmidt

def _endomorphism_radical(ends: np.ndarray, p: int) -> np.ndarray:
    """Coefficient rows spanning the radical of End, as the kernel of the trace form"""
    gram = np.einsum("iab,jba->ij", ends, ends) % p
    return la.kernel_basis(gram, p)


def _factor_minimal_polynomial(coeffs: List[int], p: int) -> List[Tuple[List[int], int]]:
    """Irreducible factors (coefficients low degree first) with multiplicities"""
    poly = Poly(list(reversed(coeffs)), _x, modulus=p)
    _, factors = poly.factor_list()
    out = []
    for f, k in factors:
        out.append(([int(c) % p for c in reversed(f.all_coeffs())], int(k)))
    return out


def _split_once(m: Module, rng: np.random.Generator, trials: int) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Rows of two complementary nonzero submodules, or None when m is indecomposable"""
    p = m.p
    ends = endomorphism_matrices(m)
    k = ends.shape[0]
    if k <= 1:
        return None
    rad = _endomorphism_radical(ends, p)
    top_dim = k - rad.shape[0]
    if top_dim == 1:
        return None
    n = m.dim
    for _ in range(trials):
        c = rng.integers(0, p, size=k, dtype=np.int64)
        phi = np.einsum("k,kab->ab", c, ends) % p
        factors = _factor_minimal_polynomial(la.minimal_polynomial(phi, p), p)
        if len(factors) == 1 and len(factors[0][0]) - 1 == top_dim:
            # phi generates a field of degree dim(End/rad) modulo the radical
            logger.debug(f"{m!r}: endomorphism ring modulo radical is a field of degree {top_dim} over F_{p}")
            return None
        if len(factors) < 2:
            continue
        q, mult = factors[0]
        psi = la.matrix_power(la.poly_eval(q, phi, p), mult * n, p)
        ker = la.kernel_basis(psi, p)
        img = la.row_basis(psi, p)
        if ker.shape[0] and img.shape[0]:
            return ker, img
    raise DecompositionInconclusive(f"no splitting idempotent for {m!r} after {trials} trials")


@lru_cache(maxsize=4096)
def indecomposable_summands(m: Module, seed: int = 0, trials: int = DEFAULT_TRIALS) -> Tuple[Morphism, ...]:
    """Inclusions of indecomposable summands whose images form a direct sum decomposition of m"""
    rng = np.random.default_rng(seed)
    p = m.p
    out: List[Morphism] = []
    stack = [(m, np.eye(m.dim, dtype=np.int64))]
    while stack:
        current, inc = stack.pop()
        if current.dim == 0:
            continue
        split = _split_once(current, rng, trials)
        if split is None:
            out.append(Morphism(current, m, inc))
            continue
        for rows in split:
            sub, sub_inc = submodule(current, rows)
            stack.append((sub, la.mul(sub_inc.matrix, inc, p)))
    out.sort(key=lambda f: (f.source.dim, tuple(sorted(f.source.dimension_vector.items()))))
    logger.debug(f"{m!r} splits into {len(out)} indecomposable summands")
    return tuple(out)


def find_iso(x: Module, y: Module, seed: int = 0, trials: int = ISO_TRIALS) -> Optional[Morphism]:
    """An isomorphism x -> y found by sampling Hom(x, y), or None"""
    if x is y:
        return identity(x)
    if x.algebra is not y.algebra:
        raise AlgebraMismatch("isomorphism test across algebras")
    if x.dim != y.dim or x.dimension_vector != y.dimension_vector:
        return None
    if x.dim == 0:
        return Morphism(x, y, np.zeros((0, 0), dtype=np.int64))
    basis = hom_basis(x, y)
    if not basis:
        return None
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        c = rng.integers(0, x.p, size=len(basis), dtype=np.int64)
        mat = combine(basis, c)
        if la.is_invertible(mat, x.p):
            return Morphism(x, y, mat)
    return None


def is_iso(x: Module, y: Module, seed: int = 0) -> bool:
    return find_iso(x, y, seed) is not None


def decompose(m: Module, seed: int = 0, trials: int = DEFAULT_TRIALS) -> List[Tuple[Module, int]]:
    """Indecomposable summands up to isomorphism with multiplicities"""
    classes: List[List] = []
    for inc in indecomposable_summands(m, seed, trials):
        piece = inc.source
        for entry in classes:
            if is_iso(entry[0], piece, seed):
                entry[1] += 1
                break
        else:
            classes.append([piece, 1])
    return [(piece, k) for piece, k in classes]


def stable_strip(m: Module, seed: int = 0) -> Module:
    """m with every projective indecomposable summand removed"""
    keep = [inc.source for inc in indecomposable_summands(m, seed) if not is_projective(inc.source)]
    if not keep:
        return zero_module(m.algebra)
    return direct_sum(keep)


def stably_isomorphic(x: Module, y: Module, seed: int = 0) -> bool:
    return is_iso(stable_strip(x, seed), stable_strip(y, seed), seed)


def in_add_pieces(m: Module, pieces: Sequence[Module], seed: int = 0) -> bool:
    for inc in indecomposable_summands(m, seed):
        if not any(is_iso(inc.source, u, seed) for u in pieces):
            return False
    return True


def in_add(m: Module, u: Module, seed: int = 0) -> bool:
    """Every indecomposable summand of m is isomorphic to a summand of u"""
    return in_add_pieces(m, [inc.source for inc in indecomposable_summands(u, seed)], seed)


# Tensor products and Tor

@dataclass(frozen=True, eq=False)
class BalancedTensor:
    """x (x)_A y as a quotient of x (x)_k y"""

    x: Module
    y: Module
    projection: np.ndarray
    section: np.ndarray

    @property
    def dim(self) -> int:
        return self.section.shape[0]

    def induced(self, other: "BalancedTensor", f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Matrix of f (x) g from self to other"""
        p = self.x.p
        return la.mul_chain([self.section, la.kron(f, g, p), other.projection], p)


def _opposite_of(a: Algebra, b: Algebra) -> bool:
    return a.dim == b.dim and np.array_equal(np.transpose(a.mult, (1, 0, 2)) % a.p, b.mult % b.p)


def tensor_over(x: Module, y: Module) -> BalancedTensor:
    """x (x)_A y for x a right A-module and y a left A-module given over the opposite algebra"""
    a = x.algebra
    if y.algebra is not a.opposite and not _opposite_of(a, y.algebra):
        raise AlgebraMismatch("second factor must be a module over the opposite algebra")
    p = a.p
    nx, ny = x.dim, y.dim
    total = nx * ny
    if total == 0:
        return BalancedTensor(x, y, np.zeros((0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64))
    gens = [e for _, e in a.idempotents] + [g.vector for g in a.generators]
    rels = []
    for vec in gens:
        rels.append((la.kron(x.act(vec), np.eye(ny, dtype=np.int64), p) - la.kron(np.eye(nx, dtype=np.int64), y.act(vec), p)) % p)
    relations = la.row_basis(la.vstack(rels), p)
    r = relations.shape[0]
    comp = la.complement_basis(relations, total, p)
    change = la.vstack([relations, comp]) if r else comp
    proj = la.inverse(change, p)[:, r:]
    return BalancedTensor(x, y, proj, comp)


def tor_dim(x: Module, y: Module, i: int, cap: int = 64) -> int:
    """dim Tor_i(x, y) from the minimal projective resolution of x"""
    if i < 0 or i > cap:
        raise ValueError(f"Tor index {i} outside [0, {cap}]")
    if i == 0:
        return tensor_over(x, y).dim
    maps = resolution_maps(x, i + 1)
    # maps[k] has source P_k; d_k for k >= 1 goes P_k -> P_(k-1)
    if len(maps) <= i:
        return 0
    p = x.p
    t_i = tensor_over(maps[i].source, y)
    t_prev = tensor_over(maps[i - 1].source, y)
    d_i = t_i.induced(t_prev, maps[i].matrix, np.eye(y.dim, dtype=np.int64))
    kernel_dim = t_i.dim - la.rank(d_i, p)
    if len(maps) > i + 1:
        t_next = tensor_over(maps[i + 1].source, y)
        d_next = t_next.induced(t_i, maps[i + 1].matrix, np.eye(y.dim, dtype=np.int64))
        boundary = la.rank(d_next, p)
    else:
        boundary = 0
    return kernel_dim - boundary


# Random objects

def random_module(a: Algebra, rng: np.random.Generator, max_summands: int = 2) -> Module:
    """Quotient of a random sum of indecomposable projectives by a random cyclic submodule"""
    if not a.vertices:
        return zero_module(a)
    count = int(rng.integers(1, max_summands + 1))
    verts = [a.vertices[int(rng.integers(0, len(a.vertices)))] for _ in range(count)]
    pm = direct_sum([projective(a, v) for v in verts])
    x = rng.integers(0, a.p, size=(1, pm.dim), dtype=np.int64)
    _, inc = generated_submodule(pm, la.mul(x, _random_radical_projector(pm, rng), a.p))
    q, _, _ = quotient(pm, inc.matrix)
    return q.named("random")


def _random_radical_projector(pm: Module, rng: np.random.Generator) -> np.ndarray:
    """Maps a vector into rad(pm) so the generated submodule is proper"""
    rad = radical_submodule(pm)
    if rad.shape[0] == 0:
        return np.zeros((pm.dim, pm.dim), dtype=np.int64)
    coeffs = rng.integers(0, pm.p, size=(pm.dim, rad.shape[0]), dtype=np.int64)
    return la.mul(coeffs, rad, pm.p)


def random_ses(a: Algebra, rng: np.random.Generator, max_summands: int = 2) -> ShortExact:
    """0 -> K -> M -> M/K -> 0 with M random and K generated by a random vector"""
    m = random_module(a, rng, max_summands)
    if m.dim == 0:
        z = zero_module(a)
        return ShortExact(zero_map(z, m), identity(m))
    x = rng.integers(0, a.p, size=(1, m.dim), dtype=np.int64)
    _, inc = generated_submodule(m, x)
    _, proj = cokernel(inc)
    return ShortExact(inc, proj)

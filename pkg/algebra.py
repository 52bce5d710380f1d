"""
Finite-dimensional basic split algebras by structure constants
"""

import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

import exactla as la
from errors import (
    AlgebraMismatch,
    BimoduleMismatch,
    EmptyVertexSet,
    InvariantViolation,
    NonAdmissible,
    RelationEndpointMismatch,
    UnknownVertex,
)
from exactla import Field
from models import Provenance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class QuiverPresentation:
    """Quiver with relations and a declared nilpotency bound"""

    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]
    relations: Tuple[Tuple[Tuple[int, Tuple[str, ...]], ...], ...]
    nilpotency_bound: int

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise UnknownVertex(f"unknown arrow {name!r}")


@dataclass(frozen=True)
class Generator:
    """Element of e_s rad e_t whose classes span rad/rad^2"""

    name: str
    source: str
    target: str
    vector: np.ndarray = dc_field(compare=False)


@dataclass(frozen=True, eq=False)
class MoritaBlocks:
    """Block layout of a Morita context ring a + n + m + b"""

    a: "Algebra"
    b: "Algebra"
    m: "BimoduleData"
    n: "BimoduleData"

    @property
    def offsets(self) -> Dict[str, Tuple[int, int]]:
        da, dn, dm, db = self.a.dim, self.n.dim, self.m.dim, self.b.dim
        return {
            "a": (0, da),
            "n": (da, da + dn),
            "m": (da + dn, da + dn + dm),
            "b": (da + dn + dm, da + dn + dm + db),
        }

    @property
    def a_vertices(self) -> Tuple[str, ...]:
        return tuple(f"a:{v}" for v in self.a.vertices)

    @property
    def b_vertices(self) -> Tuple[str, ...]:
        return tuple(f"b:{v}" for v in self.b.vertices)


@dataclass(frozen=True, eq=False)
class Algebra:
    """Associative unital algebra given by structure constants.

    Basis elements multiply as b_i * b_j = sum_k mult[i, j, k] b_k. Elements are
    coordinate row vectors.
    """

    field: Field
    basis_labels: Tuple[str, ...]
    mult: np.ndarray
    unit: np.ndarray
    idempotents: Tuple[Tuple[str, np.ndarray], ...]
    radical_basis: np.ndarray
    provenance: Provenance
    presentation: Optional[QuiverPresentation] = None
    arrow_elements: Optional[Tuple[Tuple[str, np.ndarray], ...]] = None
    morita: Optional[MoritaBlocks] = None

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def vertices(self) -> Tuple[str, ...]:
        return tuple(v for v, _ in self.idempotents)

    def __repr__(self) -> str:
        return f"Algebra(dim={self.dim}, vertices={list(self.vertices)}, provenance={self.provenance.value})"

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def element(self, label: str) -> np.ndarray:
        try:
            return self.basis_vector(self.basis_labels.index(label))
        except ValueError:
            raise KeyError(f"no basis element labelled {label!r}")

    def idempotent(self, v: str) -> np.ndarray:
        for label, vec in self.idempotents:
            if label == v:
                return vec
        raise UnknownVertex(f"{v!r} is not a vertex of {self!r}")

    def vertex_sum(self, verts: Iterable[str]) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.int64)
        for v in verts:
            e = (e + self.idempotent(v)) % self.p
        return e

    def product(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.mult) % self.p

    def left_matrix(self, x: np.ndarray) -> np.ndarray:
        """L(x) with v @ L(x) = x * v"""
        return np.einsum("i,ijk->jk", x % self.p, self.mult) % self.p

    def right_matrix(self, y: np.ndarray) -> np.ndarray:
        """R(y) with v @ R(y) = v * y"""
        return np.einsum("j,ijk->ik", y % self.p, self.mult) % self.p

    def products(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """All products x*y for rows x of xs and y of ys, as rows"""
        if xs.shape[0] == 0 or ys.shape[0] == 0:
            return np.zeros((0, self.dim), dtype=np.int64)
        out = np.einsum("ai,ijk->ajk", xs % self.p, self.mult) % self.p
        out = np.einsum("bj,ajk->abk", ys % self.p, out) % self.p
        return out.reshape(-1, self.dim)

    @cached_property
    def opposite(self) -> "Algebra":
        return opposite(self)

    @cached_property
    def generators(self) -> Tuple[Generator, ...]:
        """Generators of the radical, one family per ordered vertex pair"""
        if self.arrow_elements is not None and self.presentation is not None:
            return tuple(
                Generator(name, self.presentation.arrow(name).source, self.presentation.arrow(name).target, vec)
                for name, vec in self.arrow_elements
            )
        p = self.p
        rad = self.radical_basis
        rad2 = la.row_basis(self.products(rad, rad), p) if rad.shape[0] else rad
        gens: List[Generator] = []
        for s, es in self.idempotents:
            for t, et in self.idempotents:
                sandwich = la.mul(self.left_matrix(es), self.right_matrix(et), p)
                space = la.row_basis(la.mul(rad, sandwich, p), p) if rad.shape[0] else rad
                if space.shape[0] == 0:
                    continue
                acc = la.row_basis(la.mul(rad2, sandwich, p), p) if rad2.shape[0] else np.zeros((0, self.dim), dtype=np.int64)
                k = 0
                for row in space:
                    trial = la.vstack([acc, row.reshape(1, -1)])
                    if la.rank(trial, p) > acc.shape[0]:
                        acc = trial
                        nz = np.nonzero(row)[0]
                        if nz.size == 1 and row[nz[0]] == 1:
                            name = self.basis_labels[nz[0]]
                        else:
                            name = f"g[{s},{t}]{k}"
                        gens.append(Generator(name, s, t, row.copy()))
                        k += 1
        return tuple(gens)

    @cached_property
    def word_basis(self) -> Tuple[Tuple[Tuple[int, Tuple[int, ...]], ...], np.ndarray]:
        """Words e_v g_1 ... g_k spanning the algebra and the inverse change of basis.

        Returns (words, coeffs) where basis element i equals
        sum_k coeffs[i, k] * word_k.
        """
        p = self.p
        gens = self.generators
        words: List[Tuple[int, Tuple[int, ...]]] = []
        rows: List[np.ndarray] = []
        frontier: List[Tuple[int, Tuple[int, ...], np.ndarray, str]] = []
        for vi, (v, ev) in enumerate(self.idempotents):
            frontier.append((vi, (), ev, v))
        current = np.zeros((0, self.dim), dtype=np.int64)
        while frontier and current.shape[0] < self.dim:
            nxt = []
            for vi, gw, vec, end in frontier:
                if not np.any(vec):
                    continue
                trial = la.vstack([current, vec.reshape(1, -1)])
                if la.rank(trial, p) == current.shape[0]:
                    continue
                current = trial
                words.append((vi, gw))
                rows.append(vec)
                for gi, g in enumerate(gens):
                    if g.source == end:
                        nxt.append((vi, gw + (gi,), self.product(vec, g.vector), g.target))
            frontier = nxt
        if current.shape[0] < self.dim:
            raise InvariantViolation("generation", f"idempotents and generators span {current.shape[0]} of {self.dim}")
        w = np.vstack(rows)
        return tuple(words), la.inverse(w, p)

    # Invariants

    def check_invariants(self) -> Dict[str, bool]:
        p, d = self.p, self.dim
        results: Dict[str, bool] = {}
        m = self.mult % p
        lhs = np.einsum("ijm,mkl->ijkl", m, m) % p
        rhs = np.einsum("jkm,iml->ijkl", m, m) % p
        results["associative"] = bool(np.array_equal(lhs, rhs))
        eye = np.eye(d, dtype=np.int64)
        results["unit"] = bool(
            np.array_equal(self.left_matrix(self.unit), eye) and np.array_equal(self.right_matrix(self.unit), eye)
        )
        ok = True
        total = np.zeros(d, dtype=np.int64)
        for i, (_, ei) in enumerate(self.idempotents):
            total = (total + ei) % p
            for j, (_, ej) in enumerate(self.idempotents):
                prod = self.product(ei, ej)
                expected = ei % p if i == j else np.zeros(d, dtype=np.int64)
                ok = ok and np.array_equal(prod, expected)
        results["idempotents"] = bool(ok and np.array_equal(total, self.unit % p))
        rad = self.radical_basis
        if rad.shape[0]:
            left = self.products(np.eye(d, dtype=np.int64), rad)
            right = self.products(rad, np.eye(d, dtype=np.int64))
            results["radical_ideal"] = la.rank(la.vstack([rad, left, right]), p) == la.rank(rad, p)
            power, nilpotent = rad, False
            for _ in range(d + 1):
                power = la.row_basis(self.products(power, rad), p)
                if power.shape[0] == 0:
                    nilpotent = True
                    break
            results["radical_nilpotent"] = nilpotent
        else:
            results["radical_ideal"] = True
            results["radical_nilpotent"] = True
        results["split_basic"] = d - la.rank(rad, p) == len(self.idempotents) and rad.shape[0] == la.rank(rad, p)
        return results

    def verify(self) -> "Algebra":
        for name, ok in self.check_invariants().items():
            if not ok:
                raise InvariantViolation(name, repr(self))
        return self


@dataclass(frozen=True, eq=False)
class AlgebraMap:
    """Algebra homomorphism as a dim(source) x dim(target) matrix"""

    source: Algebra
    target: Algebra
    matrix: np.ndarray
    section: Optional[np.ndarray] = None

    def apply(self, x: np.ndarray) -> np.ndarray:
        return la.mul(x.reshape(1, -1), self.matrix, self.target.p)[0]

    def check(self) -> Dict[str, bool]:
        src, tgt, p = self.source, self.target, self.target.p
        images = self.matrix % p
        lhs = np.einsum("ijk,kl->ijl", src.mult, images) % p
        rhs = np.einsum("ia,jb,abl->ijl", images, images, tgt.mult) % p
        results = {
            "multiplicative": bool(np.array_equal(lhs, rhs)),
            "unital": bool(np.array_equal(self.apply(src.unit), tgt.unit % p)),
        }
        ok = True
        for _, e in src.idempotents:
            fe = self.apply(e)
            ok = ok and np.array_equal(tgt.product(fe, fe), fe)
        results["idempotents"] = bool(ok)
        return results

    def verify(self) -> "AlgebraMap":
        for name, ok in self.check().items():
            if not ok:
                raise InvariantViolation(f"algebra map {name}")
        return self

    def is_isomorphism(self) -> bool:
        return self.source.dim == self.target.dim and la.is_invertible(self.matrix, self.target.p) and all(self.check().values())


@dataclass(frozen=True, eq=False)
class BimoduleData:
    """Bimodule over (left_algebra, right_algebra) in row convention.

    The right action is multiplicative; the left action is an
    anti-homomorphism, i.e. a right action of the opposite algebra.
    """

    left_algebra: Algebra
    right_algebra: Algebra
    dim: int
    left_action: np.ndarray
    right_action: np.ndarray

    def left(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("i,ijk->jk", x, self.left_action) % self.left_algebra.p

    def right(self, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,ijk->jk", y, self.right_action) % self.right_algebra.p

    def check(self) -> Dict[str, bool]:
        a, b = self.left_algebra, self.right_algebra
        p = a.p
        n = self.dim
        lam = self.left_action % p
        rho = self.right_action % p
        eye = np.eye(n, dtype=np.int64)
        results = {
            "shapes": lam.shape == (a.dim, n, n) and rho.shape == (b.dim, n, n),
        }
        if not results["shapes"]:
            return results
        lhs = np.einsum("ijk,kab->ijab", a.mult, lam) % p
        rhs = np.einsum("jac,icb->ijab", lam, lam) % p
        results["left_anti_multiplicative"] = bool(np.array_equal(lhs, rhs))
        results["left_unital"] = bool(np.array_equal(self.left(a.unit), eye))
        lhs = np.einsum("ijk,kab->ijab", b.mult, rho) % p
        rhs = np.einsum("iac,jcb->ijab", rho, rho) % p
        results["right_multiplicative"] = bool(np.array_equal(lhs, rhs))
        results["right_unital"] = bool(np.array_equal(self.right(b.unit), eye))
        lr = np.einsum("iac,jcb->ijab", lam, rho) % p
        rl = np.einsum("jac,icb->ijab", rho, lam) % p
        results["actions_commute"] = bool(np.array_equal(lr, rl))
        return results

    def verify(self) -> "BimoduleData":
        failed = [k for k, ok in self.check().items() if not ok]
        if failed:
            raise BimoduleMismatch(f"bimodule checks failed: {failed}")
        return self


def zero_bimodule(left: Algebra, right: Algebra) -> BimoduleData:
    return BimoduleData(
        left, right, 0,
        np.zeros((left.dim, 0, 0), dtype=np.int64),
        np.zeros((right.dim, 0, 0), dtype=np.int64),
    )


def regular_bimodule(a: Algebra) -> BimoduleData:
    """The algebra as a bimodule over itself"""
    lam = np.stack([a.left_matrix(a.basis_vector(i)) for i in range(a.dim)]) if a.dim else np.zeros((0, 0, 0), dtype=np.int64)
    rho = np.stack([a.right_matrix(a.basis_vector(i)) for i in range(a.dim)]) if a.dim else np.zeros((0, 0, 0), dtype=np.int64)
    return BimoduleData(a, a, a.dim, lam, rho)


# Constructors

def _path_label(arrows: Tuple[str, ...], vertex: Optional[str] = None) -> str:
    if not arrows:
        return f"e_{vertex}"
    return "*".join(arrows)


def build_from_presentation(q: QuiverPresentation, field: Field) -> Algebra:
    """Basis, structure constants and radical of kQ/I under the bound L"""
    p = field.p
    L = q.nilpotency_bound
    vertex_set = set(q.vertices)
    for a in q.arrows:
        if a.source not in vertex_set or a.target not in vertex_set:
            raise UnknownVertex(f"arrow {a.name!r} has an endpoint outside the vertex set")
    arrow_by_name = {a.name: a for a in q.arrows}
    if len(arrow_by_name) != len(q.arrows):
        raise NonAdmissible("arrow names must be distinct")

    # paths: (source, target, arrows)
    paths: List[Tuple[str, str, Tuple[str, ...]]] = [(v, v, ()) for v in q.vertices]
    layer = list(paths)
    for _ in range(L):
        nxt = []
        for s, t, w in layer:
            for a in q.arrows:
                if a.source == t:
                    nxt.append((s, a.target, w + (a.name,)))
        paths.extend(nxt)
        layer = nxt
    index = {(s, t, w): i for i, (s, t, w) in enumerate(paths)}
    n_paths = len(paths)
    logger.debug(f"enumerated {n_paths} paths of length <= {L}")

    def concat(i: int, j: int) -> Optional[int]:
        s1, t1, w1 = paths[i]
        s2, t2, w2 = paths[j]
        if t1 != s2 or len(w1) + len(w2) > L:
            return None
        return index[(s1, t2, w1 + w2)]

    rel_rows = []
    for ri, rel in enumerate(q.relations):
        if not rel:
            raise RelationEndpointMismatch(ri, "empty relation")
        row = np.zeros(n_paths, dtype=np.int64)
        ends = set()
        for coeff, path in rel:
            if not path:
                raise RelationEndpointMismatch(ri, "relation summand with an empty path")
            try:
                seq = [arrow_by_name[name] for name in path]
            except KeyError as exc:
                raise RelationEndpointMismatch(ri, f"unknown arrow {exc.args[0]!r}")
            for x, y in zip(seq, seq[1:]):
                if x.target != y.source:
                    raise RelationEndpointMismatch(ri, f"arrows {x.name!r} and {y.name!r} do not compose")
            ends.add((seq[0].source, seq[-1].target))
            if len(path) <= L:
                key = (seq[0].source, seq[-1].target, tuple(path))
                row[index[key]] = (row[index[key]] + coeff) % p
        if len(ends) > 1:
            raise RelationEndpointMismatch(ri, f"summands are not parallel: {sorted(ends)}")
        rel_rows.append(row)

    # right and left multiplication by arrows on the truncated path space
    def mult_matrix(arrow_index: int, side: str) -> np.ndarray:
        m = np.zeros((n_paths, n_paths), dtype=np.int64)
        for i in range(n_paths):
            k = concat(i, arrow_index) if side == "right" else concat(arrow_index, i)
            if k is not None:
                m[i, k] = 1
        return m

    arrow_path_idx = [index[(a.source, a.target, (a.name,))] for a in q.arrows] if L >= 1 else []
    movers = [mult_matrix(k, "right") for k in arrow_path_idx] + [mult_matrix(k, "left") for k in arrow_path_idx]

    # column order: longest paths first so pivots land on long paths
    order = sorted(range(n_paths), key=lambda i: (-len(paths[i][2]), i))
    perm = np.array(order, dtype=np.int64)

    ideal = la.row_basis(np.vstack(rel_rows), p) if rel_rows else np.zeros((0, n_paths), dtype=np.int64)
    while True:
        grown = [ideal] + [la.mul(ideal, mv, p) for mv in movers] if ideal.shape[0] else [ideal]
        new = la.row_basis(la.vstack(grown), p) if ideal.shape[0] else ideal
        if new.shape[0] == ideal.shape[0]:
            break
        ideal = new

    permuted = ideal[:, perm] if ideal.shape[0] else np.zeros((0, n_paths), dtype=np.int64)
    reduced, pivots = la.rref(permuted, p) if permuted.shape[0] else (permuted, [])
    pivot_paths = {order[c] for c in pivots}

    for i, (s, t, w) in enumerate(paths):
        if len(w) == L and i not in pivot_paths:
            raise NonAdmissible(f"path {_path_label(w)} of length {L} is not in the relation ideal")
    short = [i for i, (_, _, w) in enumerate(paths) if len(w) <= 1]
    if ideal.shape[0] and np.any(ideal[:, short]):
        raise NonAdmissible("relation ideal meets the span of vertices and arrows")

    basis_idx = sorted(
        (i for i in range(n_paths) if i not in pivot_paths),
        key=lambda i: (len(paths[i][2]), i),
    )
    d = len(basis_idx)
    pos = {i: k for k, i in enumerate(basis_idx)}
    inv_perm = np.argsort(perm)

    def normal_form(rows: np.ndarray) -> np.ndarray:
        """Coordinates in the chosen path basis of vectors over the path space"""
        if reduced.shape[0]:
            pr = rows[:, perm]
            pr = (pr - pr[:, pivots] @ reduced) % p
            rows = pr[:, inv_perm]
        return rows[:, basis_idx] % p

    pair_rows = np.zeros((d * d, n_paths), dtype=np.int64)
    for a_, i in enumerate(basis_idx):
        for b_, j in enumerate(basis_idx):
            k = concat(i, j)
            if k is not None:
                pair_rows[a_ * d + b_, k] = 1
    mult = normal_form(pair_rows).reshape(d, d, d)

    labels = tuple(_path_label(paths[i][2], paths[i][0]) for i in basis_idx)
    idempotents = tuple((v, np.eye(d, dtype=np.int64)[pos[index[(v, v, ())]]]) for v in q.vertices)
    unit = np.sum([e for _, e in idempotents], axis=0) % p
    radical = np.eye(d, dtype=np.int64)[[pos[i] for i in basis_idx if paths[i][2]]]
    arrow_elements = tuple(
        (a.name, normal_form(np.eye(n_paths, dtype=np.int64)[[k]])[0]) for a, k in zip(q.arrows, arrow_path_idx)
    )
    alg = Algebra(
        field=field,
        basis_labels=labels,
        mult=mult,
        unit=unit,
        idempotents=idempotents,
        radical_basis=radical.reshape(-1, d),
        provenance=Provenance.QUIVER,
        presentation=q,
        arrow_elements=arrow_elements,
    )
    logger.debug(f"built quiver algebra of dimension {d} from {len(q.relations)} relations")
    return alg.verify()


def _sub_labels(a: Algebra, basis: np.ndarray, prefix: str) -> Tuple[str, ...]:
    labels = []
    for k, row in enumerate(basis):
        nz = np.nonzero(row)[0]
        if nz.size == 1 and row[nz[0]] == 1:
            labels.append(a.basis_labels[nz[0]])
        else:
            labels.append(f"{prefix}{k}")
    return tuple(labels)


def _check_verts(a: Algebra, verts: Iterable[str]) -> List[str]:
    verts = list(dict.fromkeys(verts))
    for v in verts:
        if v not in a.vertices:
            raise UnknownVertex(f"{v!r} is not a vertex of {a!r}")
    return verts


def corner(a: Algebra, verts: Iterable[str]) -> Tuple[Algebra, AlgebraMap]:
    """eAe for e the sum of the given vertex idempotents, with its inclusion"""
    verts = _check_verts(a, verts)
    if not verts:
        raise EmptyVertexSet("corner algebra needs at least one vertex")
    p = a.p
    e = a.vertex_sum(verts)
    sandwich = la.mul(a.left_matrix(e), a.right_matrix(e), p)
    incl = la.row_basis(sandwich, p)
    k = incl.shape[0]
    images = a.products(incl, incl)
    mult = la.solve(incl, images, p).reshape(k, k, k)
    unit = la.solve(incl, e.reshape(1, -1), p)[0]
    idems = tuple((v, la.solve(incl, a.idempotent(v).reshape(1, -1), p)[0]) for v in verts)
    rad_rows = la.row_basis(la.mul(a.radical_basis, sandwich, p), p) if a.radical_basis.shape[0] else np.zeros((0, a.dim), dtype=np.int64)
    rad = la.solve(incl, rad_rows, p) if rad_rows.shape[0] else np.zeros((0, k), dtype=np.int64)
    c = Algebra(
        field=a.field,
        basis_labels=_sub_labels(a, incl, "c"),
        mult=mult,
        unit=unit,
        idempotents=idems,
        radical_basis=rad,
        provenance=Provenance.CORNER,
    ).verify()
    logger.debug(f"corner algebra at {verts}: dimension {k}")
    return c, AlgebraMap(c, a, incl).verify()


def ideal_basis(a: Algebra, verts: Iterable[str]) -> np.ndarray:
    """Rows spanning the two-sided ideal AeA"""
    verts = _check_verts(a, verts)
    if not verts:
        return np.zeros((0, a.dim), dtype=np.int64)
    e = a.vertex_sum(verts)
    e_a = la.row_basis(a.left_matrix(e), a.p)
    return la.row_basis(a.products(np.eye(a.dim, dtype=np.int64), e_a), a.p)


def quotient_by_idempotent_ideal(a: Algebra, verts: Iterable[str]) -> Tuple[Algebra, AlgebraMap]:
    """A/AeA with its projection; the map also records a linear section"""
    verts = _check_verts(a, verts)
    p = a.p
    ideal = ideal_basis(a, verts)
    r = ideal.shape[0]
    comp = la.complement_basis(ideal, a.dim, p)
    change = la.vstack([ideal, comp]) if r else comp
    proj = la.inverse(change, p)[:, r:]
    k = comp.shape[0]
    mult = la.mul(a.products(comp, comp), proj, p).reshape(k, k, k)
    survivors = [v for v in a.vertices if v not in verts]
    idems = tuple((v, la.mul(a.idempotent(v).reshape(1, -1), proj, p)[0]) for v in survivors)
    rad = la.row_basis(la.mul(a.radical_basis, proj, p), p) if a.radical_basis.shape[0] else np.zeros((0, k), dtype=np.int64)
    qa = Algebra(
        field=a.field,
        basis_labels=_sub_labels(a, comp, "q"),
        mult=mult,
        unit=la.mul(a.unit.reshape(1, -1), proj, p)[0],
        idempotents=idems,
        radical_basis=rad,
        provenance=Provenance.QUOTIENT,
    ).verify()
    logger.debug(f"quotient by the ideal of {verts}: ideal {r}, quotient {k}")
    return qa, AlgebraMap(a, qa, proj, section=comp).verify()


def opposite(a: Algebra) -> Algebra:
    op = Algebra(
        field=a.field,
        basis_labels=a.basis_labels,
        mult=np.ascontiguousarray(np.transpose(a.mult, (1, 0, 2))),
        unit=a.unit,
        idempotents=a.idempotents,
        radical_basis=a.radical_basis,
        provenance=Provenance.OPPOSITE,
    )
    op.__dict__["opposite"] = a
    return op


def tensor(a: Algebra, b: Algebra) -> Algebra:
    """a (x) b over the common prime field"""
    if a.field != b.field:
        raise AlgebraMismatch("tensor product needs a common field")
    p = a.p
    d = a.dim * b.dim
    mult = np.einsum("ijk,lmn->iljmkn", a.mult, b.mult).reshape(d, d, d) % p
    labels = tuple(f"{x}|{y}" for x in a.basis_labels for y in b.basis_labels)
    idems = tuple(
        (f"{u},{w}", np.kron(eu, ew) % p) for u, eu in a.idempotents for w, ew in b.idempotents
    )
    rows = []
    eye_a = np.eye(a.dim, dtype=np.int64)
    eye_b = np.eye(b.dim, dtype=np.int64)
    for r in a.radical_basis:
        rows.extend(np.kron(r, y) for y in eye_b)
    for r in b.radical_basis:
        rows.extend(np.kron(x, r) for x in eye_a)
    rad = la.row_basis(np.array(rows, dtype=np.int64), p) if rows else np.zeros((0, d), dtype=np.int64)
    return Algebra(
        field=a.field,
        basis_labels=labels,
        mult=mult,
        unit=np.kron(a.unit, b.unit) % p,
        idempotents=idems,
        radical_basis=rad,
        provenance=Provenance.TENSOR,
    ).verify()


def morita_ring(a: Algebra, b: Algebra, m: BimoduleData, n: BimoduleData) -> Algebra:
    """Morita context ring (a n; m b) with zero bimodule maps.

    Underlying space a + n + m + b; N.M and M.N vanish.
    """
    if a.field != b.field:
        raise BimoduleMismatch("A and B live over different fields")
    if m.left_algebra is not b or m.right_algebra is not a:
        raise BimoduleMismatch("M must be a B-A-bimodule")
    if n.left_algebra is not a or n.right_algebra is not b:
        raise BimoduleMismatch("N must be an A-B-bimodule")
    m.verify()
    n.verify()
    p = a.p
    blocks = MoritaBlocks(a, b, m, n)
    off = blocks.offsets
    d = off["b"][1]
    mult = np.zeros((d, d, d), dtype=np.int64)

    def sl(key):
        return slice(*off[key])

    mult[sl("a"), sl("a"), sl("a")] = a.mult
    mult[sl("b"), sl("b"), sl("b")] = b.mult
    # a_i * n_k = n_k . lambda_N(a_i)
    for i in range(a.dim):
        mult[off["a"][0] + i, sl("n"), sl("n")] = n.left_action[i]
    # n_k * b_j = n_k . rho_N(b_j)
    for j in range(b.dim):
        mult[sl("n"), off["b"][0] + j, sl("n")] = n.right_action[j]
    # m_k * a_i = m_k . rho_M(a_i)
    for i in range(a.dim):
        mult[sl("m"), off["a"][0] + i, sl("m")] = m.right_action[i]
    # b_j * m_k = m_k . lambda_M(b_j)
    for j in range(b.dim):
        mult[off["b"][0] + j, sl("m"), sl("m")] = m.left_action[j]

    def embed(vec: np.ndarray, key: str) -> np.ndarray:
        out = np.zeros(d, dtype=np.int64)
        out[sl(key)] = vec
        return out

    labels = (
        tuple(f"a:{x}" for x in a.basis_labels)
        + tuple(f"n:{k}" for k in range(n.dim))
        + tuple(f"m:{k}" for k in range(m.dim))
        + tuple(f"b:{y}" for y in b.basis_labels)
    )
    idems = tuple((f"a:{v}", embed(e, "a")) for v, e in a.idempotents) + tuple(
        (f"b:{v}", embed(e, "b")) for v, e in b.idempotents
    )
    rad_rows = [embed(r, "a") for r in a.radical_basis]
    rad_rows += list(np.eye(d, dtype=np.int64)[off["n"][0] : off["m"][1]])
    rad_rows += [embed(r, "b") for r in b.radical_basis]
    rad = np.array(rad_rows, dtype=np.int64).reshape(-1, d)
    unit = (embed(a.unit, "a") + embed(b.unit, "b")) % p
    ring = Algebra(
        field=a.field,
        basis_labels=labels,
        mult=mult % p,
        unit=unit,
        idempotents=idems,
        radical_basis=rad,
        provenance=Provenance.MORITA,
        morita=blocks,
    ).verify()
    logger.debug(f"Morita ring of dimension {d} (A {a.dim}, N {n.dim}, M {m.dim}, B {b.dim})")
    return ring


def algebra_map_from_generators(
    source: Algebra,
    target: Algebra,
    generator_images: Mapping[str, np.ndarray],
    vertex_images: Mapping[str, np.ndarray],
) -> AlgebraMap:
    """Extend images of vertices and generators multiplicatively and verify"""
    if source.field != target.field:
        raise AlgebraMismatch("algebra map between different fields")
    p = target.p
    words, coeffs = source.word_basis
    gens = source.generators
    word_images = []
    for vi, gw in words:
        x = np.asarray(vertex_images[source.vertices[vi]], dtype=np.int64) % p
        for gi in gw:
            x = target.product(x, np.asarray(generator_images[gens[gi].name], dtype=np.int64))
        word_images.append(x)
    matrix = la.mul(coeffs, np.vstack(word_images), p)
    return AlgebraMap(source, target, matrix).verify()

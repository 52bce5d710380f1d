"""
Idempotent recollement (mod A/AeA, mod A, mod eAe): the six functors, units and
counits, the sequences built from them, exactness detection, and the Morita
ring layer
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import exactla as la
from algebra import Algebra, AlgebraMap, BimoduleData, corner, ideal_basis, quotient_by_idempotent_ideal
from errors import (
    AlgebraMismatch,
    BimoduleMismatch,
    EmptyVertexSet,
    InvariantViolation,
    LNotExact,
    NotExact,
    NotMoritaProvenance,
    ProbeCriterionDisagreement,
    QNotExact,
)
from modcat import (
    ExactChain,
    ExceedsCap,
    Module,
    Morphism,
    PdValue,
    ShortExact,
    find_iso,
    hom_basis,
    hom_dim,
    image,
    is_projective,
    kernel,
    pd,
    projective,
    quotient,
    random_module,
    random_ses,
    regular,
    resolution_maps,
    restrict_scalars,
    submodule,
    syzygy_n,
    tensor_over,
    tor_dim,
    zero_module,
)
from models import Caps
from syzygylab import apply_to_chain, normalize_tail, rotate_ses, splice

logger = logging.getLogger(__name__)

P_FORMULA_WARNING = (
    "p is computed as the annihilator of the ideal AeA, the right adjoint of i; "
    "the p-exactness bit still refers to AeA being a projective right module"
)
REPEATED_TERM_WARNING = "lifted chain read as l(W_n) -> l(W_(n-1)) -> ... (repeated first term normalised)"


@dataclass(frozen=True, eq=False)
class FunctorHandle:
    """A functor between module categories given by its object and morphism maps"""

    name: str
    source: Algebra
    target: Algebra
    on_objects: Callable[[Module], Module]
    on_morphisms: Callable[[Morphism], Morphism]

    def apply(self, m: Module) -> Module:
        if m.algebra is not self.source:
            raise AlgebraMismatch(f"functor {self.name} applied to a module over another algebra")
        return self.on_objects(m)

    def apply_map(self, f: Morphism) -> Morphism:
        return self.on_morphisms(f)


def _restricted_action(m: Module, rows: np.ndarray, elements: np.ndarray) -> np.ndarray:
    """Action of the given algebra elements on the invariant subspace spanned by rows"""
    p, k = m.p, rows.shape[0]
    count = elements.shape[0]
    if k == 0:
        return np.zeros((count, 0, 0), dtype=np.int64)
    images = np.einsum("ra,jab->jrb", rows, m.act_many(elements)) % p
    return la.solve(rows, images.reshape(-1, m.dim), p).reshape(count, k, k)


@dataclass(frozen=True, eq=False)
class Recollement:
    """Data of the recollement induced by the idempotent e = sum of the given vertices"""

    algebra: Algebra
    verts: Tuple[str, ...]
    e: np.ndarray
    corner_algebra: Algebra
    inclusion: AlgebraMap
    quotient_algebra: Algebra
    projection: AlgebraMap
    ideal: np.ndarray
    degenerate: bool

    @cached_property
    def e_lambda_rows(self) -> np.ndarray:
        """Basis of eA in algebra coordinates"""
        return la.row_basis(self.algebra.left_matrix(self.e), self.algebra.p)

    @cached_property
    def lambda_e_rows(self) -> np.ndarray:
        """Basis of Ae in algebra coordinates"""
        return la.row_basis(self.algebra.right_matrix(self.e), self.algebra.p)

    def _coordinates(self, rows: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
        p = self.algebra.p
        k = rows.shape[0]
        if k == 0:
            return np.zeros((len(mats), 0, 0), dtype=np.int64)
        return np.stack([la.solve(rows, la.mul(rows, mat, p), p) for mat in mats])

    @cached_property
    def e_lambda(self) -> BimoduleData:
        """eA as an (eAe, A)-bimodule"""
        a, c = self.algebra, self.corner_algebra
        rows = self.e_lambda_rows
        left = self._coordinates(rows, [a.left_matrix(x) for x in self.inclusion.matrix])
        right = self._coordinates(rows, [a.right_matrix(a.basis_vector(i)) for i in range(a.dim)])
        return BimoduleData(c, a, rows.shape[0], left, right)

    @cached_property
    def lambda_e(self) -> BimoduleData:
        """Ae as an (A, eAe)-bimodule"""
        a, c = self.algebra, self.corner_algebra
        rows = self.lambda_e_rows
        left = self._coordinates(rows, [a.left_matrix(a.basis_vector(i)) for i in range(a.dim)])
        right = self._coordinates(rows, [a.right_matrix(x) for x in self.inclusion.matrix])
        return BimoduleData(a, c, rows.shape[0], left, right)

    @cached_property
    def e_lambda_module(self) -> Module:
        """eA as a left eAe-module, i.e. over the opposite corner"""
        return Module(self.corner_algebra.opposite, self.e_lambda.left_action, "eA")

    @cached_property
    def lambda_e_module(self) -> Module:
        """Ae as a right eAe-module"""
        return Module(self.corner_algebra, self.lambda_e.right_action, "Ae")

    @cached_property
    def ideal_module(self) -> Module:
        return submodule(regular(self.algebra), self.ideal)[0].named("AeA")

    @cached_property
    def quotient_left_module(self) -> Module:
        """A/AeA as a left A-module, i.e. over the opposite algebra"""
        a, p = self.algebra, self.algebra.p
        sec, proj = self.projection.section, self.projection.matrix
        k = self.quotient_algebra.dim
        if k == 0:
            return zero_module(a.opposite)
        action = np.stack([la.mul_chain([sec, a.left_matrix(a.basis_vector(i)), proj], p) for i in range(a.dim)])
        return Module(a.opposite, action, "A/AeA")

    # Hypothesis criteria

    @cached_property
    def l_exact(self) -> bool:
        """l is exact iff eA is a projective left eAe-module"""
        return is_projective(self.e_lambda_module)

    @cached_property
    def q_exact(self) -> bool:
        """q is exact iff A/AeA is a projective left A-module"""
        return is_projective(self.quotient_left_module)

    @cached_property
    def p_exact(self) -> bool:
        """Hom(AeA, -) is exact iff AeA is a projective right A-module"""
        return is_projective(self.ideal_module)

    @cached_property
    def i_preserves_projectives(self) -> bool:
        """i sends projectives to projectives iff A/AeA is a projective right A-module"""
        return is_projective(functor_i(self, regular(self.quotient_algebra)))

    def handle(self, name: str) -> FunctorHandle:
        a, c, q = self.algebra, self.corner_algebra, self.quotient_algebra
        table = {
            "e": (a, c, lambda m: functor_e(self, m), lambda f: map_e(self, f)),
            "i": (q, a, lambda m: functor_i(self, m), lambda f: map_i(self, f)),
            "q": (a, q, lambda m: functor_q(self, m), lambda f: map_q(self, f)),
            "p": (a, q, lambda m: functor_p(self, m), lambda f: map_p(self, f)),
            "l": (c, a, lambda m: functor_l(self, m), lambda f: map_l(self, f)),
            "r": (c, a, lambda m: functor_r(self, m), lambda f: map_r(self, f)),
        }
        src, tgt, obj, mor = table[name]
        return FunctorHandle(name, src, tgt, obj, mor)


def build(a: Algebra, verts) -> Recollement:
    """Corner, quotient and ideal of the idempotent given by a vertex set"""
    verts = tuple(verts)
    if not verts:
        raise EmptyVertexSet("the idempotent needs at least one vertex")
    c, inc = corner(a, verts)
    qa, proj = quotient_by_idempotent_ideal(a, verts)
    ideal = ideal_basis(a, verts)
    if ideal.shape[0] + qa.dim != a.dim:
        raise InvariantViolation("recollement", f"ideal {ideal.shape[0]} + quotient {qa.dim} != {a.dim}")
    degenerate = set(verts) == set(a.vertices)
    if degenerate:
        logger.warning(f"idempotent of {list(verts)} is the unit: the quotient category is zero")
    logger.info(f"recollement at {list(verts)}: corner {c.dim}, quotient {qa.dim}, ideal {ideal.shape[0]}")
    return Recollement(a, verts, a.vertex_sum(verts), c, inc, qa, proj, ideal, degenerate)


def _expect(m: Module, a: Algebra, what: str) -> None:
    if m.algebra is not a:
        raise AlgebraMismatch(f"{what} expects a module over {a!r}")


# The six functors

@lru_cache(maxsize=4096)
def _e_rows(r: Recollement, m: Module) -> np.ndarray:
    return la.row_basis(m.act(r.e), m.p) if m.dim else np.zeros((0, 0), dtype=np.int64)


@lru_cache(maxsize=4096)
def functor_e(r: Recollement, m: Module) -> Module:
    """m.e with the action of eAe"""
    _expect(m, r.algebra, "e")
    rows = _e_rows(r, m)
    action = _restricted_action(m, rows, r.inclusion.matrix)
    return Module(r.corner_algebra, action, f"e({m.name or 'M'})")


def map_e(r: Recollement, f: Morphism) -> Morphism:
    src, tgt = functor_e(r, f.source), functor_e(r, f.target)
    rows_s, rows_t = _e_rows(r, f.source), _e_rows(r, f.target)
    return Morphism(src, tgt, la.solve(rows_t, la.mul(rows_s, f.matrix, f.p), f.p))


@lru_cache(maxsize=4096)
def functor_i(r: Recollement, n: Module) -> Module:
    """Inflation along A -> A/AeA"""
    _expect(n, r.quotient_algebra, "i")
    if n.dim == 0:
        return zero_module(r.algebra)
    return restrict_scalars(n, r.projection).named(f"i({n.name or 'N'})")


def map_i(r: Recollement, f: Morphism) -> Morphism:
    return Morphism(functor_i(r, f.source), functor_i(r, f.target), f.matrix)


@lru_cache(maxsize=4096)
def _q_parts(r: Recollement, m: Module) -> Tuple[Module, np.ndarray, np.ndarray]:
    _expect(m, r.algebra, "q")
    p = m.p
    if r.ideal.shape[0] and m.dim:
        rows = la.row_basis(m.act_many(r.ideal).reshape(-1, m.dim), p)
    else:
        rows = np.zeros((0, m.dim), dtype=np.int64)
    top_part, proj, sec = quotient(m, rows)
    qa = r.quotient_algebra
    action = top_part.act_many(r.projection.section) if top_part.dim else np.zeros((qa.dim, 0, 0), dtype=np.int64)
    return Module(qa, action, f"q({m.name or 'M'})"), proj.matrix, sec


def functor_q(r: Recollement, m: Module) -> Module:
    """m / m.AeA over A/AeA"""
    return _q_parts(r, m)[0]


def map_q(r: Recollement, f: Morphism) -> Morphism:
    src, _, sec = _q_parts(r, f.source)
    tgt, proj, _ = _q_parts(r, f.target)
    return Morphism(src, tgt, la.mul_chain([sec, f.matrix, proj], f.p))


@lru_cache(maxsize=4096)
def _p_rows(r: Recollement, m: Module) -> np.ndarray:
    _expect(m, r.algebra, "p")
    if not r.ideal.shape[0]:
        return np.eye(m.dim, dtype=np.int64)
    if m.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return la.kernel_basis(la.hstack(list(m.act_many(r.ideal))), m.p)


@lru_cache(maxsize=4096)
def functor_p(r: Recollement, m: Module) -> Module:
    """Largest submodule of m annihilated by AeA, over A/AeA"""
    rows = _p_rows(r, m)
    action = _restricted_action(m, rows, r.projection.section)
    return Module(r.quotient_algebra, action, f"p({m.name or 'M'})")


def map_p(r: Recollement, f: Morphism) -> Morphism:
    rows_s, rows_t = _p_rows(r, f.source), _p_rows(r, f.target)
    return Morphism(functor_p(r, f.source), functor_p(r, f.target), la.solve(rows_t, la.mul(rows_s, f.matrix, f.p), f.p))


@lru_cache(maxsize=4096)
def _l_parts(r: Recollement, y: Module):
    _expect(y, r.corner_algebra, "l")
    a, p = r.algebra, r.algebra.p
    bt = tensor_over(y, r.e_lambda_module)
    eye = np.eye(y.dim, dtype=np.int64)
    if bt.dim:
        action = np.stack([bt.induced(bt, eye, r.e_lambda.right_action[i]) for i in range(a.dim)]) % p
    else:
        action = np.zeros((a.dim, 0, 0), dtype=np.int64)
    return Module(a, action, f"l({y.name or 'Y'})"), bt


def functor_l(r: Recollement, y: Module) -> Module:
    """y (x)_eAe eA"""
    return _l_parts(r, y)[0]


def map_l(r: Recollement, f: Morphism) -> Morphism:
    src, bt_s = _l_parts(r, f.source)
    tgt, bt_t = _l_parts(r, f.target)
    eye = np.eye(r.e_lambda_rows.shape[0], dtype=np.int64)
    return Morphism(src, tgt, bt_s.induced(bt_t, f.matrix, eye))


@lru_cache(maxsize=4096)
def _r_parts(r: Recollement, y: Module):
    _expect(y, r.corner_algebra, "r")
    a, p = r.algebra, r.algebra.p
    homs = hom_basis(r.lambda_e_module, y)
    h = len(homs)
    if h == 0:
        return zero_module(a), np.zeros((0, r.lambda_e_rows.shape[0] * y.dim), dtype=np.int64)
    flat = np.stack([f.matrix.reshape(-1) for f in homs])
    mats = []
    for i in range(a.dim):
        lam = r.lambda_e.left_action[i]
        images = np.stack([la.mul(lam, f.matrix, p).reshape(-1) for f in homs])
        mats.append(la.solve(flat, images, p))
    return Module(a, np.stack(mats), f"r({y.name or 'Y'})"), flat


def functor_r(r: Recollement, y: Module) -> Module:
    """Hom_eAe(Ae, y) with (f.b)(x) = f(b x)"""
    return _r_parts(r, y)[0]


def map_r(r: Recollement, g: Morphism) -> Morphism:
    src, flat_s = _r_parts(r, g.source)
    tgt, flat_t = _r_parts(r, g.target)
    p = g.p
    k = r.lambda_e_rows.shape[0]
    if src.dim == 0:
        return Morphism(src, tgt, np.zeros((0, tgt.dim), dtype=np.int64))
    images = np.stack([la.mul(row.reshape(k, -1), g.matrix, p).reshape(-1) for row in flat_s])
    return Morphism(src, tgt, la.solve(flat_t, images, p))


# Units, counits and the sequences they give

def counit_mu(r: Recollement, b: Module) -> Morphism:
    """le(b) -> b, y (x) z -> y z"""
    p = b.p
    eb = functor_e(r, b)
    leb, bt = _l_parts(r, eb)
    if leb.dim == 0:
        return Morphism(leb, b, np.zeros((0, b.dim), dtype=np.int64))
    rows = _e_rows(r, b)
    products = np.einsum("ia,jab->ijb", rows, b.act_many(r.e_lambda_rows)) % p
    return Morphism(leb, b, la.mul(bt.section, products.reshape(-1, b.dim), p))


def unit_lambda(r: Recollement, b: Module) -> Morphism:
    """b -> iq(b), the quotient map"""
    _, proj, _ = _q_parts(r, b)
    return Morphism(b, functor_i(r, functor_q(r, b)), proj)


def unit_eta(r: Recollement, y: Module) -> Morphism:
    """y -> el(y), y -> y (x) e"""
    p = y.p
    ly, bt = _l_parts(r, y)
    ely = functor_e(r, ly)
    if y.dim == 0:
        return Morphism(y, ely, np.zeros((0, ely.dim), dtype=np.int64))
    ce = la.solve(r.e_lambda_rows, r.e.reshape(1, -1), p)
    vectors = la.mul(la.kron(np.eye(y.dim, dtype=np.int64), ce, p), bt.projection, p)
    return Morphism(y, ely, la.solve(_e_rows(r, ly), vectors, p))


def counit_qi(r: Recollement, n: Module) -> Morphism:
    """n -> qi(n), an isomorphism"""
    _, proj, _ = _q_parts(r, functor_i(r, n))
    return Morphism(n, functor_q(r, functor_i(r, n)), proj)


def four_term(r: Recollement, b: Module) -> ExactChain:
    """0 -> ker mu -> le(b) -> b -> iq(b) -> 0 with ker mu annihilated by e"""
    mu = counit_mu(r, b)
    k, inc = kernel(mu)
    if np.any(k.act(r.e)):
        raise InvariantViolation("four-term sequence", "kernel of the counit is not annihilated by e")
    chain = ExactChain((k, mu.source, b, functor_i(r, functor_q(r, b))), (inc, mu, unit_lambda(r, b)))
    logger.debug(f"four-term sequence dims {chain.dims}")
    return chain


def q_exact_ses(r: Recollement, b: Module) -> ShortExact:
    """0 -> le(b) -> b -> iq(b) -> 0 when q is exact"""
    if not r.q_exact:
        raise QNotExact("A/AeA is not a projective left module")
    mu = counit_mu(r, b)
    if not mu.is_mono():
        raise QNotExact(f"counit at {b!r} has a kernel")
    return ShortExact(mu, unit_lambda(r, b))


# Exactness detection

@dataclass
class ExactnessReport:
    l_exact: bool
    q_exact: bool
    p_exact: bool
    i_preserves_projectives: bool
    probes: Dict[str, bool]
    degenerate: bool
    warnings: List[str] = field(default_factory=list)

    def as_dict(self) -> Dict[str, object]:
        return {
            "l_exact": self.l_exact,
            "q_exact": self.q_exact,
            "p_exact": self.p_exact,
            "i_preserves_projectives": self.i_preserves_projectives,
            "probes": dict(sorted(self.probes.items())),
            "degenerate": self.degenerate,
        }


def _functor_probe(handle: FunctorHandle, rng: np.random.Generator, count: int) -> bool:
    for _ in range(count):
        s = random_ses(handle.source, rng)
        try:
            ShortExact(handle.apply_map(s.f), handle.apply_map(s.g))
        except NotExact:
            return False
    return True


def _hom_ideal_probe(r: Recollement, rng: np.random.Generator, count: int) -> bool:
    ideal = r.ideal_module
    for _ in range(count):
        s = random_ses(r.algebra, rng)
        if hom_dim(ideal, s.left) + hom_dim(ideal, s.right) != hom_dim(ideal, s.middle):
            return False
    return True


def exactness_report(r: Recollement, seed: int = 0, probes: int = 3) -> ExactnessReport:
    """Hypothesis bits from module criteria, cross-checked by random probes"""
    rng = np.random.default_rng(seed)
    criteria = {
        "l": r.l_exact,
        "q": r.q_exact,
        "p": r.p_exact,
        "i_projective": r.i_preserves_projectives,
    }
    outcome = {
        "l": _functor_probe(r.handle("l"), rng, probes),
        "q": _functor_probe(r.handle("q"), rng, probes),
        "p": _hom_ideal_probe(r, rng, probes),
        "i_projective": _functor_probe(r.handle("p"), rng, probes),
    }
    for key, ok in criteria.items():
        if ok and not outcome[key]:
            logger.error(f"criterion for {key} says exact but a probe found a non-exact image")
            raise ProbeCriterionDisagreement(f"{key}: criterion true, probe false")
    report = ExactnessReport(
        l_exact=criteria["l"],
        q_exact=criteria["q"],
        p_exact=criteria["p"],
        i_preserves_projectives=criteria["i_projective"],
        probes=outcome,
        degenerate=r.degenerate,
        warnings=[P_FORMULA_WARNING],
    )
    logger.info(f"exactness at {list(r.verts)}: {report.as_dict()}")
    return report


AXIOM_PANEL_SIZE = 20


def _pairs(left: List[Module], right: List[Module], partners: int = 3) -> List[Tuple[Module, Module]]:
    """Every left module against the first right ones and every right module against the first left ones"""
    out = [(x, y) for x in left for y in right[:partners]]
    out += [(x, y) for x in left[:partners] for y in right[partners:]]
    return out


def axiom_suite(r: Recollement, seed: int = 0, count: int = AXIOM_PANEL_SIZE) -> Dict[str, bool]:
    """Adjunctions, vanishing composites, unit isomorphisms, projective preservation
    and the four-term sequence on seeded panels of the three categories"""
    rng = np.random.default_rng(seed)
    a, c, qa = r.algebra, r.corner_algebra, r.quotient_algebra

    def panel(alg):
        if alg.dim == 0:
            return []
        return [regular(alg)] + [random_module(alg, rng) for _ in range(count)]

    bs, ys, ns = panel(a), panel(c), panel(qa)
    yb, nb = _pairs(ys, bs), _pairs(ns, bs)
    results = {
        "adjunction_l_e": all(hom_dim(functor_l(r, y), m) == hom_dim(y, functor_e(r, m)) for y, m in yb),
        "adjunction_e_r": all(hom_dim(functor_e(r, m), y) == hom_dim(m, functor_r(r, y)) for y, m in yb),
        "adjunction_q_i": all(hom_dim(functor_q(r, m), n) == hom_dim(m, functor_i(r, n)) for n, m in nb),
        "adjunction_i_p": all(hom_dim(functor_i(r, n), m) == hom_dim(n, functor_p(r, m)) for n, m in nb),
        "ei_zero": all(functor_e(r, functor_i(r, n)).dim == 0 for n in ns),
        "ql_zero": all(functor_q(r, functor_l(r, y)).dim == 0 for y in ys),
        "pr_zero": all(functor_p(r, functor_r(r, y)).dim == 0 for y in ys),
        "unit_eta_iso": all(unit_eta(r, y).is_iso() for y in ys),
        "counit_qi_iso": all(counit_qi(r, n).is_iso() for n in ns),
        "l_preserves_projectives": all(is_projective(functor_l(r, projective(c, v))) for v in c.vertices),
        "q_preserves_projectives": all(is_projective(functor_q(r, projective(a, v))) for v in a.vertices),
    }
    try:
        chains = [four_term(r, b) for b in bs]
        results["four_term"] = True
        results["q_exact_kernel_zero"] = not r.q_exact or all(ch.head.dim == 0 for ch in chains)
    except (NotExact, InvariantViolation) as exc:
        logger.error(f"four-term sequence failed: {exc}")
        results["four_term"] = False
        results["q_exact_kernel_zero"] = False
    failed = [k for k, ok in results.items() if not ok]
    if failed:
        logger.warning(f"axioms failing at {list(r.verts)}: {failed}")
    return results


# Chains built from the recollement

def _require_l_exact(r: Recollement) -> None:
    if not r.l_exact:
        raise LNotExact("eA is not a projective left eAe-module")


def prop1_lift_chain(r: Recollement, chain: ExactChain, b: Module, t: int, seed: int = 0) -> ExactChain:
    """Apply l to a chain ending near syzygy^t(e b) and end it at syzygy^t(le b)"""
    _require_l_exact(r)
    lifted = apply_to_chain(r.handle("l"), chain)
    target = syzygy_n(functor_l(r, functor_e(r, b)), t)
    return normalize_tail(lifted, target, seed)


def _four_term_pieces(r: Recollement, b: Module) -> Tuple[ShortExact, ShortExact]:
    """0 -> ker mu -> le(b) -> Im mu -> 0 and 0 -> Im mu -> b -> iq(b) -> 0"""
    mu = counit_mu(r, b)
    k, inc = kernel(mu)
    z, z_inc = image(mu)
    onto = Morphism(mu.source, z, la.solve(z_inc.matrix, mu.matrix, b.p))
    return ShortExact(inc, onto), ShortExact(z_inc, unit_lambda(r, b))


def prop1_full_chain(r: Recollement, chain: ExactChain, b: Module, t: int, seed: int = 0) -> ExactChain:
    """0 -> syzygy^(t+n+2)(iq b) -> ... -> syzygy^t(b) -> 0 through the four-term sequence"""
    lifted = prop1_lift_chain(r, chain, b, t, seed)
    left, right = _four_term_pieces(r, b)
    inner = splice(left, lifted, t, seed)
    return splice(rotate_ses(right), inner, t, seed)


def prop1_qexact_chain(r: Recollement, chain: ExactChain, b: Module, t: int, seed: int = 0) -> ExactChain:
    """0 -> syzygy^(t+n+1)(iq b) -> ... -> syzygy^t(b) -> 0 when q is exact"""
    _require_l_exact(r)
    s = q_exact_ses(r, b)
    lifted = prop1_lift_chain(r, chain, b, t, seed)
    return splice(rotate_ses(s), lifted, t, seed)


def descend_chain(r: Recollement, chain: ExactChain, c: Module, k: int, seed: int = 0) -> ExactChain:
    """Apply e to a chain ending near syzygy^k(l c); the result ends at syzygy^k(c)"""
    _require_l_exact(r)
    target = syzygy_n(c, k)
    normalized = normalize_tail(chain, functor_l(r, target), seed)
    down = apply_to_chain(r.handle("e"), normalized)
    eta = unit_eta(r, target)
    if not eta.is_iso():
        raise InvariantViolation("unit", f"y -> el(y) is not invertible at {target!r}")
    back = Morphism(down.tail, target, la.inverse(eta.matrix, c.p))
    return ExactChain(down.objects[:-1] + (target,), down.maps[:-1] + (down.maps[-1].then(back),))


# Morita rings with zero bimodule maps

@dataclass(frozen=True, eq=False)
class MoritaTuple:
    """(X, Y, f, g) description of a module over a Morita ring"""

    x: Module
    y: Module
    f_maps: np.ndarray  # per basis vector n_k of N: x -> x.n_k in Y
    g_maps: np.ndarray  # per basis vector m_k of M: y -> y.m_k in X
    x_rows: np.ndarray
    y_rows: np.ndarray


def _block_vector(ring: Algebra, key: str, vec: np.ndarray) -> np.ndarray:
    out = np.zeros(ring.dim, dtype=np.int64)
    lo, hi = ring.morita.offsets[key]
    out[lo:hi] = vec
    return out


def _block_basis(ring: Algebra, key: str) -> np.ndarray:
    lo, hi = ring.morita.offsets[key]
    return np.eye(ring.dim, dtype=np.int64)[lo:hi]


def to_tuple(ring: Algebra, v: Module) -> MoritaTuple:
    blocks = ring.morita
    p = v.p
    x_rows = la.row_basis(v.act(_block_vector(ring, "a", blocks.a.unit)), p)
    y_rows = la.row_basis(v.act(_block_vector(ring, "b", blocks.b.unit)), p)
    x = Module(blocks.a, _restricted_action(v, x_rows, _block_basis(ring, "a")))
    y = Module(blocks.b, _restricted_action(v, y_rows, _block_basis(ring, "b")))
    f_maps = np.stack([la.solve(y_rows, la.mul(x_rows, v.act(n), p), p) for n in _block_basis(ring, "n")]) if blocks.n.dim else np.zeros((0, x.dim, y.dim), dtype=np.int64)
    g_maps = np.stack([la.solve(x_rows, la.mul(y_rows, v.act(m), p), p) for m in _block_basis(ring, "m")]) if blocks.m.dim else np.zeros((0, y.dim, x.dim), dtype=np.int64)
    return MoritaTuple(x, y, f_maps, g_maps, x_rows, y_rows)


def tuple_module(ring: Algebra, x: Module, y: Module, f_maps: np.ndarray, g_maps: np.ndarray, name: Optional[str] = None) -> Module:
    """Module of the tuple (x, y, f, g): (x, y).(a, n, m, b) = (x a + g(y m), f(x n) + y b)"""
    off = ring.morita.offsets
    nx, ny = x.dim, y.dim
    action = np.zeros((ring.dim, nx + ny, nx + ny), dtype=np.int64)
    action[off["a"][0] : off["a"][1], :nx, :nx] = x.action
    action[off["b"][0] : off["b"][1], nx:, nx:] = y.action
    if len(f_maps):
        action[off["n"][0] : off["n"][1], :nx, nx:] = f_maps
    if len(g_maps):
        action[off["m"][0] : off["m"][1], nx:, :nx] = g_maps
    return Module(ring, action % ring.p, name).verify()


class MoritaFunctors:
    """The recollement functors of a Morita ring computed from tuples"""

    def __init__(self, r: Recollement):
        ring = r.algebra
        if ring.morita is None or set(r.verts) != set(ring.morita.b_vertices):
            raise NotMoritaProvenance("needs a Morita ring with e the unit of the B corner")
        self.logger = logging.getLogger(__name__)
        self.r = r
        self.ring = ring
        self.blocks = ring.morita
        lo, hi = self.blocks.offsets["b"]
        self.corner_to_b = AlgebraMap(r.corner_algebra, self.blocks.b, r.inclusion.matrix[:, lo:hi]).verify()
        lo, hi = self.blocks.offsets["a"]
        self.quotient_to_a = AlgebraMap(r.quotient_algebra, self.blocks.a, r.projection.section[:, lo:hi]).verify()
        self.logger.warning("K_A acts on morphisms through the kernel of f~, the same map that defines it on objects")

    @cached_property
    def n_right(self) -> Module:
        return Module(self.blocks.b, self.blocks.n.right_action, "N_B")

    @cached_property
    def m_left(self) -> Module:
        return Module(self.blocks.b.opposite, self.blocks.m.left_action, "_BM")

    def t_b(self, y: Module) -> Module:
        """(Y (x)_B M, Y, 0, 1)"""
        m = self.blocks.m
        bt = tensor_over(y, self.m_left)
        eye = np.eye(y.dim, dtype=np.int64)
        a = self.blocks.a
        if bt.dim:
            x_action = np.stack([bt.induced(bt, eye, m.right_action[i]) for i in range(a.dim)])
            g_maps = np.stack([bt.projection[np.arange(y.dim) * m.dim + k] for k in range(m.dim)])
        else:
            x_action = np.zeros((a.dim, 0, 0), dtype=np.int64)
            g_maps = np.zeros((m.dim, y.dim, 0), dtype=np.int64)
        x = Module(a, x_action)
        f_maps = np.zeros((self.blocks.n.dim, x.dim, y.dim), dtype=np.int64)
        return tuple_module(self.ring, x, y, f_maps, g_maps, "T_B")

    def u_b(self, v: Module) -> Module:
        return to_tuple(self.ring, v).y

    def h_b(self, y: Module) -> Module:
        """(Hom_B(N, Y), Y, evaluation, 0)"""
        p, n, a = y.p, self.blocks.n, self.blocks.a
        homs = hom_basis(self.n_right, y)
        if homs:
            flat = np.stack([f.matrix.reshape(-1) for f in homs])
            x_action = np.stack([
                la.solve(flat, np.stack([la.mul(n.left_action[i], f.matrix, p).reshape(-1) for f in homs]), p)
                for i in range(a.dim)
            ])
            f_maps = np.stack([np.stack([f.matrix[k] for f in homs]) for k in range(n.dim)])
        else:
            x_action = np.zeros((a.dim, 0, 0), dtype=np.int64)
            f_maps = np.zeros((n.dim, 0, y.dim), dtype=np.int64)
        x = Module(a, x_action)
        g_maps = np.zeros((self.blocks.m.dim, y.dim, x.dim), dtype=np.int64)
        return tuple_module(self.ring, x, y, f_maps, g_maps, "H_B")

    def z_a(self, x: Module) -> Module:
        y = zero_module(self.blocks.b)
        return tuple_module(
            self.ring, x, y,
            np.zeros((self.blocks.n.dim, x.dim, 0), dtype=np.int64),
            np.zeros((self.blocks.m.dim, 0, x.dim), dtype=np.int64),
            "Z_A",
        )

    def b_only(self, y: Module) -> Module:
        """(0, Y, 0, 0)"""
        x = zero_module(self.blocks.a)
        return tuple_module(
            self.ring, x, y,
            np.zeros((self.blocks.n.dim, 0, y.dim), dtype=np.int64),
            np.zeros((self.blocks.m.dim, y.dim, 0), dtype=np.int64),
            "(0,Y,0,0)",
        )

    def c_a(self, v: Module) -> Module:
        """coker g"""
        t = to_tuple(self.ring, v)
        rows = la.vstack(list(t.g_maps)) if len(t.g_maps) and t.y.dim else np.zeros((0, t.x.dim), dtype=np.int64)
        return quotient(t.x, rows)[0]

    def k_a(self, v: Module) -> Module:
        """ker f~"""
        t = to_tuple(self.ring, v)
        if not len(t.f_maps) or t.y.dim == 0 or t.x.dim == 0:
            return t.x
        rows = la.kernel_basis(la.hstack(list(t.f_maps)), v.p)
        return submodule(t.x, rows)[0]

    @cached_property
    def c_a_exact(self) -> bool:
        return self.blocks.m.dim == 0

    @cached_property
    def k_a_exact(self) -> bool:
        return is_projective(self.n_right) and tensor_over(self.n_right, self.m_left).dim == 0

    @cached_property
    def m_left_projective(self) -> bool:
        return is_projective(self.m_left)

    def agreement(self, b_panel: Sequence[Module], ring_panel: Sequence[Module], a_panel: Sequence[Module], seed: int = 0) -> Dict[str, bool]:
        """Whether each alias agrees with the generic functor on the given panels"""
        r = self.r

        def to_corner(y):
            return restrict_scalars(y, self.corner_to_b)

        def to_quotient(x):
            return restrict_scalars(x, self.quotient_to_a)

        def same(x, y):
            return find_iso(x, y, seed) is not None

        return {
            "T_B~l": all(same(self.t_b(y), functor_l(r, to_corner(y))) for y in b_panel),
            "U_B~e": all(same(to_corner(self.u_b(v)), functor_e(r, v)) for v in ring_panel),
            "H_B~r": all(same(self.h_b(y), functor_r(r, to_corner(y))) for y in b_panel),
            "Z_A~i": all(same(self.z_a(x), functor_i(r, to_quotient(x))) for x in a_panel),
            "C_A~q": all(same(to_quotient(self.c_a(v)), functor_q(r, v)) for v in ring_panel),
            "K_A~p": all(same(to_quotient(self.k_a(v)), functor_p(r, v)) for v in ring_panel),
        }

    def facts(self) -> Dict[str, bool]:
        return {
            "C_A_exact": self.c_a_exact,
            "K_A_exact": self.k_a_exact,
            "M_projective_left_B": self.m_left_projective,
            "N_projective_right_B": is_projective(self.n_right),
            "N_tensor_M_zero": tensor_over(self.n_right, self.m_left).dim == 0,
        }


def morita_functors(r: Recollement) -> MoritaFunctors:
    return MoritaFunctors(r)


def tight_projective(m: Module, side: str) -> bool:
    """(P,0,0,0) is A-tight iff P_A projective and P (x)_A N = 0; (0,Q,0,0) dually with M"""
    ring = m.algebra
    if ring.morita is None:
        raise NotMoritaProvenance("tightness needs a Morita ring")
    blocks = ring.morita
    t = to_tuple(ring, m)
    if side == "A":
        if t.y.dim:
            return False
        n_left = Module(blocks.a.opposite, blocks.n.left_action)
        return is_projective(t.x) and tensor_over(t.x, n_left).dim == 0
    if side == "B":
        if t.x.dim:
            return False
        m_left = Module(blocks.b.opposite, blocks.m.left_action)
        return is_projective(t.y) and tensor_over(t.y, m_left).dim == 0
    raise ValueError(f"side must be A or B, got {side!r}")


@dataclass
class TightResolutionReport:
    terms: List[Dict[str, object]]

    @property
    def a_tight(self) -> bool:
        return all(t["a_tight"] for t in self.terms)

    @property
    def b_tight(self) -> bool:
        return all(t["b_tight"] for t in self.terms)


def tight_resolution_check(m: Module, steps: int) -> TightResolutionReport:
    terms = []
    for k, d in enumerate(resolution_maps(m, steps)):
        pk = d.source
        terms.append({"degree": k, "dim": pk.dim, "a_tight": tight_projective(pk, "A"), "b_tight": tight_projective(pk, "B")})
    return TightResolutionReport(terms)


@dataclass
class PdBoundCheck:
    lhs: PdValue
    pd_x: PdValue
    pd_n_ring: PdValue
    pd_n_b: PdValue
    n_b_tight: bool
    holds: Optional[bool]
    holds_shifted: Optional[bool]
    holds_tight: Optional[bool]

    def as_dict(self) -> Dict[str, object]:
        return {
            "pd_X0": str(self.lhs),
            "pd_X_A": str(self.pd_x),
            "pd_0N": str(self.pd_n_ring),
            "pd_N_B": str(self.pd_n_b),
            "N_B_tight": self.n_b_tight,
            "holds": self.holds,
            "holds_shifted": self.holds_shifted,
            "holds_tight": self.holds_tight,
        }


def _bound_holds(lhs: PdValue, *terms: PdValue) -> Optional[bool]:
    if any(isinstance(t, ExceedsCap) for t in terms):
        return True if not isinstance(lhs, ExceedsCap) else None
    bound = sum(terms)
    if isinstance(lhs, ExceedsCap):
        return False if lhs.cap >= bound else None
    return lhs <= bound


def pd_bound_check(mf: MoritaFunctors, x: Module, cap: int = 64) -> PdBoundCheck:
    """pd(X,0,0,0) against pd X_A + pd(0,N,0,0), and against pd X_A + pd N_B when N_B resolves tightly.

    The unshifted bound fails whenever X (x)_A N != 0 and both right-hand
    terms vanish, e.g. X = A over the ring of upper triangular 2x2 matrices;
    holds_shifted allows the extra step from the kernel (0, X (x)_A N).
    """
    n_tuple = mf.b_only(mf.n_right)
    lhs = pd(mf.z_a(x), cap)
    pd_x = pd(x, cap)
    pd_n_ring = pd(n_tuple, cap)
    pd_n_b = pd(mf.n_right, cap)
    steps = pd_n_ring if isinstance(pd_n_ring, int) else cap
    tight = tight_resolution_check(n_tuple, steps).b_tight
    holds = _bound_holds(lhs, pd_x, pd_n_ring)
    shifted = _bound_holds(lhs, pd_x, pd_n_ring, 1)
    holds_tight = _bound_holds(lhs, pd_x, pd_n_b) if tight else None
    if holds is False and shifted:
        logger.warning(f"pd(X,0,0,0) = {lhs} exceeds pd X_A + pd(0,N,0,0) by one")
    return PdBoundCheck(lhs, pd_x, pd_n_ring, pd_n_b, tight, holds, shifted, holds_tight)


# Bimodule predicates

def tensor_bimodules(m1: BimoduleData, m2: BimoduleData) -> BimoduleData:
    """m1 (x)_S m2 for an (R, S)-bimodule m1 and an (S, T)-bimodule m2"""
    if m1.right_algebra is not m2.left_algebra:
        raise BimoduleMismatch("tensor product over different middle algebras")
    s = m1.right_algebra
    bt = tensor_over(Module(s, m1.right_action), Module(s.opposite, m2.left_action))
    r_alg, t_alg = m1.left_algebra, m2.right_algebra
    if bt.dim == 0:
        return BimoduleData(r_alg, t_alg, 0, np.zeros((r_alg.dim, 0, 0), dtype=np.int64), np.zeros((t_alg.dim, 0, 0), dtype=np.int64))
    eye1 = np.eye(m1.dim, dtype=np.int64)
    eye2 = np.eye(m2.dim, dtype=np.int64)
    left = np.stack([bt.induced(bt, m1.left_action[i], eye2) for i in range(r_alg.dim)])
    right = np.stack([bt.induced(bt, eye1, m2.right_action[j]) for j in range(t_alg.dim)])
    return BimoduleData(r_alg, t_alg, bt.dim, left, right)


def _all3(*values: Optional[bool]) -> Optional[bool]:
    if any(v is False for v in values):
        return False
    if any(v is None for v in values):
        return None
    return True


@dataclass
class BimodulePredicates:
    nilpotent: PdValue  # exponent j with the j-th tensor power zero
    pd_left: PdValue
    pd_right: PdValue
    tor_vanishing: Optional[bool]
    caps: Dict[str, int]

    @property
    def left_perfect(self) -> Optional[bool]:
        return _all3(None if isinstance(self.pd_left, ExceedsCap) else True, self.tor_vanishing)

    @property
    def right_perfect(self) -> Optional[bool]:
        return _all3(None if isinstance(self.pd_right, ExceedsCap) else True, self.tor_vanishing)

    @property
    def perfect(self) -> Optional[bool]:
        return _all3(self.left_perfect, self.right_perfect)

    def as_dict(self) -> Dict[str, object]:
        return {
            "nilpotent": str(self.nilpotent),
            "left_perfect": self.left_perfect,
            "right_perfect": self.right_perfect,
            "pd_left": str(self.pd_left),
            "pd_right": str(self.pd_right),
            "tor_vanishing": self.tor_vanishing,
            "caps": self.caps,
        }


def bimodule_predicates(n: BimoduleData, caps: Caps) -> BimodulePredicates:
    """Nilpotency, projective dimensions and Tor vanishing of an R-R-bimodule, all capped"""
    ring = n.left_algebra
    if n.right_algebra is not ring:
        raise BimoduleMismatch("predicates need a bimodule over a single algebra")
    powers = [n]
    while powers[-1].dim and len(powers) < caps.tensor_power_cap:
        powers.append(tensor_bimodules(powers[-1], n))
    nilpotent: PdValue = len(powers) if powers[-1].dim == 0 else ExceedsCap(caps.tensor_power_cap)
    left_module = Module(ring.opposite, n.left_action)
    pd_left = pd(left_module, caps.pd_cap)
    pd_right = pd(Module(ring, n.right_action), caps.pd_cap)
    # Tor_i vanishes for i beyond pd of the first factor, so a small pd settles all i
    tor_vanishing: Optional[bool] = None if isinstance(nilpotent, ExceedsCap) else True
    for power in powers:
        if power.dim == 0:
            continue
        right_module = Module(ring, power.right_action)
        depth = pd(right_module, caps.pd_cap)
        settled = isinstance(depth, int) and depth <= caps.tor_cap
        top = depth if settled else caps.tor_cap
        if any(tor_dim(right_module, left_module, i, caps.pd_cap) for i in range(1, top + 1)):
            tor_vanishing = False
            break
        if not settled:
            tor_vanishing = None
    if tor_vanishing is None:
        logger.warning(f"Tor vanishing is inconclusive at tensor power cap {caps.tensor_power_cap} and Tor cap {caps.tor_cap}")
    return BimodulePredicates(
        nilpotent, pd_left, pd_right, tor_vanishing,
        {"tensor_power_cap": caps.tensor_power_cap, "tor_cap": caps.tor_cap, "pd_cap": caps.pd_cap},
    )

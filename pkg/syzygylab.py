"""
Chain-building constructions on exact sequences: rotation, horseshoe,
splicing, tail normalisation and functor/syzygy comparison
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Sequence

import numpy as np

import exactla as la
from errors import ChainMismatch, FunctorNotExact, FunctorNotProjectivePreserving, Inconclusive, NotExact
from modcat import (
    ExactChain,
    ExceedsCap,
    Module,
    Morphism,
    PdValue,
    ShortExact,
    direct_sum,
    direct_sum_maps,
    factor_through_mono,
    find_iso,
    identity,
    indecomposable_summands,
    is_projective,
    kernel,
    lift_through_epi,
    pd,
    projective,
    projective_cover,
    random_ses,
    resolution_maps,
    simple,
    stable_strip,
    syzygy_n,
    syzygy_with_inclusion,
)

if TYPE_CHECKING:
    from recollement import FunctorHandle, Recollement

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HorseshoeStep:
    """Syzygy sequence of a short exact sequence with the covers that produced it"""

    ses: ShortExact
    cover_left: Morphism
    cover_middle: Morphism
    cover_right: Morphism


@dataclass(frozen=True, eq=False)
class SyzygyComparison:
    functor: str
    depth: int
    applied_then_syzygy: Module
    syzygy_then_applied: Module
    stable_iso: Optional[Morphism]

    @property
    def holds(self) -> bool:
        return self.stable_iso is not None


def rotate_ses(s: ShortExact) -> ShortExact:
    """0 -> X1 -> X2 -> X3 -> 0 becomes 0 -> syzygy(X3) -> X1 + P -> X2 -> 0, P the cover of X3"""
    p = s.f.p
    cover = projective_cover(s.right)
    sigma = lift_through_epi(cover, s.g)
    omega, inc = syzygy_with_inclusion(s.right)
    middle, _, _ = direct_sum_maps([s.left, cover.source])
    onto = Morphism(middle, s.middle, la.vstack([s.f.matrix, sigma.matrix]))
    # x1 = -f^{-1}(sigma(q)) for q in the syzygy
    x1 = (-la.solve(s.f.matrix, la.mul(inc.matrix, sigma.matrix, p), p)) % p
    into = Morphism(omega, middle, la.hstack([x1, inc.matrix]))
    return ShortExact(into, onto)


def horseshoe(s: ShortExact) -> HorseshoeStep:
    """0 -> K -> A -> B -> 0 gives 0 -> syzygy(K) -> H -> syzygy(B) -> 0 with H a syzygy of A"""
    p = s.f.p
    cover_k = projective_cover(s.left)
    cover_b = projective_cover(s.right)
    sigma = lift_through_epi(cover_b, s.g)
    total, _, projs = direct_sum_maps([cover_k.source, cover_b.source])
    middle = Morphism(total, s.middle, la.vstack([la.mul(cover_k.matrix, s.f.matrix, p), sigma.matrix]))
    omega_k, inc_k = syzygy_with_inclusion(s.left)
    omega_b, inc_b = syzygy_with_inclusion(s.right)
    omega_h, inc_h = kernel(middle)
    left_rows = la.hstack([inc_k.matrix, np.zeros((omega_k.dim, cover_b.source.dim), dtype=np.int64)])
    f = factor_through_mono(Morphism(omega_k, total, left_rows), inc_h)
    g = factor_through_mono(inc_h.then(projs[1]), inc_b)
    logger.debug(f"horseshoe: dims {omega_k.dim} -> {omega_h.dim} -> {omega_b.dim}")
    return HorseshoeStep(ShortExact(f, g), cover_k, middle, cover_b)


def iterate_horseshoe(s: ShortExact, t: int) -> ShortExact:
    out = s
    for _ in range(t):
        out = horseshoe(out).ses
    return out


def connect(first: ExactChain, second: ExactChain) -> ExactChain:
    """Join a chain ending at X with a chain starting at X"""
    if first.tail is not second.head:
        raise ChainMismatch("chains do not meet at a common object")
    joint = first.maps[-1].then(second.maps[0])
    return ExactChain(
        first.objects[:-1] + second.objects[1:],
        first.maps[:-1] + (joint,) + second.maps[1:],
    )


def projective_resolution_chain(m: Module, cap: int = 64) -> ExactChain:
    """0 -> P_d -> ... -> P_0 -> m -> 0 from minimal covers"""
    value = pd(m, cap)
    if isinstance(value, ExceedsCap):
        raise Inconclusive(f"projective dimension of {m!r} exceeds {cap}", cap)
    maps = resolution_maps(m, value)
    return ExactChain.from_maps(list(reversed(maps)))


def _match_summands(x: Module, y: Module, seed: int):
    """Pair indecomposable summands of x and y; leftovers must be projective"""
    xs = list(indecomposable_summands(x, seed))
    ys = list(indecomposable_summands(y, seed))
    used = [False] * len(ys)
    pairs, extra_x = [], []
    for inc in xs:
        for j, other in enumerate(ys):
            if used[j]:
                continue
            iso = find_iso(inc.source, other.source, seed)
            if iso is not None:
                used[j] = True
                pairs.append((inc, other, iso))
                break
        else:
            if not is_projective(inc.source):
                raise ChainMismatch(f"summand {inc.source!r} of the tail has no partner")
            extra_x.append(inc)
    extra_y = [ys[j] for j in range(len(ys)) if not used[j]]
    for inc in extra_y:
        if not is_projective(inc.source):
            raise ChainMismatch(f"summand {inc.source!r} of the target has no partner")
    return xs, pairs, extra_x, extra_y


def normalize_tail(chain: ExactChain, y: Module, seed: int = 0) -> ExactChain:
    """Chain of the same length ending at y, for y stably isomorphic to the tail.

    Projective summands of the tail missing from y are split off the last
    internal term; projective summands of y missing from the tail are added
    to it.
    """
    x = chain.tail
    if x is y:
        return chain
    p = x.p
    xs, pairs, extra_x, extra_y = _match_summands(x, y, seed)
    d0 = chain.maps[-1]
    v0 = d0.source
    if x.dim:
        basis = la.vstack([inc.matrix for inc in xs])
        inv = la.inverse(basis, p)
    else:
        inv = np.zeros((0, 0), dtype=np.int64)
    h = np.zeros((x.dim, y.dim), dtype=np.int64)
    proj_extra = np.zeros((x.dim, x.dim), dtype=np.int64)
    start = 0
    offsets = {}
    for inc in xs:
        offsets[id(inc)] = slice(start, start + inc.source.dim)
        start += inc.source.dim
    for inc, other, iso in pairs:
        cols = offsets[id(inc)]
        h = (h + la.mul_chain([inv[:, cols], iso.matrix, other.matrix], p)) % p
    for inc in extra_x:
        cols = offsets[id(inc)]
        proj_extra = (proj_extra + la.mul(inv[:, cols], inc.matrix, p)) % p

    if extra_x:
        v0_new, inc0 = kernel(Morphism(v0, x, la.mul(d0.matrix, proj_extra, p)))
    else:
        v0_new, inc0 = v0, None
    restricted = la.mul(inc0.matrix, d0.matrix, p) if inc0 is not None else d0.matrix
    last_rows = [la.mul(restricted, h, p)]
    if extra_y:
        py = direct_sum([inc.source for inc in extra_y])
        last_src, _, _ = direct_sum_maps([v0_new, py])
        last_rows.append(la.vstack([inc.matrix for inc in extra_y]))
    else:
        last_src = v0_new
    last = Morphism(last_src, y, la.vstack(last_rows))

    maps = list(chain.maps[:-2])
    if len(chain.maps) >= 2:
        d1 = chain.maps[-2]
        into = factor_through_mono(d1, inc0).matrix if inc0 is not None else d1.matrix
        pad = np.zeros((d1.source.dim, last_src.dim - v0_new.dim), dtype=np.int64)
        maps.append(Morphism(d1.source, last_src, la.hstack([into, pad])))
    maps.append(last)
    logger.debug(f"normalised tail: split off {len(extra_x)} and added {len(extra_y)} projective summands")
    return ExactChain.from_maps(maps)


def splice(s: ShortExact, chain: ExactChain, t: int, seed: int = 0) -> ExactChain:
    """From 0 -> K -> A -> B -> 0 and a chain resolving syzygy^t(A), build

    0 -> syzygy^(t+m)(K) -> V_m + P_m -> ... -> V_0 + P_0 -> syzygy^t(B) -> 0.
    """
    p = s.f.p
    level = iterate_horseshoe(s, t)
    normalized = normalize_tail(chain, level.middle, seed)
    m = normalized.length
    terms = list(reversed(normalized.internal_terms))  # V_0 .. V_m
    diffs = list(reversed(normalized.maps))  # d_0: V_0 -> H, d_j: V_j -> V_(j-1)

    c0 = diffs[0].then(level.g)
    e_mod, e_inc = kernel(c0)
    rho = factor_through_mono(e_inc.then(diffs[0]), level.f)
    k_mod = level.left
    out_maps: List[Morphism] = [c0]
    current_term = terms[0]
    v_inc = identity(terms[0])
    for j in range(m):
        cover = projective_cover(k_mod)
        lam = lift_through_epi(cover, rho)
        d_next = factor_through_mono(diffs[j + 1].then(v_inc), e_inc)
        new_term, incs, projs = direct_sum_maps([terms[j + 1], cover.source])
        psi = Morphism(new_term, e_mod, la.vstack([d_next.matrix, lam.matrix]))
        out_maps.append(psi.then(e_inc))
        omega, omega_inc = syzygy_with_inclusion(k_mod)
        e_mod, e_inc = kernel(psi)
        rho = factor_through_mono(e_inc.then(projs[1]), omega_inc)
        k_mod = omega
        current_term = new_term
        v_inc = incs[0]
    # rho is now an isomorphism onto syzygy^(t+m)(K)
    if not rho.is_iso():
        raise NotExact("spliced head is not isomorphic to the expected syzygy")
    head = Morphism(k_mod, current_term, la.mul(la.inverse(rho.matrix, p), e_inc.matrix, p))
    out_maps.append(head)
    result = ExactChain.from_maps(list(reversed(out_maps)))
    logger.debug(f"spliced chain of length {result.length} with dims {result.dims}")
    return result


def apply_to_chain(functor: "FunctorHandle", chain: ExactChain) -> ExactChain:
    """Apply an exact functor termwise; raises FunctorNotExact when the image is not exact"""
    try:
        return ExactChain.from_maps([functor.apply_map(f) for f in chain.maps])
    except NotExact as exc:
        raise FunctorNotExact(f"{functor.name} does not preserve exactness: {exc}")


def probe_exactness(functor: "FunctorHandle", probes: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    for _ in range(probes):
        s = random_ses(functor.source, rng)
        try:
            ShortExact(functor.apply_map(s.f), functor.apply_map(s.g))
        except NotExact as exc:
            raise FunctorNotExact(f"{functor.name} broke a short exact sequence: {exc}")


def probe_projectives(functor: "FunctorHandle") -> None:
    for v in functor.source.vertices:
        image = functor.apply(projective(functor.source, v))
        if not is_projective(image):
            raise FunctorNotProjectivePreserving(f"{functor.name} sends P({v}) to a non-projective")


def functor_syzygy_compare(functor: "FunctorHandle", x: Module, n: int, seed: int = 0, probes: int = 3) -> SyzygyComparison:
    """Compare F(syzygy^n x) with syzygy^n(F x) after removing projective summands"""
    probe_exactness(functor, probes, seed)
    probe_projectives(functor)
    lhs = functor.apply(syzygy_n(x, n))
    rhs = syzygy_n(functor.apply(x), n)
    iso = find_iso(stable_strip(lhs, seed), stable_strip(rhs, seed), seed)
    return SyzygyComparison(functor.name, n, rhs, lhs, iso)


def relative_gldim(r: "Recollement", cap: int = 64) -> PdValue:
    """Supremum over the simples of the quotient algebra of pd of their inflations"""
    qa = r.quotient_algebra
    inflate = r.handle("i")
    best = 0
    for v in qa.vertices:
        value = pd(inflate.apply(simple(qa, v)), cap)
        if isinstance(value, ExceedsCap):
            logger.warning(f"relative global dimension exceeds {cap} at vertex {v}")
            return value
        best = max(best, value)
    return best


def panel_relative_gldim(r: "Recollement", panel: Sequence[Module], cap: int = 64) -> PdValue:
    inflate = r.handle("i")
    best = 0
    for n in panel:
        value = pd(inflate.apply(n), cap)
        if isinstance(value, ExceedsCap):
            return value
        best = max(best, value)
    return best

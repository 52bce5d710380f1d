"""
Igusa-Todorov witnesses: resolution oracles, chain verification, certificates
and the transformers that build certificates for an algebra from the two
sides of its idempotent recollement
"""

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from algebra import Algebra
from errors import (
    AlgebraMismatch,
    CertificateRejected,
    HypothesisFailure,
    Inconclusive,
    NotExact,
    NotMoritaProvenance,
    OracleRefusal,
    RecollementToolkitError,
    RelativeGldimInfinite,
)
from modcat import (
    ExactChain,
    ExceedsCap,
    Module,
    PdValue,
    ShortExact,
    cokernel,
    direct_sum,
    factor_through_epi,
    in_add_pieces,
    indecomposable_summands,
    is_iso,
    is_projective,
    kernel,
    pd,
    projective,
    random_module,
    regular,
    simple,
    stably_isomorphic,
    syzygy,
    syzygy_n,
    zero_module,
)
from models import CaseTag, Caps, CertificateSummary, ChainSummary, OracleStrategy, Report, StrategyChoice
from recollement import (
    P_FORMULA_WARNING,
    REPEATED_TERM_WARNING,
    ExactnessReport,
    Recollement,
    build,
    counit_mu,
    descend_chain,
    exactness_report,
    functor_e,
    functor_i,
    functor_l,
    functor_p,
    functor_q,
    morita_functors,
    pd_bound_check,
    prop1_full_chain,
    prop1_qexact_chain,
    tight_resolution_check,
)
from syzygylab import apply_to_chain, connect, normalize_tail, projective_resolution_chain, relative_gldim, splice

logger = logging.getLogger(__name__)

FALLBACK_WARNING = (
    "i does not preserve projectives: quotient-side witnesses are transported "
    "through the syzygy closure of their inflations"
)
PANEL_WARNING = "certificates are verified on the recorded panel only"


# Pieces of witnesses

def _add_new(pieces: List[Module], m: Module, seed: int) -> bool:
    if any(is_iso(m, u, seed) for u in pieces):
        return False
    pieces.append(m)
    return True


def merge_pieces(groups: Sequence[Sequence[Module]], seed: int = 0) -> List[Module]:
    """One representative per isomorphism class of indecomposable summands"""
    out: List[Module] = []
    for group in groups:
        for m in group:
            for inc in indecomposable_summands(m, seed):
                _add_new(out, inc.source, seed)
    return out


def projective_pieces(a: Algebra) -> List[Module]:
    return [projective(a, v) for v in a.vertices]


def witness_of(a: Algebra, pieces: Sequence[Module]) -> Module:
    return direct_sum(list(pieces)) if pieces else zero_module(a)


def syzygy_closure(a: Algebra, starts: Sequence[Module], rounds: int, seed: int = 0) -> Tuple[List[Module], bool]:
    """Non-projective indecomposables reachable from starts by taking syzygies.

    Returns the representatives and whether no new class appeared in the last round.
    """
    reps: List[Module] = []
    frontier: List[Module] = []
    for x in starts:
        if x.algebra is not a:
            raise AlgebraMismatch(f"closure over {a!r} seeded with {x!r}")
        for inc in indecomposable_summands(x, seed):
            if not is_projective(inc.source) and _add_new(reps, inc.source, seed):
                frontier.append(inc.source)
    for step in range(rounds):
        if not frontier:
            break
        fresh = []
        for piece in frontier:
            for inc in indecomposable_summands(syzygy(piece), seed):
                if not is_projective(inc.source) and _add_new(reps, inc.source, seed):
                    fresh.append(inc.source)
        logger.debug(f"closure round {step + 1}: {len(fresh)} new classes, {len(reps)} in total")
        frontier = fresh
    return reps, not frontier


def default_panel(a: Algebra, caps: Optional[Caps] = None, seed: int = 0) -> List[Module]:
    """Simples, indecomposable projectives and seeded random modules"""
    caps = caps or Caps()
    rng = np.random.default_rng(seed)
    panel = [simple(a, v) for v in a.vertices]
    panel += [projective(a, v) for v in a.vertices]
    if a.vertices:
        panel += [random_module(a, rng) for _ in range(caps.random_panel_size)]
    return [x for x in panel if x.dim]


# Verification

def _verify(chain: ExactChain, pieces: Sequence[Module], x: Module, n: int, seed: int, m: Optional[int]) -> bool:
    try:
        ExactChain(chain.objects, chain.maps)
    except NotExact as exc:
        logger.warning(f"chain for {x!r} is not exact: {exc}")
        return False
    if m is not None and chain.length > m:
        logger.warning(f"chain for {x!r} has length {chain.length} > {m}")
        return False
    if chain.tail.algebra is not x.algebra:
        logger.warning(f"chain for {x!r} lives over another algebra")
        return False
    for k, term in enumerate(chain.internal_terms):
        if not in_add_pieces(term, pieces, seed):
            logger.warning(f"term {k} of the chain for {x!r} is outside add(U)")
            return False
    target = syzygy_n(x, n)
    if chain.tail is not target and not stably_isomorphic(chain.tail, target, seed):
        logger.warning(f"chain for {x!r} does not end at its {n}-th syzygy")
        return False
    return True


def verify_chain(chain: ExactChain, u: Module, x: Module, n: int, seed: int = 0, m: Optional[int] = None) -> bool:
    """Exactness, every internal term in add(u) and tail stably isomorphic to syzygy^n(x)"""
    pieces = [inc.source for inc in indecomposable_summands(u, seed)]
    return _verify(chain, pieces, x, n, seed, m)


def chain_summary(x: Module, chain: ExactChain, verified: bool) -> ChainSummary:
    return ChainSummary(target=repr(x), dims=chain.dims, length=chain.length, digest=chain.digest(), verified=verified)


# Oracles

@dataclass(frozen=True, eq=False)
class ResolutionOracle:
    """Answers x with 0 -> V_m -> ... -> V_0 -> syzygy^n(x) -> 0, every V_j in add(witness)"""

    algebra: Algebra
    witness: Module
    m: int
    n: int
    strategy: OracleStrategy
    pieces: Tuple[Module, ...]
    seed: int = 0
    table: Tuple[Tuple[Module, ExactChain], ...] = ()
    base: Optional["ResolutionOracle"] = None
    shift: int = 0

    @property
    def representatives(self) -> List[Module]:
        """Non-projective witness summands"""
        return [u for u in self.pieces if not is_projective(u)]

    def lift(self, i: int) -> "ResolutionOracle":
        """The same witness answering at depth n + i"""
        if i < 0:
            raise ValueError("an oracle can only be lifted to a deeper syzygy")
        if i == 0:
            return self
        return replace(self, n=self.n + i, base=self, shift=i, table=())

    def resolve(self, x: Module) -> ExactChain:
        if x.algebra is not self.algebra:
            raise AlgebraMismatch(f"{self.strategy.value} oracle asked about {x!r} over another algebra")
        if self.base is not None:
            chain = self.base.resolve(syzygy_n(x, self.shift))
        else:
            chain = self._answer(x)
        if not _verify(chain, self.pieces, x, self.n, self.seed, self.m):
            raise CertificateRejected(f"{self.strategy.value} oracle produced an unverifiable chain for {x!r}")
        return chain

    def _answer(self, x: Module) -> ExactChain:
        target = syzygy_n(x, self.n)
        if self.strategy in (OracleStrategy.SYZYGY_FINITE, OracleStrategy.INFLATED_CLOSURE):
            if not in_add_pieces(target, self.pieces, self.seed):
                raise OracleRefusal(f"syzygy^{self.n} of {x!r} has a summand outside the certified class")
            return ExactChain.trivial(target)
        if self.strategy == OracleStrategy.FINITE_GLDIM:
            try:
                return projective_resolution_chain(target, self.m)
            except Inconclusive as exc:
                raise OracleRefusal(str(exc))
        for key, chain in self.table:
            if key is x or (key.dim == x.dim and is_iso(key, x, self.seed)):
                return chain if chain.tail is target else normalize_tail(chain, target, self.seed)
        raise OracleRefusal(f"{x!r} is not in the oracle table")

    def describe(self) -> Dict[str, object]:
        return {
            "strategy": self.strategy.value,
            "m": self.m,
            "n": self.n,
            "witness_dim": self.witness.dim,
            "representatives": len(self.representatives),
        }


def oracle_syzygy_finite(
    a: Algebra,
    n: int,
    panel: Optional[Sequence[Module]] = None,
    caps: Optional[Caps] = None,
    seed: int = 0,
) -> ResolutionOracle:
    """Witness from the syzygy closure of the n-th syzygies of the panel, m = 0"""
    caps = caps or Caps()
    panel = list(panel) if panel is not None else default_panel(a, caps, seed)
    reps, converged = syzygy_closure(a, [syzygy_n(x, n) for x in panel], caps.closure_cap, seed)
    if not converged:
        raise Inconclusive(f"new syzygy classes still appear after {caps.closure_cap} rounds at depth {n}", caps.closure_cap)
    pieces = reps + projective_pieces(a)
    logger.info(f"syzygy-finite oracle at depth {n}: {len(reps)} non-projective classes")
    return ResolutionOracle(a, witness_of(a, pieces), 0, n, OracleStrategy.SYZYGY_FINITE, tuple(pieces), seed)


def oracle_finite_gldim(a: Algebra, cap: int = 64, seed: int = 0) -> ResolutionOracle:
    """Witness the regular module, m the global dimension, n = 0"""
    d = 0
    for v in a.vertices:
        value = pd(simple(a, v), cap)
        if isinstance(value, ExceedsCap):
            raise Inconclusive(f"projective dimension of the simple at {v} exceeds {cap}", cap)
        d = max(d, value)
    logger.info(f"finite global dimension oracle: gl.dim = {d}")
    return ResolutionOracle(a, regular(a), d, 0, OracleStrategy.FINITE_GLDIM, tuple(projective_pieces(a)), seed)


def oracle_explicit_table(
    a: Algebra,
    witness: Module,
    m: int,
    n: int,
    entries: Sequence[Tuple[Module, ExactChain]],
    seed: int = 0,
) -> ResolutionOracle:
    pieces = tuple(inc.source for inc in indecomposable_summands(witness, seed))
    for x, chain in entries:
        if not _verify(chain, pieces, x, n, seed, m):
            raise CertificateRejected(f"table entry for {x!r} fails verification")
    return ResolutionOracle(a, witness, m, n, OracleStrategy.EXPLICIT_TABLE, pieces, seed, tuple(entries))


def oracle_inflated_closure(
    r: Recollement,
    oracle_a: ResolutionOracle,
    seeds: Sequence[Module] = (),
    caps: Optional[Caps] = None,
    seed: int = 0,
) -> ResolutionOracle:
    """Oracle over the algebra whose witness is the syzygy closure of inflated quotient data"""
    caps = caps or Caps()
    inflate = r.handle("i")
    qa = r.quotient_algebra
    starts = [inflate.apply(u) for u in oracle_a.pieces]
    starts += [inflate.apply(simple(qa, v)) for v in qa.vertices]
    starts += [inflate.apply(projective(qa, v)) for v in qa.vertices]
    starts += list(seeds)
    reps, converged = syzygy_closure(r.algebra, starts, caps.closure_cap, seed)
    if not converged:
        raise Inconclusive(f"inflated syzygy closure still grows after {caps.closure_cap} rounds", caps.closure_cap)
    pieces = reps + projective_pieces(r.algebra)
    logger.info(f"inflated closure oracle: {len(reps)} non-projective classes")
    return ResolutionOracle(
        r.algebra, witness_of(r.algebra, pieces), 0, 0, OracleStrategy.INFLATED_CLOSURE, tuple(pieces), seed
    )


def select_oracle(
    a: Algebra,
    choice: StrategyChoice = StrategyChoice.AUTO,
    caps: Optional[Caps] = None,
    seed: int = 0,
    panel: Optional[Sequence[Module]] = None,
) -> ResolutionOracle:
    """First conclusive oracle: syzygy-finite by increasing depth, then finite global dimension"""
    caps = caps or Caps()
    attempts = []
    if choice in (StrategyChoice.SYZYGY_FINITE, StrategyChoice.AUTO):
        for n in range(caps.syzygy_depth_cap + 1):
            try:
                return oracle_syzygy_finite(a, n, panel, caps, seed)
            except Inconclusive as exc:
                attempts.append(str(exc))
    if choice in (StrategyChoice.GLDIM, StrategyChoice.AUTO):
        try:
            return oracle_finite_gldim(a, caps.pd_cap, seed)
        except Inconclusive as exc:
            attempts.append(str(exc))
    raise Inconclusive("no oracle strategy was conclusive: " + "; ".join(attempts))


# Certificates

@dataclass(frozen=True, eq=False)
class ITCertificate:
    """Verified (m, n)-Igusa-Todorov data on a panel"""

    algebra: Algebra
    witness: Module
    m: int
    n: int
    panel: Tuple[Module, ...]
    chains: Tuple[ExactChain, ...]
    provenance: str
    seed: int = 0
    pieces: Tuple[Module, ...] = ()

    @classmethod
    def assemble(
        cls,
        algebra: Algebra,
        pieces: Sequence[Module],
        n: int,
        panel: Sequence[Module],
        chains: Sequence[ExactChain],
        provenance: str,
        seed: int = 0,
        m: Optional[int] = None,
    ) -> "ITCertificate":
        if len(panel) != len(chains):
            raise CertificateRejected(f"{provenance}: {len(panel)} panel modules but {len(chains)} chains")
        if m is None:
            m = max((c.length for c in chains), default=0)
        pieces = tuple(pieces)
        for x, chain in zip(panel, chains):
            if not _verify(chain, pieces, x, n, seed, m):
                raise CertificateRejected(f"{provenance}: chain for {x!r} fails verification")
        cert = cls(algebra, witness_of(algebra, pieces), m, n, tuple(panel), tuple(chains), provenance, seed, pieces)
        logger.info(f"certificate from {provenance}: ({m}, {n}) on {len(panel)} panel modules")
        return cert

    def verify(self) -> bool:
        return all(_verify(c, self.pieces, x, self.n, self.seed, self.m) for x, c in zip(self.panel, self.chains))

    def as_oracle(self) -> ResolutionOracle:
        return ResolutionOracle(
            self.algebra, self.witness, self.m, self.n, OracleStrategy.EXPLICIT_TABLE,
            self.pieces, self.seed, tuple(zip(self.panel, self.chains)),
        )

    @property
    def kind(self) -> str:
        if self.m == 0:
            return "syzygy-finite"
        if self.m <= 1:
            return "Igusa-Todorov"
        return f"({self.m},{self.n})-Igusa-Todorov"

    def summary(self) -> CertificateSummary:
        return CertificateSummary(
            algebra_dim=self.algebra.dim,
            m=self.m,
            n=self.n,
            witness_dim=self.witness.dim,
            provenance=self.provenance,
            panel_size=len(self.panel),
            chains=[chain_summary(x, c, True) for x, c in zip(self.panel, self.chains)],
        )


@dataclass(frozen=True, eq=False)
class CertificateFragment:
    """One verified chain produced by a transformer, with the arity it certifies"""

    target: Module
    chain: ExactChain
    m: int
    n: int
    pieces: Tuple[Module, ...]
    provenance: str
    case: Optional[CaseTag] = None
    fallback: bool = False


def certify(algebra: Algebra, fragments: Sequence[CertificateFragment], provenance: str, seed: int = 0) -> ITCertificate:
    """Assemble transformer fragments sharing one witness into a certificate"""
    if not fragments:
        raise CertificateRejected(f"{provenance}: no chains to certify")
    depths = {f.n for f in fragments}
    if len(depths) != 1:
        raise CertificateRejected(f"{provenance}: fragments at different depths {sorted(depths)}")
    m = max(f.m for f in fragments)
    return ITCertificate.assemble(
        algebra, fragments[0].pieces, depths.pop(), [f.target for f in fragments],
        [f.chain for f in fragments], provenance, seed, m,
    )


# Transformers

def _require(r: Recollement, *bits: str) -> None:
    reasons = {
        "l": (r.l_exact, "eA is not a projective left eAe-module"),
        "p": (r.p_exact, "AeA is not a projective right module"),
        "q": (r.q_exact, "A/AeA is not a projective left module"),
    }
    for bit in bits:
        ok, why = reasons[bit]
        if not ok:
            raise HypothesisFailure(bit, why)


def _check_sides(r: Recollement, oracle_a: Optional[ResolutionOracle], oracle_c: ResolutionOracle) -> None:
    if oracle_c.algebra is not r.corner_algebra:
        raise AlgebraMismatch("corner oracle is over another algebra")
    if oracle_a is not None and oracle_a.algebra is not r.quotient_algebra:
        raise AlgebraMismatch("quotient oracle is over another algebra")


def transport_fallback(
    r: Recollement,
    oracle_a: ResolutionOracle,
    panel: Sequence[Module],
    caps: Optional[Caps] = None,
    seed: int = 0,
) -> Optional[ResolutionOracle]:
    """None when i preserves projectives, else an inflated closure seeded by the panel's quotient pieces"""
    if r.i_preserves_projectives:
        return None
    logger.warning(FALLBACK_WARNING)
    seeds = []
    for b in panel:
        seeds.append(kernel(counit_mu(r, b))[0])
        seeds.append(functor_i(r, functor_q(r, b)))
    return oracle_inflated_closure(r, oracle_a, seeds, caps, seed)


def _transport(
    r: Recollement,
    oracle_a: ResolutionOracle,
    fallback: Optional[ResolutionOracle],
    x: Module,
    depth: int,
    target: Module,
    seed: int,
) -> ExactChain:
    """Chain ending at target, a module stably isomorphic to syzygy^depth(x) for x killed by e"""
    if fallback is not None:
        return fallback.resolve(target)
    chain = oracle_a.lift(depth - oracle_a.n).resolve(functor_p(r, x))
    return normalize_tail(apply_to_chain(r.handle("i"), chain), target, seed)


@lru_cache(maxsize=4096)
def _main_pieces(
    r: Recollement,
    oracle_a: Optional[ResolutionOracle],
    oracle_c: ResolutionOracle,
    fallback: Optional[ResolutionOracle],
    seed: int,
) -> Tuple[Module, ...]:
    groups: List[Sequence[Module]] = []
    if fallback is not None:
        groups.append(fallback.pieces)
    elif oracle_a is not None:
        groups.append([functor_i(r, u) for u in oracle_a.pieces])
    groups.append([functor_l(r, u) for u in oracle_c.pieces])
    groups.append(projective_pieces(r.algebra))
    return tuple(merge_pieces(groups, seed))


def _split_at_second(full: ExactChain) -> Tuple[ShortExact, ExactChain]:
    """0 -> H -> T -> C -> 0 and 0 -> C -> ... -> tail -> 0 from a chain H -> T -> ..."""
    c_mod, onto = cokernel(full.maps[0])
    into = factor_through_epi(full.maps[1], onto)
    lower = ExactChain((c_mod,) + full.objects[2:], (into,) + full.maps[2:])
    return ShortExact(full.maps[0], onto), lower


def _gate(fragment: CertificateFragment, seed: int) -> CertificateFragment:
    if not _verify(fragment.chain, fragment.pieces, fragment.target, fragment.n, seed, fragment.m):
        raise CertificateRejected(
            f"{fragment.provenance}: chain of length {fragment.chain.length} for {fragment.target!r} "
            f"fails verification against ({fragment.m}, {fragment.n})"
        )
    return fragment


def _corner_chain(r: Recollement, oracle_c: ResolutionOracle, b: Module, t: int) -> ExactChain:
    return oracle_c.lift(t - oracle_c.n).resolve(functor_e(r, b))


def transform_main_1(
    r: Recollement,
    oracle_a: ResolutionOracle,
    oracle_c: ResolutionOracle,
    b: Module,
    seed: int = 0,
    fallback: Optional[ResolutionOracle] = None,
    caps: Optional[Caps] = None,
) -> Tuple[ExactChain, CertificateFragment]:
    """Chain of length at most 2m + n + 2 ending at syzygy^t(b), t = max(r, s), when l and p are exact"""
    _require(r, "l", "p")
    _check_sides(r, oracle_a, oracle_c)
    if fallback is None and not r.i_preserves_projectives:
        fallback = transport_fallback(r, oracle_a, [b], caps, seed)
    t = max(oracle_a.n, oracle_c.n)
    chain_c = _corner_chain(r, oracle_c, b, t)
    nn = chain_c.length
    full = prop1_full_chain(r, chain_c, b, t, seed)
    upper_ses, lower = _split_at_second(full)

    k = kernel(counit_mu(r, b))[0]
    iqb = functor_i(r, functor_q(r, b))
    first = _transport(r, oracle_a, fallback, k, t + nn, full.objects[1], seed)
    upper = splice(upper_ses, first, 0, seed)
    head = _transport(r, oracle_a, fallback, iqb, t + nn + 2 + first.length, upper.head, seed)
    result = connect(connect(head, upper), lower)

    m_a = 0 if fallback is not None else oracle_a.m
    fragment = CertificateFragment(
        b, result, 2 * m_a + oracle_c.m + 2, t,
        _main_pieces(r, oracle_a, oracle_c, fallback, seed), "transform_main_1", fallback=fallback is not None,
    )
    logger.debug(f"main transformer (1): length {result.length} <= {fragment.m} for {b!r}")
    return result, _gate(fragment, seed)


def transform_main_2(
    r: Recollement,
    oracle_a: ResolutionOracle,
    oracle_c: ResolutionOracle,
    b: Module,
    seed: int = 0,
    fallback: Optional[ResolutionOracle] = None,
    caps: Optional[Caps] = None,
) -> Tuple[ExactChain, CertificateFragment]:
    """Chain of length at most m + n + 1 ending at syzygy^t(b) when l, p and q are exact"""
    _require(r, "l", "p", "q")
    _check_sides(r, oracle_a, oracle_c)
    if fallback is None and not r.i_preserves_projectives:
        fallback = transport_fallback(r, oracle_a, [b], caps, seed)
    t = max(oracle_a.n, oracle_c.n)
    chain_c = _corner_chain(r, oracle_c, b, t)
    nn = chain_c.length
    lifted = prop1_qexact_chain(r, chain_c, b, t, seed)
    iqb = functor_i(r, functor_q(r, b))
    head = _transport(r, oracle_a, fallback, iqb, t + nn + 1, lifted.head, seed)
    result = connect(head, lifted)

    m_a = 0 if fallback is not None else oracle_a.m
    fragment = CertificateFragment(
        b, result, m_a + oracle_c.m + 1, t,
        _main_pieces(r, oracle_a, oracle_c, fallback, seed), "transform_main_2", fallback=fallback is not None,
    )
    logger.debug(f"main transformer (2): length {result.length} <= {fragment.m} for {b!r}")
    return result, _gate(fragment, seed)


def transform_gldim(
    r: Recollement,
    oracle_c: ResolutionOracle,
    cap: int,
    b: Module,
    seed: int = 0,
) -> Tuple[ExactChain, CertificateFragment]:
    """Chain for syzygy^t(b) using finite relative global dimension k.

    Cases: deep (t + n < k) extends by a projective resolution of the cokernel C,
    shallow uses the full chain as it is; with q exact the shorter chain is used
    and the deep case resolves its head instead.
    """
    _require(r, "l")
    _check_sides(r, None, oracle_c)
    k = relative_gldim(r, cap)
    if isinstance(k, ExceedsCap):
        raise RelativeGldimInfinite(f"relative global dimension exceeds {cap}")
    t = oracle_c.n
    chain_c = oracle_c.resolve(functor_e(r, b))
    nn = chain_c.length
    if r.q_exact:
        lifted = prop1_qexact_chain(r, chain_c, b, t, seed)
        if t + nn + 1 >= k:
            case, result, bound = CaseTag.SHALLOW_Q_EXACT, lifted, oracle_c.m + 1
        else:
            res = projective_resolution_chain(lifted.head, cap)
            case, result, bound = CaseTag.DEEP_Q_EXACT, connect(res, lifted), k - t
    else:
        full = prop1_full_chain(r, chain_c, b, t, seed)
        if t + nn >= k:
            case, result, bound = CaseTag.SHALLOW, full, oracle_c.m + 2
        else:
            _, lower = _split_at_second(full)
            res = projective_resolution_chain(lower.head, cap)
            if res.length > k - t - nn:
                raise CertificateRejected(f"cokernel has pd {res.length} > {k - t - nn}")
            case, result, bound = CaseTag.DEEP, connect(res, lower), k - t + 1
    fragment = CertificateFragment(
        b, result, bound, t, _main_pieces(r, None, oracle_c, None, seed), "transform_gldim", case=case,
    )
    logger.debug(f"relative gldim transformer: {case.value}, length {result.length} <= {bound}")
    return result, _gate(fragment, seed)


def descend_certificate(r: Recollement, oracle_b: ResolutionOracle, panel: Sequence[Module], seed: int = 0) -> ITCertificate:
    """Certificate for eAe from an oracle for A, witness e(U + A)"""
    _require(r, "l")
    if oracle_b.algebra is not r.algebra:
        raise AlgebraMismatch("descent needs an oracle over the recollement's algebra")
    k = oracle_b.n
    chains = []
    for c in panel:
        chain_b = oracle_b.resolve(functor_l(r, c))
        chains.append(descend_chain(r, chain_b, c, k, seed))
    groups = [[functor_e(r, u) for u in oracle_b.pieces], [functor_e(r, u) for u in projective_pieces(r.algebra)]]
    pieces = merge_pieces(groups, seed)
    return ITCertificate.assemble(r.corner_algebra, pieces, k, list(panel), chains, "descend_certificate", seed, oracle_b.m)


def certify_panel(
    r: Recollement,
    variant: str,
    oracle_a: Optional[ResolutionOracle],
    oracle_c: ResolutionOracle,
    panel: Sequence[Module],
    caps: Optional[Caps] = None,
    seed: int = 0,
) -> Tuple[ITCertificate, List[CertificateFragment]]:
    """Run one transformer over a panel and assemble the certificate"""
    caps = caps or Caps()
    if variant == "gldim":
        fragments = [transform_gldim(r, oracle_c, caps.pd_cap, b, seed)[1] for b in panel]
    else:
        fallback = transport_fallback(r, oracle_a, panel, caps, seed)
        transform = transform_main_1 if variant == "main_1" else transform_main_2
        fragments = [transform(r, oracle_a, oracle_c, b, seed, fallback, caps)[1] for b in panel]
    return certify(r.algebra, fragments, fragments[0].provenance if fragments else variant, seed), fragments


# End-to-end pipeline

@dataclass
class ClauseOutcome:
    name: str
    statement: str
    hypotheses: Dict[str, Optional[bool]]
    fires: Optional[bool]
    arity: Optional[Tuple[int, int]] = None
    bound: Optional[str] = None
    certificate: Optional[ITCertificate] = None
    note: Optional[str] = None

    def as_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "statement": self.statement,
            "hypotheses": dict(sorted(self.hypotheses.items())),
            "fires": self.fires,
            "arity": list(self.arity) if self.arity else None,
            "bound": self.bound,
            "note": self.note,
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate.summary().model_dump(mode="json")
            out["kind"] = self.certificate.kind
        return out


@dataclass
class PipelineOutcome:
    verts: Tuple[str, ...]
    exactness: Optional[ExactnessReport]
    standing: bool
    relative_gldim: Optional[PdValue] = None
    oracles: Dict[str, Dict[str, object]] = field(default_factory=dict)
    clauses: List[ClauseOutcome] = field(default_factory=list)
    descent: Optional[ITCertificate] = None
    it_interval: Optional[Tuple[int, int]] = None
    morita: Optional[Dict[str, object]] = None
    warnings: List[str] = field(default_factory=list)

    def clause(self, name: str) -> Optional[ClauseOutcome]:
        return next((c for c in self.clauses if c.name == name), None)

    def as_dict(self) -> Dict[str, object]:
        return {
            "verts": list(self.verts),
            "standing_hypothesis": self.standing,
            "exactness": self.exactness.as_dict() if self.exactness else None,
            "relative_gldim": None if self.relative_gldim is None else str(self.relative_gldim),
            "oracles": self.oracles,
            "clauses": {c.name: c.as_dict() for c in self.clauses},
            "descent": self.descent.summary().model_dump(mode="json") if self.descent else None,
            "it_interval": list(self.it_interval) if self.it_interval else None,
            "morita": self.morita,
        }

    def fill_report(self, report: Report) -> None:
        report.results.update(self.as_dict())
        report.add_check("standing hypothesis: eA projective over eAe", self.standing)
        for c in self.clauses:
            if c.fires:
                verified = c.certificate.verify() if c.certificate is not None else True
                report.add_check(f"clause {c.name}: {c.statement}", verified, f"arity {c.arity}")
            elif c.fires is None and all(v is not False for v in c.hypotheses.values()):
                report.add_check(f"clause {c.name}: {c.statement}", None, c.note)
        if self.descent is not None:
            report.add_check("descended corner certificate", self.descent.verify(), f"arity ({self.descent.m}, {self.descent.n})")
        for w in self.warnings:
            report.warn(w)


def _run_clause(outcome: ClauseOutcome, action) -> ClauseOutcome:
    if not all(outcome.hypotheses.values()):
        outcome.fires = False if any(v is False for v in outcome.hypotheses.values()) else None
        return outcome
    try:
        cert = action()
    except Inconclusive as exc:
        outcome.fires, outcome.note = None, str(exc)
        return outcome
    except RecollementToolkitError as exc:
        logger.error(f"clause {outcome.name} failed: {exc}")
        outcome.fires, outcome.note = None, f"{type(exc).__name__}: {exc}"
        return outcome
    outcome.fires, outcome.certificate = True, cert
    outcome.arity = (cert.m, cert.n)
    return outcome


def _morita_clauses(r: Recollement, outcome: PipelineOutcome, caps: Caps) -> None:
    try:
        mf = morita_functors(r)
    except NotMoritaProvenance:
        return
    facts = mf.facts()
    n_module = mf.b_only(mf.n_right)
    tight = tight_resolution_check(n_module, caps.pd_cap)
    pd_n = pd(mf.n_right, caps.pd_cap)
    main1, main2 = outcome.clause("1"), outcome.clause("2")
    ring = {
        "hypotheses": {
            "M_projective_left_B": facts["M_projective_left_B"],
            "N_projective_right_B": facts["N_projective_right_B"],
            "N_tensor_M_zero": facts["N_tensor_M_zero"],
        },
        "statement": "Morita ring is (2m+n+2, max{r,s})-Igusa-Todorov",
        "realised_by": main1.arity if main1 and main1.fires else None,
    }
    triangular = {
        "hypotheses": {"M_zero": facts["C_A_exact"], "N_projective_right_B": facts["N_projective_right_B"]},
        "statement": "triangular matrix algebra is (m+n+1, max{r,s})-Igusa-Todorov",
        "realised_by": main2.arity if main2 and main2.fires else None,
    }
    outcome.morita = {
        "facts": facts,
        "morita_ring": ring,
        "triangular": triangular,
        "N_B_tight_resolution": tight.b_tight,
        "pd_N_B": str(pd_n),
        "pd_bounds": {
            f"S({v})": pd_bound_check(mf, simple(mf.blocks.a, v), caps.pd_cap).as_dict()
            for v in mf.blocks.a.vertices
        },
    }


def corollary41_pipeline(
    a: Algebra,
    verts: Sequence[str],
    panel: Optional[Sequence[Module]] = None,
    caps: Optional[Caps] = None,
    seed: int = 0,
    strategy: StrategyChoice = StrategyChoice.AUTO,
) -> PipelineOutcome:
    """Hypotheses, oracles, transformers and certificates for the idempotent recollement at verts"""
    caps = caps or Caps()
    r = build(a, verts)
    exactness = exactness_report(r, seed, caps.probe_count)
    outcome = PipelineOutcome(tuple(verts), exactness, r.l_exact, warnings=[P_FORMULA_WARNING, PANEL_WARNING])
    if not r.l_exact:
        logger.warning("eA is not projective over eAe: no transformer runs")
        return outcome

    outcome.relative_gldim = relative_gldim(r, caps.pd_cap)
    oracles: Dict[str, Optional[ResolutionOracle]] = {}
    for side, alg in (("corner", r.corner_algebra), ("quotient", r.quotient_algebra)):
        try:
            oracles[side] = select_oracle(alg, strategy, caps, seed)
            outcome.oracles[side] = oracles[side].describe()
        except Inconclusive as exc:
            oracles[side] = None
            outcome.oracles[side] = {"inconclusive": str(exc)}
            outcome.warnings.append(f"{side} oracle inconclusive")
    oracle_a, oracle_c = oracles["quotient"], oracles["corner"]

    corner_panel = [simple(r.corner_algebra, v) for v in r.corner_algebra.vertices]
    lam_panel = list(panel) if panel is not None else default_panel(a, caps, seed)
    lam_panel += [x for x in (functor_l(r, c) for c in corner_panel) if x.dim]
    if not r.i_preserves_projectives:
        outcome.warnings.append(FALLBACK_WARNING)
    outcome.warnings.append(REPEATED_TERM_WARNING)

    have = {"oracle_A": oracle_a is not None, "oracle_C": oracle_c is not None}
    syz_finite = bool(
        oracle_a and oracle_c
        and oracle_a.strategy == OracleStrategy.SYZYGY_FINITE
        and oracle_c.strategy == OracleStrategy.SYZYGY_FINITE
    )
    finite_k = None if outcome.relative_gldim is None else not isinstance(outcome.relative_gldim, ExceedsCap)

    def run(variant):
        return lambda: certify_panel(r, variant, oracle_a, oracle_c, lam_panel, caps, seed)[0]

    c1 = _run_clause(ClauseOutcome("1", "(2m+n+2, max{r,s})-Igusa-Todorov", {"p": r.p_exact, **have}, None), run("main_1"))
    c2 = _run_clause(
        ClauseOutcome("2", "(m+n+1, max{r,s})-Igusa-Todorov", {"p": r.p_exact, "q": r.q_exact, **have}, None),
        run("main_2"),
    )
    c3 = ClauseOutcome(
        "3", "Igusa-Todorov algebra",
        {"p": r.p_exact, "q": r.q_exact, "both_syzygy_finite": syz_finite}, None,
    )
    if all(c3.hypotheses.values()) and c2.fires:
        c3.fires, c3.certificate, c3.arity = c2.certificate.m <= 1, c2.certificate, c2.arity
    else:
        c3.fires = False if not all(c3.hypotheses.values()) else c2.fires
    gldim_bound = "IT(eAe) <= IT(A) <= IT(eAe)+1" if r.q_exact else "IT(eAe) <= IT(A) <= IT(eAe)+2"
    c4 = _run_clause(
        ClauseOutcome("4", "relative global dimension bound", {"relative_gldim_finite": finite_k, "oracle_C": have["oracle_C"]}, None, bound=gldim_bound),
        run("gldim"),
    )
    c5 = ClauseOutcome("5", "IT distance bound from both sides", {"p": r.p_exact, **have}, None)
    if all(c5.hypotheses.values()):
        if r.q_exact:
            c5.bound = f"IT(eAe) <= IT(A) <= {oracle_a.m + oracle_c.m + 1}"
        else:
            c5.bound = f"IT(eAe) <= IT(A) <= {2 * oracle_a.m + oracle_c.m + 2}"
        c5.fires = bool(c1.fires or c2.fires)
        c5.certificate = c2.certificate if c2.fires else c1.certificate
        c5.arity = (c5.certificate.m, c5.certificate.n) if c5.certificate else None
    else:
        c5.fires = False
    outcome.clauses = [c1, c2, c3, c4, c5]

    fired = [c.certificate for c in (c2, c1, c4) if c.fires and c.certificate is not None]
    if fired:
        best = min(fired, key=lambda cert: cert.m)
        outcome.it_interval = (0, best.m)
        try:
            outcome.descent = descend_certificate(r, best.as_oracle(), corner_panel, seed)
        except RecollementToolkitError as exc:
            logger.error(f"descent failed: {exc}")
            outcome.warnings.append(f"descent failed: {type(exc).__name__}")
    _morita_clauses(r, outcome, caps)
    logger.info(f"pipeline at {list(verts)}: fired {[c.name for c in outcome.clauses if c.fires]}")
    return outcome

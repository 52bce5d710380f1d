"""
Idempotent recollements: construction, functors, exactness bits, chains and
the Morita ring layer
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from algebra import regular_bimodule, zero_bimodule
from errors import AlgebraMismatch, EmptyVertexSet, NotMoritaProvenance, QNotExact, UnknownVertex
from modcat import (
    ExactChain,
    ExceedsCap,
    is_iso,
    is_projective,
    projective,
    random_module,
    regular,
    simple,
    stably_isomorphic,
    syzygy_n,
)
from models import Caps
from recollement import (
    axiom_suite,
    bimodule_predicates,
    build,
    descend_chain,
    exactness_report,
    four_term,
    functor_e,
    functor_i,
    functor_l,
    functor_p,
    functor_q,
    morita_functors,
    pd_bound_check,
    prop1_full_chain,
    prop1_qexact_chain,
    q_exact_ses,
    tight_projective,
    tight_resolution_check,
)


@pytest.mark.parametrize(
    "fixture,dims",
    [
        ("worked_rec", (18, 6, 6, 12)),
        ("a2_rec_1", (3, 1, 1, 2)),
        ("a2_rec_2", (3, 1, 1, 2)),
        ("lambda_i_rec", (6, 1, 3, 3)),
    ],
)
def test_build_dimensions(request, fixture, dims):
    r = request.getfixturevalue(fixture)
    got = (r.algebra.dim, r.corner_algebra.dim, r.quotient_algebra.dim, r.ideal.shape[0])
    assert got == dims
    assert not r.degenerate


def test_build_degenerate(a2):
    r = build(a2, ("1", "2"))
    assert r.degenerate
    assert r.quotient_algebra.dim == 0
    assert r.corner_algebra.dim == a2.dim


def test_build_rejects_bad_vertex_sets(a2):
    with pytest.raises(EmptyVertexSet):
        build(a2, ())
    with pytest.raises(UnknownVertex):
        build(a2, ("9",))


@pytest.mark.parametrize("fixture", ["worked_rec", "a2_rec_1", "a2_rec_2", "lambda_i_rec"])
def test_axiom_suite(request, fixture):
    r = request.getfixturevalue(fixture)
    results = axiom_suite(r, seed=3, count=20)
    failing = [name for name, ok in results.items() if not ok]
    assert failing == []


def test_axiom_suite_degenerate(a2):
    assert all(axiom_suite(build(a2, ("1", "2"))).values())


def test_exactness_bits(worked_rec, a2_rec_1, a2_rec_2):
    rep = exactness_report(worked_rec)
    assert (rep.l_exact, rep.q_exact, rep.p_exact, rep.i_preserves_projectives) == (True, True, True, False)

    rep = exactness_report(a2_rec_1)
    assert (rep.l_exact, rep.q_exact, rep.p_exact, rep.i_preserves_projectives) == (True, False, True, True)

    rep = exactness_report(a2_rec_2)
    assert (rep.l_exact, rep.q_exact, rep.p_exact, rep.i_preserves_projectives) == (True, True, True, False)
    assert rep.warnings


def test_functor_on_wrong_algebra(worked_rec, a2):
    with pytest.raises(AlgebraMismatch):
        worked_rec.handle("e").apply(regular(a2))


def test_e_kills_inflated_modules(worked_rec):
    qa = worked_rec.quotient_algebra
    for v in qa.vertices:
        assert functor_e(worked_rec, functor_i(worked_rec, simple(qa, v))).dim == 0


def test_l_then_e_is_identity(worked_rec):
    c = worked_rec.corner_algebra
    for v in c.vertices:
        y = simple(c, v)
        assert is_iso(functor_e(worked_rec, functor_l(worked_rec, y)), y)


def test_functor_caches_are_bounded(a2_rec_1):
    c = a2_rec_1.corner_algebra
    y = simple(c, c.vertices[0])
    assert functor_l(a2_rec_1, y) is functor_l(a2_rec_1, y)
    for cached in (functor_e, functor_i, functor_p, projective, regular, simple):
        assert cached.cache_info().maxsize == 4096


def test_four_term_sequence(a2_rec_1):
    b = regular(a2_rec_1.algebra)
    chain = four_term(a2_rec_1, b)
    assert chain.length == 2
    assert chain.objects[2] is b
    assert chain.tail.dim == functor_q(a2_rec_1, b).dim


def test_four_term_kernel_vanishes_when_q_exact(worked_rec):
    rng = np.random.default_rng(11)
    for _ in range(3):
        chain = four_term(worked_rec, random_module(worked_rec.algebra, rng))
        assert chain.head.dim == 0


def test_q_exact_ses(a2_rec_2, a2_rec_1):
    b = regular(a2_rec_2.algebra)
    s = q_exact_ses(a2_rec_2, b)
    assert s.middle is b
    assert s.left.dim == 2 and s.right.dim == 1
    with pytest.raises(QNotExact):
        q_exact_ses(a2_rec_1, b)


@given(seed=st.integers(0, 2**32 - 1), t=st.integers(0, 1))
def test_qexact_chain_shape(worked_rec, seed, t):
    r = worked_rec
    b = random_module(r.algebra, np.random.default_rng(seed))
    chain = ExactChain.trivial(syzygy_n(functor_e(r, b), t))
    out = prop1_qexact_chain(r, chain, b, t)
    assert out.length == chain.length + 1
    assert out.head is syzygy_n(functor_i(r, functor_q(r, b)), t + chain.length + 1)
    assert out.tail is syzygy_n(b, t)


@given(seed=st.integers(0, 2**32 - 1))
def test_full_chain_shape(worked_rec, seed):
    r = worked_rec
    b = random_module(r.algebra, np.random.default_rng(seed))
    chain = ExactChain.trivial(functor_e(r, b))
    out = prop1_full_chain(r, chain, b, 0)
    assert out.length == chain.length + 2
    assert out.head is syzygy_n(functor_i(r, functor_q(r, b)), chain.length + 2)
    assert stably_isomorphic(out.tail, b)


def test_descend_chain(worked_rec):
    r = worked_rec
    c = r.corner_algebra
    for v in c.vertices:
        y = simple(c, v)
        lifted = ExactChain.trivial(syzygy_n(functor_l(r, y), 1))
        down = descend_chain(r, lifted, y, 1)
        assert down.tail is syzygy_n(y, 1)
        assert down.length == lifted.length


# Morita rings


@pytest.fixture(scope="module")
def triangular_rec(triangular):
    return build(triangular, triangular.morita.b_vertices)


@pytest.fixture(scope="module")
def triangular_dual_rec(triangular_dual):
    return build(triangular_dual, triangular_dual.morita.b_vertices)


def _panels(r):
    blocks = r.algebra.morita
    a, b, ring = blocks.a, blocks.b, r.algebra
    b_panel = [regular(b)] + [simple(b, v) for v in b.vertices]
    ring_panel = [regular(ring)] + [simple(ring, v) for v in ring.vertices] + [projective(ring, v) for v in ring.vertices]
    a_panel = [regular(a)] + [simple(a, v) for v in a.vertices]
    return b_panel, ring_panel, a_panel


@pytest.mark.parametrize("fixture", ["triangular_rec", "triangular_dual_rec"])
def test_morita_aliases_agree(request, fixture):
    r = request.getfixturevalue(fixture)
    mf = morita_functors(r)
    agreement = mf.agreement(*_panels(r))
    assert all(agreement.values()), agreement
    assert all(mf.facts().values())


def test_morita_functors_need_b_corner(triangular, a2_rec_1):
    with pytest.raises(NotMoritaProvenance):
        morita_functors(build(triangular, triangular.morita.a_vertices))
    with pytest.raises(NotMoritaProvenance):
        morita_functors(a2_rec_1)


def test_tight_projectives(triangular):
    pb = projective(triangular, "b:1")
    pa = projective(triangular, "a:1")
    assert tight_projective(pb, "B")
    assert not tight_projective(pb, "A")
    assert not tight_projective(pa, "A")
    with pytest.raises(ValueError):
        tight_projective(pb, "C")


def test_tight_projective_needs_morita_ring(a2):
    with pytest.raises(NotMoritaProvenance):
        tight_projective(projective(a2, "1"), "A")


def test_tight_resolution(triangular_rec):
    mf = morita_functors(triangular_rec)
    assert tight_resolution_check(mf.b_only(mf.n_right), 2).b_tight
    assert not tight_resolution_check(simple(triangular_rec.algebra, "a:1"), 2).a_tight


@pytest.mark.parametrize("fixture", ["triangular_rec", "triangular_dual_rec"])
def test_pd_bound_shifted(request, fixture):
    mf = morita_functors(request.getfixturevalue(fixture))
    check = pd_bound_check(mf, regular(mf.blocks.a))
    assert check.lhs == 1
    assert check.pd_x == 0 and check.pd_n_ring == 0
    assert check.n_b_tight
    assert check.holds is False
    assert check.holds_shifted is True


def test_n_right_is_projective_on_dual_numbers(triangular_dual_rec):
    mf = morita_functors(triangular_dual_rec)
    assert is_projective(mf.n_right)
    assert mf.n_right.dim == 2


def test_bimodule_predicates(dual_numbers):
    caps = Caps(tensor_power_cap=3)
    zero = bimodule_predicates(zero_bimodule(dual_numbers, dual_numbers), caps)
    assert zero.nilpotent == 1
    assert zero.perfect is True

    whole = bimodule_predicates(regular_bimodule(dual_numbers), caps)
    assert isinstance(whole.nilpotent, ExceedsCap)
    assert whole.pd_left == 0 and whole.pd_right == 0
    assert whole.left_perfect is None
    assert whole.as_dict()["nilpotent"] == str(ExceedsCap(3))

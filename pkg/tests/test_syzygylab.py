"""
Rotation, horseshoe, splicing and tail normalisation
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import ChainMismatch, FunctorNotProjectivePreserving, Inconclusive
from modcat import (
    ExactChain,
    ExceedsCap,
    ShortExact,
    direct_sum,
    is_iso,
    projective,
    random_module,
    random_ses,
    simple,
    stably_isomorphic,
    syzygy,
    syzygy_n,
)
from syzygylab import (
    apply_to_chain,
    connect,
    functor_syzygy_compare,
    horseshoe,
    iterate_horseshoe,
    normalize_tail,
    panel_relative_gldim,
    projective_resolution_chain,
    relative_gldim,
    rotate_ses,
    splice,
)

SEEDS = st.integers(0, 2**32 - 1)


def ses_chain(s):
    return ExactChain.from_maps([s.f, s.g])


@given(seed=SEEDS)
def test_rotate_ses(lambda_i, seed):
    s = random_ses(lambda_i, np.random.default_rng(seed))
    rot = rotate_ses(s)
    assert rot.left is syzygy(s.right)
    assert rot.right is s.middle
    assert rot.middle.dim == rot.left.dim + rot.right.dim
    ShortExact(rot.f, rot.g)
    assert stably_isomorphic(rot.middle, s.left)


@given(seed=SEEDS)
def test_horseshoe_end_terms(worked, seed):
    s = random_ses(worked, np.random.default_rng(seed))
    step = horseshoe(s)
    assert step.ses.left is syzygy(s.left)
    assert step.ses.right is syzygy(s.right)
    assert stably_isomorphic(step.ses.middle, syzygy(s.middle))


@given(seed=SEEDS, t=st.integers(0, 2))
def test_splice_length_law(a2, seed, t):
    s = random_ses(a2, np.random.default_rng(seed))
    level = iterate_horseshoe(s, t)
    chain = projective_resolution_chain(syzygy_n(s.middle, t))
    out = splice(s, chain, t)
    assert out.length == chain.length + 1
    assert out.head is syzygy_n(s.left, t + chain.length)
    assert stably_isomorphic(out.tail, level.right)


@given(seed=SEEDS, t=st.integers(0, 2))
def test_splice_trivial_chain(lambda_i, seed, t):
    s = random_ses(lambda_i, np.random.default_rng(seed))
    out = splice(s, ExactChain.trivial(syzygy_n(s.middle, t)), t)
    assert out.length == 1
    assert out.head is syzygy_n(s.left, t)


def test_connect_adds_lengths(a2):
    s1 = simple(a2, "1")
    res = projective_resolution_chain(s1)
    tail = ExactChain.trivial(s1)
    joined = connect(res, tail)
    assert joined.length == res.length + tail.length
    with pytest.raises(ChainMismatch):
        connect(tail, res)


def test_projective_resolution_chain(a2, dual_numbers):
    chain = projective_resolution_chain(simple(a2, "1"))
    assert chain.dims == [1, 2, 1]
    assert chain.length == 1
    with pytest.raises(Inconclusive):
        projective_resolution_chain(simple(dual_numbers, "1"), cap=4)


def test_normalize_tail_adds_projectives(a2):
    s1 = simple(a2, "1")
    chain = projective_resolution_chain(s1)
    target = direct_sum([s1, projective(a2, "1")])
    out = normalize_tail(chain, target)
    assert out.tail is target
    assert out.length == chain.length


def test_normalize_tail_splits_projectives(a2):
    s1 = simple(a2, "1")
    padded = direct_sum([s1, projective(a2, "1")])
    chain = normalize_tail(projective_resolution_chain(s1), padded)
    back = normalize_tail(chain, s1)
    assert back.tail is s1
    assert back.length == chain.length


def test_normalize_tail_rejects_other_stable_class(lambda_i):
    chain = ExactChain.trivial(simple(lambda_i, "1"))
    with pytest.raises(ChainMismatch):
        normalize_tail(chain, simple(lambda_i, "2"))


def test_apply_exact_functor_to_chain(worked_rec):
    rng = np.random.default_rng(7)
    s = random_ses(worked_rec.algebra, rng)
    image = apply_to_chain(worked_rec.handle("e"), ses_chain(s))
    assert image.length == 1
    assert image.tail.algebra is worked_rec.corner_algebra


def test_l_commutes_with_syzygies(worked_rec):
    c = worked_rec.corner_algebra
    for v in c.vertices:
        cmp = functor_syzygy_compare(worked_rec.handle("l"), simple(c, v), 2)
        assert cmp.holds


@given(seed=SEEDS, n=st.integers(0, 2))
def test_l_syzygy_comparison_on_random_modules(worked_rec, seed, n):
    y = random_module(worked_rec.corner_algebra, np.random.default_rng(seed))
    cmp = functor_syzygy_compare(worked_rec.handle("l"), y, n, seed=seed)
    assert cmp.holds
    assert stably_isomorphic(cmp.applied_then_syzygy, cmp.syzygy_then_applied)


@pytest.mark.parametrize("fixture", ["a2_rec_1", "lambda_i_rec"])
@given(seed=SEEDS, n=st.integers(0, 2))
def test_e_syzygy_comparison_on_random_modules(request, fixture, seed, n):
    r = request.getfixturevalue(fixture)
    x = random_module(r.algebra, np.random.default_rng(seed))
    assert functor_syzygy_compare(r.handle("e"), x, n, seed=seed).holds


def test_syzygy_comparison_needs_projective_preservation(worked_rec):
    qa = worked_rec.quotient_algebra
    with pytest.raises(FunctorNotProjectivePreserving):
        functor_syzygy_compare(worked_rec.handle("i"), simple(qa, qa.vertices[0]), 1)


def test_relative_gldim(a2_rec_1, a2_rec_2, worked_rec):
    assert relative_gldim(a2_rec_1) == 0
    assert relative_gldim(a2_rec_2) == 1
    assert isinstance(relative_gldim(worked_rec, cap=6), ExceedsCap)


def test_panel_relative_gldim(a2_rec_1, a2_rec_2):
    for r, expected in ((a2_rec_1, 0), (a2_rec_2, 1)):
        qa = r.quotient_algebra
        assert panel_relative_gldim(r, [simple(qa, v) for v in qa.vertices]) == expected


def test_lambda_i_syzygy_orbit(lambda_i):
    s1 = simple(lambda_i, "1")
    assert is_iso(syzygy_n(s1, 3), s1)

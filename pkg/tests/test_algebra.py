"""
Algebras from presentations, corners, quotients, tensors and Morita rings
"""

import numpy as np
import pytest

from algebra import (
    Arrow,
    QuiverPresentation,
    algebra_map_from_generators,
    build_from_presentation,
    corner,
    ideal_basis,
    morita_ring,
    quotient_by_idempotent_ideal,
    regular_bimodule,
    tensor,
    zero_bimodule,
)
from errors import BimoduleMismatch, NonAdmissible, RelationEndpointMismatch, UnknownVertex
from exactla import Field
from models import Provenance

F = Field(32003)


def a2_presentation(**changes):
    data = dict(
        vertices=("1", "2"),
        arrows=(Arrow("x", "1", "2"),),
        relations=(),
        nilpotency_bound=2,
    )
    data.update(changes)
    return QuiverPresentation(**data)


@pytest.mark.parametrize(
    "name, dim",
    [("a2", 3), ("lambda_i", 6), ("dual_numbers", 2), ("worked", 18), ("triangular", 3), ("triangular_dual", 5)],
)
def test_bundled_dimensions(request, name, dim):
    a = request.getfixturevalue(name)
    assert a.dim == dim
    assert all(a.check_invariants().values())


def test_a2_basis(a2):
    assert set(a2.basis_labels) == {"e_1", "e_2", "x"}
    assert a2.radical_basis.shape[0] == 1
    assert [g.name for g in a2.generators] == ["x"]


def test_relation_endpoint_mismatch_names_index():
    q = a2_presentation(relations=(((1, ("x", "x")),),))
    with pytest.raises(RelationEndpointMismatch) as info:
        build_from_presentation(q, F)
    assert info.value.index == 0


def test_unknown_arrow_endpoint():
    q = a2_presentation(arrows=(Arrow("x", "1", "3"),))
    with pytest.raises(UnknownVertex):
        build_from_presentation(q, F)


def test_bound_too_small_is_not_admissible():
    with pytest.raises(NonAdmissible):
        build_from_presentation(a2_presentation(nilpotency_bound=1), F)


def test_relation_touching_arrows_is_not_admissible():
    q = QuiverPresentation(
        vertices=("1",),
        arrows=(Arrow("x", "1", "1"),),
        relations=(((1, ("x",)),),),
        nilpotency_bound=2,
    )
    with pytest.raises(NonAdmissible):
        build_from_presentation(q, F)


def test_commutativity_relation_identifies_paths(worked):
    # b1 c2 = c1 a1, so only one length-two path survives per square
    long_paths = [lab for lab in worked.basis_labels if lab.count("*") == 1]
    assert len(long_paths) == 3


def test_a2_corner_and_quotient(a2):
    c, inc = corner(a2, ["2"])
    qa, proj = quotient_by_idempotent_ideal(a2, ["2"])
    assert c.dim == 1 and qa.dim == 1
    assert ideal_basis(a2, ["2"]).shape[0] == 2
    assert c.provenance == Provenance.CORNER
    assert np.array_equal(inc.apply(c.unit), a2.idempotent("2"))
    assert np.array_equal(proj.apply(a2.unit), qa.unit)


def test_worked_corner_quotient_ideal(worked):
    assert corner(worked, ["1", "2", "3"])[0].dim == 6
    assert quotient_by_idempotent_ideal(worked, ["1", "2", "3"])[0].dim == 6
    assert ideal_basis(worked, ["1", "2", "3"]).shape[0] == 12


def test_opposite_round_trip(lambda_i):
    op = lambda_i.opposite
    assert op.opposite is lambda_i
    assert op.provenance == Provenance.OPPOSITE
    assert all(op.check_invariants().values())


def test_tensor_dimension(lambda_i, a2):
    t = tensor(lambda_i, a2)
    assert t.dim == 18
    assert len(t.vertices) == 6
    assert t.provenance == Provenance.TENSOR


def test_identity_from_generators(a2):
    phi = algebra_map_from_generators(
        a2, a2, {"x": a2.generators[0].vector}, {v: a2.idempotent(v) for v in a2.vertices}
    )
    assert phi.is_isomorphism()


def test_morita_ring_blocks(triangular_dual):
    blocks = triangular_dual.morita
    assert blocks is not None
    assert blocks.a.dim == 1 and blocks.b.dim == 2
    assert set(blocks.b_vertices) == {"b:1"}


def test_morita_ring_rejects_swapped_bimodules(lambda_i, dual_numbers):
    m = zero_bimodule(lambda_i, dual_numbers)
    n = zero_bimodule(lambda_i, dual_numbers)
    with pytest.raises(BimoduleMismatch):
        morita_ring(lambda_i, dual_numbers, m, n)


def test_regular_bimodule_morita_ring(dual_numbers):
    r = regular_bimodule(dual_numbers)
    ring = morita_ring(dual_numbers, dual_numbers, r, r)
    assert ring.dim == 8
    assert all(ring.check_invariants().values())

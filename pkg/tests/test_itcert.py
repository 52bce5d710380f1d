"""
Oracles, chain verification, certificates, transformers and the pipeline
"""

import pytest

from errors import (
    AlgebraMismatch,
    CertificateRejected,
    Inconclusive,
    OracleRefusal,
    RelativeGldimInfinite,
)
from itcert import (
    FALLBACK_WARNING,
    ITCertificate,
    certify,
    corollary41_pipeline,
    default_panel,
    descend_certificate,
    merge_pieces,
    oracle_explicit_table,
    oracle_finite_gldim,
    oracle_syzygy_finite,
    select_oracle,
    syzygy_closure,
    transform_gldim,
    transform_main_1,
    transform_main_2,
    verify_chain,
    witness_of,
)
from modcat import ExactChain, ExceedsCap, direct_sum, projective, regular, simple, syzygy_n
from models import CaseTag, Caps, OracleStrategy, Report, StrategyChoice, Verdict
from syzygylab import projective_resolution_chain

SMALL = Caps(pd_cap=6, syzygy_depth_cap=2, probe_count=2)


# Closures and pieces


def test_syzygy_closure_on_rotating_simples(lambda_i):
    reps, converged = syzygy_closure(lambda_i, [simple(lambda_i, "1")], 3)
    assert converged and len(reps) == 3
    reps, converged = syzygy_closure(lambda_i, [simple(lambda_i, "1")], 1)
    assert not converged and len(reps) == 2


def test_syzygy_closure_rejects_foreign_modules(lambda_i, a2):
    with pytest.raises(AlgebraMismatch):
        syzygy_closure(lambda_i, [simple(a2, "1")], 2)


def test_merge_pieces_keeps_one_per_class(a2):
    s1 = simple(a2, "1")
    pieces = merge_pieces([[s1, s1], [direct_sum([s1, projective(a2, "1")])]])
    assert sorted(p.dim for p in pieces) == [1, 2]


def test_default_panel(a2):
    panel = default_panel(a2, Caps(random_panel_size=3), seed=5)
    assert len(panel) == 2 + 2 + 3
    assert all(x.dim for x in panel)


# Oracles


def test_select_oracle_syzygy_finite(lambda_i, dual_numbers):
    oracle = select_oracle(lambda_i, caps=SMALL)
    assert oracle.strategy == OracleStrategy.SYZYGY_FINITE
    assert (oracle.m, oracle.n) == (0, 0)
    assert len(oracle.representatives) == 3

    oracle = select_oracle(dual_numbers, StrategyChoice.SYZYGY_FINITE, SMALL)
    assert len(oracle.representatives) == 1


def test_select_oracle_gldim(a2, dual_numbers):
    oracle = select_oracle(a2, StrategyChoice.GLDIM, SMALL)
    assert oracle.strategy == OracleStrategy.FINITE_GLDIM
    assert (oracle.m, oracle.n) == (1, 0)
    with pytest.raises(Inconclusive):
        select_oracle(dual_numbers, StrategyChoice.GLDIM, SMALL)


def test_oracle_answers_verify(lambda_i):
    oracle = oracle_syzygy_finite(lambda_i, 1, caps=SMALL)
    for x in default_panel(lambda_i, SMALL):
        chain = oracle.resolve(x)
        assert verify_chain(chain, oracle.witness, x, 1, m=0)


def test_oracle_refuses_outside_class(a2):
    oracle = oracle_syzygy_finite(a2, 0, panel=[projective(a2, "1")], caps=SMALL)
    assert oracle.representatives == []
    with pytest.raises(OracleRefusal):
        oracle.resolve(simple(a2, "1"))


def test_oracle_lift_and_algebra_check(a2, lambda_i):
    oracle = oracle_finite_gldim(a2)
    deeper = oracle.lift(2)
    assert deeper.n == 2 and deeper.m == oracle.m
    assert oracle.lift(1).resolve(simple(a2, "1")).tail is syzygy_n(simple(a2, "1"), 1)
    with pytest.raises(ValueError):
        oracle.lift(-1)
    with pytest.raises(AlgebraMismatch):
        oracle.resolve(simple(lambda_i, "1"))


def test_explicit_table(a2):
    s1 = simple(a2, "1")
    oracle = oracle_explicit_table(a2, regular(a2), 1, 0, [(s1, projective_resolution_chain(s1))])
    assert oracle.resolve(s1).length == 1
    with pytest.raises(OracleRefusal):
        oracle.resolve(projective(a2, "1"))
    with pytest.raises(CertificateRejected):
        oracle_explicit_table(a2, regular(a2), 0, 0, [(s1, projective_resolution_chain(s1))])


# Verification and certificates


def test_verify_chain_negatives(dual_numbers, a2):
    s = simple(dual_numbers, "1")
    trivial = ExactChain.trivial(s)
    assert verify_chain(trivial, s, s, 0)
    assert not verify_chain(trivial, regular(dual_numbers), s, 0)
    assert not verify_chain(trivial, s, regular(dual_numbers), 0)

    s1 = simple(a2, "1")
    res = projective_resolution_chain(s1)
    assert verify_chain(res, regular(a2), s1, 0, m=1)
    assert not verify_chain(res, regular(a2), s1, 0, m=0)


def test_certificate_assembly(a2):
    oracle = oracle_finite_gldim(a2)
    panel = default_panel(a2, SMALL)
    chains = [oracle.resolve(x) for x in panel]
    cert = ITCertificate.assemble(a2, oracle.pieces, 0, panel, chains, "test", m=oracle.m)
    assert cert.verify()
    assert cert.kind == "Igusa-Todorov"
    summary = cert.summary()
    assert summary.panel_size == len(panel)
    assert all(c.verified for c in summary.chains)
    assert cert.as_oracle().resolve(panel[0]) is chains[0]

    with pytest.raises(CertificateRejected):
        ITCertificate.assemble(a2, oracle.pieces, 0, panel, chains[:-1], "test")
    with pytest.raises(CertificateRejected):
        ITCertificate.assemble(a2, oracle.pieces, 0, panel, chains, "test", m=0)


def test_certificate_kinds(lambda_i):
    oracle = oracle_syzygy_finite(lambda_i, 0, caps=SMALL)
    panel = [simple(lambda_i, v) for v in lambda_i.vertices]
    cert = ITCertificate.assemble(lambda_i, oracle.pieces, 0, panel, [oracle.resolve(x) for x in panel], "test")
    assert cert.m == 0
    assert cert.kind == "syzygy-finite"
    assert witness_of(lambda_i, oracle.pieces).dim == cert.witness.dim


def test_certify_needs_fragments(a2):
    with pytest.raises(CertificateRejected):
        certify(a2, [], "empty")


# Transformers


@pytest.fixture(scope="module")
def worked_oracles(worked_rec):
    return select_oracle(worked_rec.quotient_algebra, caps=SMALL), select_oracle(worked_rec.corner_algebra, caps=SMALL)


@pytest.mark.parametrize("vertex", ["1", "1'"])
def test_transform_main_2(worked_rec, worked_oracles, vertex):
    oracle_a, oracle_c = worked_oracles
    b = simple(worked_rec.algebra, vertex)
    chain, fragment = transform_main_2(worked_rec, oracle_a, oracle_c, b, caps=SMALL)
    assert fragment.m == 1
    assert fragment.fallback
    assert chain.length <= fragment.m
    assert verify_chain(chain, witness_of(worked_rec.algebra, fragment.pieces), b, fragment.n, m=fragment.m)


def test_transform_main_1(worked_rec, worked_oracles):
    oracle_a, oracle_c = worked_oracles
    b = simple(worked_rec.algebra, "2")
    chain, fragment = transform_main_1(worked_rec, oracle_a, oracle_c, b, caps=SMALL)
    assert fragment.m == 2
    assert chain.length <= 2


def test_transform_gldim_cases(a2_rec_1, a2_rec_2):
    b = regular(a2_rec_1.algebra)
    oracle_c = select_oracle(a2_rec_1.corner_algebra, caps=SMALL)
    chain, fragment = transform_gldim(a2_rec_1, oracle_c, 6, b)
    assert fragment.case == CaseTag.SHALLOW
    assert chain.length <= fragment.m

    oracle_c = select_oracle(a2_rec_2.corner_algebra, caps=SMALL)
    chain, fragment = transform_gldim(a2_rec_2, oracle_c, 6, b)
    assert fragment.case == CaseTag.SHALLOW_Q_EXACT
    assert chain.length <= fragment.m == 1


def test_transform_gldim_needs_finite_relative_gldim(worked_rec, worked_oracles):
    _, oracle_c = worked_oracles
    with pytest.raises(RelativeGldimInfinite):
        transform_gldim(worked_rec, oracle_c, 6, simple(worked_rec.algebra, "1"))


def test_descend_certificate(a2_rec_2):
    c = a2_rec_2.corner_algebra
    cert = descend_certificate(a2_rec_2, oracle_finite_gldim(a2_rec_2.algebra), [simple(c, v) for v in c.vertices])
    assert cert.algebra is c
    assert cert.verify()


def test_descend_certificate_checks_algebra(a2_rec_2, lambda_i):
    with pytest.raises(AlgebraMismatch):
        descend_certificate(a2_rec_2, select_oracle(lambda_i, caps=SMALL), [])


# Pipeline


@pytest.fixture(scope="module")
def worked_outcome(worked):
    return corollary41_pipeline(worked, ("1", "2", "3"), caps=SMALL)


def test_pipeline_on_worked_example(worked_outcome):
    out = worked_outcome
    assert out.standing
    assert isinstance(out.relative_gldim, ExceedsCap)
    c3 = out.clause("3")
    assert c3.fires and c3.certificate.m <= 1
    assert out.clause("4").fires is False
    assert out.it_interval is not None and out.it_interval[1] <= 1
    assert FALLBACK_WARNING in out.warnings
    assert out.descent is not None and out.descent.verify()
    assert out.morita is None


def test_pipeline_report(worked_outcome):
    report = Report(command=["itcert"])
    worked_outcome.fill_report(report)
    assert report.results["standing_hypothesis"] is True
    assert all(c.verdict == Verdict.PASS for c in report.checks)
    assert report.exit_code() == 0


def test_pipeline_on_a2(a2):
    out = corollary41_pipeline(a2, ("2",), caps=SMALL)
    assert out.standing
    assert out.relative_gldim == 1
    assert out.clause("2").fires
    assert out.clause("3").fires
    assert out.clause("4").fires
    assert out.clause("5").bound is not None


def test_pipeline_records_morita_data(triangular):
    out = corollary41_pipeline(triangular, triangular.morita.b_vertices, caps=SMALL)
    assert out.morita is not None
    assert out.morita["facts"]["C_A_exact"]
    bound = out.morita["pd_bounds"]["S(1)"]
    assert bound["holds_shifted"] is True

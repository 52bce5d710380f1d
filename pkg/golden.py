"""
Golden suite for the bundled worked example: the path algebra of the
two-layer triangle quiver, its recollement at the inner vertices, and the
Igusa-Todorov pipeline on it.

Every line is a report check. Failures, including unreadable data files,
become failed lines rather than exceptions.
"""

import logging
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import exactla as la
from algebra import Algebra, algebra_map_from_generators
from errors import Inconclusive, RecollementToolkitError
from itcert import PipelineOutcome, corollary41_pipeline, oracle_syzygy_finite
from modcat import Module, decompose, find_iso, is_iso, is_projective, projective, simple, syzygy
from models import Caps, Report
from recollement import AXIOM_PANEL_SIZE, Recollement, axiom_suite, build, exactness_report
from specio import load_algebra

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"
INNER = ("1", "2", "3")
OUTER = ("1'", "2'", "3'")

Outcome = Tuple[Optional[bool], Optional[str]]


def _gens(a: Algebra) -> Dict[str, np.ndarray]:
    return {g.name: g.vector for g in a.generators}


def _multiplicity(summands: Sequence[Tuple[Module, int]], target: Module, seed: int) -> int:
    return sum(k for m, k in summands if m.dim == target.dim and find_iso(m, target, seed) is not None)


class GoldenSuite:
    """Checks on the worked example read from a data directory"""

    def __init__(
        self, data_dir: Optional[Path] = None, seed: int = 0, caps: Optional[Caps] = None, prime: Optional[int] = None
    ):
        self.data_dir = Path(data_dir) if data_dir is not None else DATA_DIR
        self.seed = seed
        self.caps = caps or Caps()
        self.prime = prime
        self.logger = logging.getLogger(__name__)

    # Inputs

    @cached_property
    def lam(self) -> Algebra:
        return load_algebra(self.data_dir / "paper_example.json", self.prime)

    @cached_property
    def lam_tensor(self) -> Algebra:
        return load_algebra(self.data_dir / "paper_example_tensor.json", self.prime)

    @cached_property
    def lam_i(self) -> Algebra:
        return load_algebra(self.data_dir / "lambda_i.json", self.prime)

    @cached_property
    def lam_ii(self) -> Algebra:
        return load_algebra(self.data_dir / "lambda_ii.json", self.prime)

    @cached_property
    def rec(self) -> Recollement:
        return build(self.lam, INNER)

    @cached_property
    def pipeline(self) -> PipelineOutcome:
        return corollary41_pipeline(self.lam, INNER, caps=self.caps, seed=self.seed)

    # Dimensions

    def dimensions(self) -> Dict[str, int]:
        r = self.rec
        return {
            "Lambda": self.lam.dim,
            "eLe": r.corner_algebra.dim,
            "L/LeL": r.quotient_algebra.dim,
            "LeL": r.ideal.shape[0],
            "eL": r.e_lambda_rows.shape[0],
        }

    def check_dimensions(self) -> List[Tuple[str, Callable[[], Outcome]]]:
        expected = {"Lambda": 18, "eLe": 6, "L/LeL": 6, "LeL": 12, "eL": 6}

        def line(key):
            def run():
                got = self.dimensions()[key]
                return got == expected[key], f"{got}"
            return run

        return [(f"dim {key} = {value}", line(key)) for key, value in expected.items()]

    def check_tensor_dimension(self) -> Outcome:
        got = self.lam_tensor.dim
        return got == self.lam_i.dim * self.lam_ii.dim == 18, f"{self.lam_i.dim} * {self.lam_ii.dim} = {got}"

    # Isomorphisms by explicit generator images

    def check_tensor_iso(self) -> Outcome:
        """Presentation -> Lambda_I (x) Lambda_II: inner layer on the target vertex of A2"""
        li, lii, t = self.lam_i, self.lam_ii, self.lam_tensor
        gi, gii = _gens(li), _gens(lii)
        e_src, e_tgt = lii.idempotent("1"), lii.idempotent("2")
        vertex_images = {}
        gen_images = {}
        for k, v in enumerate(INNER, start=1):
            vertex_images[v] = np.kron(li.idempotent(v), e_tgt) % t.p
            vertex_images[f"{v}'"] = np.kron(li.idempotent(v), e_src) % t.p
            gen_images[f"a{k}"] = np.kron(gi[f"a{k}"], e_tgt) % t.p
            gen_images[f"b{k}"] = np.kron(gi[f"a{k}"], e_src) % t.p
            gen_images[f"c{k}"] = np.kron(li.idempotent(v), gii["x"]) % t.p
        phi = algebra_map_from_generators(self.lam, t, gen_images, vertex_images)
        return phi.is_isomorphism(), None

    def check_corner_iso(self) -> Outcome:
        r, src = self.rec, self.lam_i
        c, p = r.corner_algebra, self.lam.p
        gens = _gens(self.lam)
        incl = r.inclusion.matrix

        def pull(x):
            return la.solve(incl, x.reshape(1, -1), p)[0]

        phi = algebra_map_from_generators(
            src, c,
            {f"a{k}": pull(gens[f"a{k}"]) for k in (1, 2, 3)},
            {v: c.idempotent(v) for v in INNER},
        )
        return phi.is_isomorphism(), None

    def check_quotient_iso(self) -> Outcome:
        r, src = self.rec, self.lam_i
        q = r.quotient_algebra
        gens = _gens(self.lam)
        phi = algebra_map_from_generators(
            src, q,
            {f"a{k}": r.projection.apply(gens[f"b{k}"]) for k in (1, 2, 3)},
            {v: q.idempotent(f"{v}'") for v in INNER},
        )
        return phi.is_isomorphism(), None

    # Decompositions

    def check_e_lambda(self) -> Outcome:
        """eL as a left eLe-module is P(1) + P(2) + P(3)"""
        m = self.rec.e_lambda_module
        summands = decompose(m, self.seed, self.caps.decompose_trials)
        counts = {v: _multiplicity(summands, projective(m.algebra, v), self.seed) for v in INNER}
        total = sum(k for _, k in summands)
        return all(k == 1 for k in counts.values()) and total == 3, f"multiplicities {counts}"

    def check_ideal(self) -> Outcome:
        """(LeL)_L is P(1)^2 + P(2)^2 + P(3)^2"""
        m = self.rec.ideal_module
        summands = decompose(m, self.seed, self.caps.decompose_trials)
        counts = {v: _multiplicity(summands, projective(self.lam, v), self.seed) for v in INNER}
        total = sum(k for _, k in summands)
        return all(k == 2 for k in counts.values()) and total == 6, f"multiplicities {counts}"

    def check_quotient_left(self) -> Outcome:
        """L/LeL as a left module: projective, three summands of dimension 2 on the outer layer"""
        m = self.rec.quotient_left_module
        summands = decompose(m, self.seed, self.caps.decompose_trials)
        flat = [s for s, k in summands for _ in range(k)]
        supported = all(
            all(d == 0 for v, d in s.dimension_vector.items() if v not in OUTER) for s in flat
        )
        ok = is_projective(m) and len(flat) == 3 and all(s.dim == 2 for s in flat) and supported
        return ok, f"summand dims {sorted(s.dim for s in flat)}"

    def check_exactness(self) -> Outcome:
        rep = exactness_report(self.rec, self.seed, self.caps.probe_count)
        ok = rep.l_exact and rep.q_exact and rep.p_exact and not rep.i_preserves_projectives
        return ok, f"l {rep.l_exact}, q {rep.q_exact}, p {rep.p_exact}, i projective {rep.i_preserves_projectives}"

    def check_axioms(self) -> Outcome:
        results = axiom_suite(self.rec, self.seed, AXIOM_PANEL_SIZE)
        failed = [name for name, ok in results.items() if not ok]
        return not failed, f"failing: {failed}" if failed else f"{len(results)} axioms"

    # Syzygy-finiteness of Lambda_I

    def check_lambda_i_closure(self) -> Outcome:
        a = self.lam_i
        oracle = oracle_syzygy_finite(a, 1, caps=self.caps, seed=self.seed)
        reps = oracle.representatives
        simples = [simple(a, v) for v in a.vertices]
        covered = all(any(is_iso(s, u, self.seed) for u in reps) for s in simples)
        return covered and len(reps) == len(simples), f"{len(reps)} representatives"

    def check_lambda_i_rotation(self) -> Outcome:
        a = self.lam_i
        succ = {x.source: x.target for x in a.presentation.arrows}
        ok = all(is_iso(syzygy(simple(a, v)), simple(a, succ[v]), self.seed) for v in a.vertices)
        return ok, f"successor map {succ}"

    # Pipeline

    def check_standing(self) -> Outcome:
        return self.pipeline.standing, None

    def check_clause3_hypotheses(self) -> Outcome:
        c3 = self.pipeline.clause("3")
        if c3 is None:
            return False, "clause 3 missing"
        return all(c3.hypotheses.values()), f"{dict(sorted(c3.hypotheses.items()))}"

    def check_clause3_certificate(self) -> Outcome:
        c3 = self.pipeline.clause("3")
        if c3 is None or c3.certificate is None:
            return (None if c3 is not None and c3.fires is None else False), "no certificate"
        return bool(c3.fires) and c3.certificate.verify(), f"{c3.certificate.kind} {c3.arity}"

    def check_chain_lengths(self) -> Outcome:
        outcome = self.pipeline
        c3 = outcome.clause("3")
        if c3 is None or c3.certificate is None:
            return False, "no certificate"
        bound = outcome.oracles["quotient"]["m"] + outcome.oracles["corner"]["m"] + 1
        longest = max((c.length for c in c3.certificate.chains), default=0)
        return longest <= bound, f"longest {longest}, bound {bound}"

    # Driver

    def lines(self) -> List[Tuple[str, Callable[[], Outcome]]]:
        return self.check_dimensions() + [
            ("tensor constructor: dim Lambda_I * dim Lambda_II = 18", self.check_tensor_dimension),
            ("Lambda_I (x) Lambda_II isomorphic to the presentation", self.check_tensor_iso),
            ("eLe isomorphic to Lambda_I", self.check_corner_iso),
            ("L/LeL isomorphic to Lambda_I", self.check_quotient_iso),
            ("eL = P(1)+P(2)+P(3) as a left eLe-module", self.check_e_lambda),
            ("(LeL)_L = P(1)^2+P(2)^2+P(3)^2", self.check_ideal),
            ("L/LeL projective left module with three outer summands of dim 2", self.check_quotient_left),
            ("l, q, p exact and i does not preserve projectives", self.check_exactness),
            ("recollement axioms on seeded panels of 20 random modules", self.check_axioms),
            ("Lambda_I syzygy-finite at depth 1 with representatives S(1), S(2), S(3)", self.check_lambda_i_closure),
            ("Lambda_I: syzygy of S(t) is S(succ t)", self.check_lambda_i_rotation),
            ("pipeline: standing hypothesis holds", self.check_standing),
            ("pipeline: clause 3 hypotheses hold", self.check_clause3_hypotheses),
            ("pipeline: clause 3 fires with a verified Igusa-Todorov certificate", self.check_clause3_certificate),
            ("pipeline: chain lengths within m+n+1", self.check_chain_lengths),
        ]

    def run(self, report: Report) -> Report:
        for name, check in self.lines():
            try:
                passed, detail = check()
            except Inconclusive as exc:
                passed, detail = None, str(exc)
            except (RecollementToolkitError, KeyError, ValueError) as exc:
                self.logger.error(f"golden line {name!r} failed: {exc}")
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            report.add_check(name, passed, detail)
        try:
            report.results["dimensions"] = self.dimensions()
            outcome = self.pipeline
            report.results["clauses"] = {c.name: c.as_dict() for c in outcome.clauses}
            report.results["it_interval"] = list(outcome.it_interval) if outcome.it_interval else None
            for w in outcome.warnings:
                report.warn(w)
        except RecollementToolkitError as exc:
            report.warn(f"worked example unavailable: {type(exc).__name__}")
        return report


def run_golden_suite(report: Report, data_dir: Optional[Path] = None, seed: int = 0, caps: Optional[Caps] = None) -> Report:
    return GoldenSuite(data_dir, seed, caps, report.prime).run(report)

"""
Spec file loading, validation errors with locations, panels and emitters
"""

import json

import pytest

from errors import SpecFileError
from modcat import is_iso, projective, simple
from models import Caps, Provenance
from specio import (
    SpecValidator,
    emit_algebra,
    emit_module,
    load_algebra,
    load_module,
    parse_panel,
    write_spec,
)


def _write(tmp_path, name, data):
    target = tmp_path / name
    target.write_text(data if isinstance(data, str) else json.dumps(data))
    return target


A2 = {
    "quiver": {"vertices": ["1", "2"], "arrows": [{"name": "x", "source": "1", "target": "2"}]},
    "relations": [],
    "nilpotency_bound": 2,
}


class TestLoadAlgebra:
    def test_presentation(self, data_dir):
        a = load_algebra(data_dir / "a2.json")
        assert a.dim == 3
        assert a.provenance == Provenance.QUIVER
        assert a.presentation is not None

    def test_tensor_directive(self, data_dir):
        a = load_algebra(data_dir / "paper_example_tensor.json")
        assert a.dim == 18
        assert a.provenance == Provenance.TENSOR

    @pytest.mark.parametrize("name,dim", [("triangular.json", 3), ("triangular_dual.json", 5)])
    def test_morita_directive(self, data_dir, name, dim):
        a = load_algebra(data_dir / name)
        assert a.dim == dim
        assert a.provenance == Provenance.MORITA
        assert a.morita.m.dim == 0

    def test_not_json(self, tmp_path):
        path = _write(tmp_path, "bad.json", "{not json")
        with pytest.raises(SpecFileError) as exc:
            load_algebra(path)
        assert str(path) in exc.value.location

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpecFileError, match="cannot read"):
            load_algebra(tmp_path / "absent.json")

    def test_presentation_needs_bound(self, tmp_path):
        path = _write(tmp_path, "nobound.json", {"quiver": A2["quiver"]})
        with pytest.raises(SpecFileError, match="nilpotency_bound"):
            load_algebra(path)

    def test_field_location(self, tmp_path):
        path = _write(tmp_path, "noprime.json", {**A2, "prime": 32004})
        with pytest.raises(SpecFileError) as exc:
            load_algebra(path)
        assert exc.value.location.endswith(":prime")

    def test_prime_too_large(self, tmp_path):
        path = _write(tmp_path, "big.json", {**A2, "prime": 2147483647})
        with pytest.raises(SpecFileError, match="overflow") as exc:
            load_algebra(path)
        assert exc.value.location.endswith(":prime")

    def test_run_prime_fills_in(self, data_dir):
        assert load_algebra(data_dir / "a2.json").p == 32003
        assert load_algebra(data_dir / "a2.json", 7).p == 7
        t = load_algebra(data_dir / "paper_example_tensor.json", 11)
        assert t.p == 11 and t.dim == 18

    def test_stated_prime_must_match_run_prime(self, tmp_path):
        path = _write(tmp_path, "a2_p5.json", {**A2, "prime": 5})
        assert load_algebra(path).p == 5
        assert load_algebra(path, 5).p == 5
        with pytest.raises(SpecFileError) as exc:
            load_algebra(path, 7)
        assert exc.value.location.endswith(":prime")

    def test_relation_location(self, tmp_path):
        spec = {
            "quiver": {
                "vertices": ["1", "2", "3"],
                "arrows": [
                    {"name": "a", "source": "1", "target": "2"},
                    {"name": "b", "source": "2", "target": "3"},
                ],
            },
            "relations": [[{"path": ["a", "b"]}], [{"path": ["a", "b"]}, {"path": ["a"]}]],
            "nilpotency_bound": 3,
        }
        path = _write(tmp_path, "mixed.json", spec)
        with pytest.raises(SpecFileError) as exc:
            load_algebra(path)
        assert exc.value.location.endswith(":relations.1")

    def test_vertex_list_validated(self, tmp_path):
        spec = {"quiver": {"vertices": ["1", "1"], "arrows": []}, "nilpotency_bound": 1}
        path = _write(tmp_path, "dup.json", spec)
        with pytest.raises(SpecFileError) as exc:
            load_algebra(path)
        assert "quiver.vertices" in exc.value.location

    def test_directive_cycle(self, tmp_path):
        path = _write(tmp_path, "loop.json", {"provenance": {"tensor": {"left": "loop.json", "right": "loop.json"}}})
        with pytest.raises(SpecFileError, match="refers back"):
            load_algebra(path)

    def test_directive_needs_one_kind(self, tmp_path):
        path = _write(tmp_path, "empty.json", {"provenance": {}})
        with pytest.raises(SpecFileError):
            load_algebra(path)


class TestLoadModule:
    def test_simple_and_projective(self, data_dir, a2):
        s1 = load_module(data_dir / "modules" / "a2_s1.json", a2)
        p1 = load_module(data_dir / "modules" / "a2_p1.json", a2)
        assert s1.name == "S1"
        assert is_iso(s1, simple(a2, "1"))
        assert is_iso(p1, projective(a2, "1"))

    def test_unknown_vertex(self, tmp_path, a2):
        path = _write(tmp_path, "m.json", {"dims": {"9": 1}})
        with pytest.raises(SpecFileError) as exc:
            load_module(path, a2)
        assert exc.value.location.endswith(":dims.9")

    def test_unknown_arrow(self, tmp_path, a2):
        path = _write(tmp_path, "m.json", {"dims": {"1": 1}, "arrows": {"y": [[1]]}})
        with pytest.raises(SpecFileError) as exc:
            load_module(path, a2)
        assert exc.value.location.endswith(":arrows")

    def test_negative_dimension(self, tmp_path, a2):
        path = _write(tmp_path, "m.json", {"dims": {"1": -1}})
        with pytest.raises(SpecFileError, match="non-negative"):
            load_module(path, a2)

    def test_relation_violated(self, tmp_path, lambda_i):
        spec = {"dims": {"1": 1, "2": 1, "3": 1}, "arrows": {"a1": [[1]], "a2": [[1]]}}
        path = _write(tmp_path, "m.json", spec)
        with pytest.raises(SpecFileError) as exc:
            load_module(path, lambda_i)
        assert exc.value.location.endswith(":arrows")


class TestPanels:
    def test_keywords(self, a2):
        panel = parse_panel("simples, projectives, random:2", a2, Caps(), seed=1)
        assert len(panel) == 6
        assert all(x.dim for x in panel)

    def test_module_paths(self, data_dir, a2):
        panel = parse_panel("a2_s1.json,a2_p1.json", a2, Caps(), base=data_dir / "modules")
        assert [x.dim for x in panel] == [1, 2]

    def test_empty_and_bad(self, a2):
        assert parse_panel(None, a2, Caps()) is None
        with pytest.raises(SpecFileError, match="empty"):
            parse_panel(" , ", a2, Caps())
        with pytest.raises(SpecFileError, match="random count"):
            parse_panel("random:many", a2, Caps())

    def test_vertex_sets(self, a2):
        assert SpecValidator.parse_vertex_list(" 1, 2 ,") == ["1", "2"]
        assert SpecValidator.validate_vertex_set(a2, ["1"]) == []
        issues = SpecValidator.validate_vertex_set(a2, ["1", "1", "7"])
        assert len(issues) == 2
        assert SpecValidator.validate_vertex_set(a2, []) == ["vertex set is empty"]


class TestEmitters:
    def test_presentation_reloads(self, tmp_path, a2):
        path = write_spec(emit_algebra(a2), tmp_path / "a2.json")
        again = load_algebra(path)
        assert again.dim == a2.dim
        assert again.basis_labels == a2.basis_labels

    def test_structure_constants_reload(self, tmp_path, data_dir):
        t = load_algebra(data_dir / "triangular_dual.json")
        data = emit_algebra(t)
        assert "structure" in data
        again = load_algebra(write_spec(data, tmp_path / "t.json"))
        assert again.dim == t.dim
        assert again.provenance == Provenance.MORITA
        assert again.vertices == t.vertices

    def test_module_reloads(self, tmp_path, worked, data_dir):
        c1 = load_module(data_dir / "modules" / "paper_c1.json", worked)
        again = load_module(write_spec(emit_module(c1), tmp_path / "c1.json"), worked)
        assert is_iso(again, c1)

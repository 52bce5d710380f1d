"""
Spec files: loading and validating algebra and module specs, panels and
vertex sets, and emitting constructed objects back to spec form
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Set

import numpy as np
from pydantic import ValidationError

from algebra import (
    Algebra,
    Arrow,
    BimoduleData,
    QuiverPresentation,
    build_from_presentation,
    morita_ring,
    tensor,
)
from errors import RecollementToolkitError, RelationEndpointMismatch, SpecFileError, UnknownVertex
from exactla import DEFAULT_PRIME, Field
from modcat import Module, from_representation, projective, random_module, simple
from models import AlgebraSpecFile, BimoduleSpec, Caps, ModuleSpecFile, Provenance, StructureSpec

logger = logging.getLogger(__name__)


class SpecValidator:
    """Checks on user-supplied identifiers"""

    @staticmethod
    def validate_vertex_set(a: Algebra, verts: Sequence[str]) -> List[str]:
        """Problems with a vertex set given on the command line"""
        issues = []
        if not verts:
            issues.append("vertex set is empty")
        known = set(a.vertices)
        for v in verts:
            if v not in known:
                issues.append(f"unknown vertex {v!r}; vertices are {list(a.vertices)}")
        if len(set(verts)) != len(verts):
            issues.append("vertex set has repeated labels")
        return issues

    @staticmethod
    def parse_vertex_list(text: str) -> List[str]:
        return [v.strip() for v in text.split(",") if v.strip()]

    @staticmethod
    def validate_generator_names(a: Algebra, names: Sequence[str]) -> List[str]:
        known = {g.name for g in a.generators}
        return [f"unknown arrow {n!r}; generators are {sorted(known)}" for n in names if n not in known]


def _location(path: Path, loc: Sequence[Any]) -> str:
    return f"{path}:" + ".".join(str(x) for x in loc) if loc else str(path)


def _read(path: Path, model):
    try:
        text = path.read_text()
    except OSError as e:
        raise SpecFileError(str(path), f"cannot read: {e}")
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        raise SpecFileError(_location(path, first["loc"]), first["msg"])


def _action_array(rows, count: int, dim: int, path: Path, where: str) -> np.ndarray:
    if dim == 0 and not rows:
        return np.zeros((count, 0, 0), dtype=np.int64)
    arr = np.asarray(rows, dtype=np.int64)
    if arr.shape != (count, dim, dim):
        raise SpecFileError(f"{path}:{where}", f"expected shape {(count, dim, dim)}, got {arr.shape}")
    return arr


def _bimodule(spec: BimoduleSpec, left: Algebra, right: Algebra, path: Path, where: str) -> BimoduleData:
    p = left.p
    data = BimoduleData(
        left,
        right,
        spec.dim,
        _action_array(spec.left_action, left.dim, spec.dim, path, f"{where}.left_action") % p,
        _action_array(spec.right_action, right.dim, spec.dim, path, f"{where}.right_action") % p,
    )
    try:
        return data.verify()
    except RecollementToolkitError as e:
        raise SpecFileError(f"{path}:{where}", f"not a bimodule: {e}")


def _from_structure(spec: StructureSpec, field: Field, path: Path) -> Algebra:
    d = len(spec.labels)
    mult = np.zeros((d, d, d), dtype=np.int64)
    for entry in spec.mult:
        if len(entry) != 4 or not all(0 <= x < d for x in entry[:3]):
            raise SpecFileError(f"{path}:structure.mult", f"bad entry {entry}")
        i, j, k, c = entry
        mult[i, j, k] = c % field.p
    try:
        provenance = Provenance(spec.provenance)
    except ValueError:
        raise SpecFileError(f"{path}:structure.provenance", f"unknown provenance {spec.provenance!r}")
    radical = np.asarray(spec.radical, dtype=np.int64).reshape(-1, d) % field.p
    a = Algebra(
        field=field,
        basis_labels=tuple(spec.labels),
        mult=mult,
        unit=np.asarray(spec.unit, dtype=np.int64) % field.p,
        idempotents=tuple((v, np.asarray(e, dtype=np.int64) % field.p) for v, e in spec.idempotents.items()),
        radical_basis=radical,
        provenance=provenance,
    )
    try:
        return a.verify()
    except RecollementToolkitError as e:
        raise SpecFileError(f"{path}:structure", str(e))


def load_algebra(path, prime: Optional[int] = None, _seen: Optional[Set[Path]] = None) -> Algebra:
    """Algebra from a presentation, a structure-constant table or a constructor directive"""
    path = Path(path).resolve()
    seen = set(_seen or ())
    if path in seen:
        raise SpecFileError(str(path), "directive refers back to itself")
    seen.add(path)
    spec = _read(path, AlgebraSpecFile)
    if spec.prime is not None and prime is not None and spec.prime != prime:
        raise SpecFileError(f"{path}:prime", f"spec file is over F_{spec.prime} but the run field is F_{prime}")
    try:
        field = Field(spec.prime if spec.prime is not None else prime or DEFAULT_PRIME)
    except ValueError as e:
        raise SpecFileError(f"{path}:prime", str(e))
    prime = field.p

    if spec.structure is not None:
        a = _from_structure(spec.structure, field, path)
    elif spec.provenance is not None and spec.provenance.tensor is not None:
        directive = spec.provenance.tensor
        left = load_algebra(path.parent / directive.left, prime, seen)
        right = load_algebra(path.parent / directive.right, prime, seen)
        try:
            a = tensor(left, right)
        except RecollementToolkitError as e:
            raise SpecFileError(f"{path}:provenance.tensor", str(e))
    elif spec.provenance is not None:
        directive = spec.provenance.morita
        a_alg = load_algebra(path.parent / directive.a, prime, seen)
        b_alg = load_algebra(path.parent / directive.b, prime, seen)
        m = _bimodule(directive.m, b_alg, a_alg, path, "provenance.morita.m")
        n = _bimodule(directive.n, a_alg, b_alg, path, "provenance.morita.n")
        try:
            a = morita_ring(a_alg, b_alg, m, n)
        except RecollementToolkitError as e:
            raise SpecFileError(f"{path}:provenance.morita", str(e))
    else:
        q = QuiverPresentation(
            vertices=tuple(spec.quiver.vertices),
            arrows=tuple(Arrow(x.name, x.source, x.target) for x in spec.quiver.arrows),
            relations=tuple(tuple((t.coefficient, tuple(t.path)) for t in rel) for rel in spec.relations),
            nilpotency_bound=spec.nilpotency_bound,
        )
        try:
            a = build_from_presentation(q, field)
        except RelationEndpointMismatch as e:
            raise SpecFileError(f"{path}:relations.{e.index}", str(e))
        except RecollementToolkitError as e:
            raise SpecFileError(f"{path}:quiver", str(e))
    logger.info(f"loaded {a!r} from {path.name}")
    return a


def load_module(path, a: Algebra) -> Module:
    """Module from a representation: one space per vertex, one matrix per generator"""
    path = Path(path)
    spec = _read(path, ModuleSpecFile)
    known = set(a.vertices)
    for v in spec.dims:
        if v not in known:
            raise SpecFileError(f"{path}:dims.{v}", f"unknown vertex; vertices are {list(a.vertices)}")
    issues = SpecValidator.validate_generator_names(a, list(spec.arrows))
    if issues:
        raise SpecFileError(f"{path}:arrows", issues[0])
    matrices = {name: np.asarray(rows, dtype=np.int64) for name, rows in spec.arrows.items()}
    try:
        return from_representation(a, spec.dims, matrices, spec.name or path.stem)
    except (UnknownVertex, ValueError) as e:
        raise SpecFileError(f"{path}:dims", str(e))
    except RecollementToolkitError as e:
        raise SpecFileError(f"{path}:arrows", f"representation rejected: {e}")


def parse_panel(text: Optional[str], a: Algebra, caps: Caps, seed: int = 0, base: Optional[Path] = None) -> Optional[List[Module]]:
    """Comma-separated panel entries: simples, projectives, random:k or module spec paths"""
    if not text:
        return None
    rng = np.random.default_rng(seed)
    panel: List[Module] = []
    for token in (t.strip() for t in text.split(",")):
        if not token:
            continue
        if token == "simples":
            panel += [simple(a, v) for v in a.vertices]
        elif token == "projectives":
            panel += [projective(a, v) for v in a.vertices]
        elif token.startswith("random:"):
            try:
                count = int(token.split(":", 1)[1])
            except ValueError:
                raise SpecFileError("--panel", f"bad random count in {token!r}")
            panel += [random_module(a, rng) for _ in range(count)]
        else:
            target = Path(token) if base is None else base / token
            panel.append(load_module(target, a))
    if not panel:
        raise SpecFileError("--panel", "panel is empty")
    logger.debug(f"panel of {len(panel)} modules from {text!r}")
    return [m for m in panel if m.dim]


# Emitters

def emit_algebra(a: Algebra) -> Dict[str, Any]:
    """Spec dictionary that reloads to an isomorphic algebra"""
    if a.presentation is not None:
        q = a.presentation
        return {
            "prime": a.p,
            "quiver": {
                "vertices": list(q.vertices),
                "arrows": [{"name": x.name, "source": x.source, "target": x.target} for x in q.arrows],
            },
            "relations": [[{"coefficient": int(c), "path": list(w)} for c, w in rel] for rel in q.relations],
            "nilpotency_bound": q.nilpotency_bound,
        }
    nz = np.argwhere(a.mult % a.p)
    return {
        "prime": a.p,
        "structure": {
            "labels": list(a.basis_labels),
            "mult": [[int(i), int(j), int(k), int(a.mult[i, j, k] % a.p)] for i, j, k in nz],
            "unit": [int(x) for x in a.unit % a.p],
            "idempotents": {v: [int(x) for x in e % a.p] for v, e in a.idempotents},
            "radical": (a.radical_basis % a.p).tolist(),
            "provenance": a.provenance.value,
        },
    }


def emit_module(m: Module) -> Dict[str, Any]:
    """Representation form of a module in a basis adapted to the vertices"""
    blocks = m.generator_blocks
    return {
        "dims": {v: int(k) for v, k in m.dimension_vector.items()},
        "arrows": {
            g.name: (block % m.p).tolist()
            for g, block in zip(m.algebra.generators, blocks)
            if block.size
        },
        "name": m.name,
    }


def write_spec(data: Dict[str, Any], path) -> Path:
    target = Path(path)
    target.write_text(json.dumps(data, indent=2, sort_keys=True))
    logger.info(f"wrote {target}")
    return target

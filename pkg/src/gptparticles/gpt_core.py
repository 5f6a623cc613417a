"""Data model for GPT systems: single systems, finite transformation
groups, and composition of identical systems into multipartite state
spaces (minimal / maximal tensor product or an explicit vertex list)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ClosureExceeded, InvalidTransformation, InvalidVertexList
from .exact_linalg import (
    Matrix,
    Polytope,
    Vector,
    enumerate_vertices,
    hull_membership,
    is_extreme_among,
    kron_vec,
    vec,
    vec_dot,
)

DEFAULT_MAX_GROUP_SIZE = 10 ** 6


@dataclass(frozen=True)
class GptSystem:
    """A single system: extremal states plus the unit effect."""

    name: str
    dim: int
    vertices: Polytope
    unit_effect: Vector

    def __post_init__(self):
        if self.vertices.ambient_dim != self.dim:
            raise ValueError("vertex dimension mismatch")
        for v in self.vertices.vertices:
            if vec_dot(self.unit_effect, v) != 1:
                raise ValueError("vertex not normalized by the unit effect")


class TransformationGroup:
    """Finite matrix group given by generators, closed on demand."""

    def __init__(self, dim: int, generators, elements=None):
        self.dim = dim
        self.generators = tuple(generators)
        for g in self.generators:
            if g.rows != dim or g.cols != dim:
                raise ValueError("generator dimension mismatch")
        self._elements = tuple(elements) if elements is not None else None

    def closure(self, max_size: int = DEFAULT_MAX_GROUP_SIZE) -> tuple[Matrix, ...]:
        if self._elements is None:
            self._elements = group_closure(self, max_size)
        return self._elements

    def __repr__(self):
        n = "?" if self._elements is None else len(self._elements)
        return f"TransformationGroup(dim={self.dim}, generators={len(self.generators)}, order={n})"


def group_closure(g: TransformationGroup,
                  max_size: int = DEFAULT_MAX_GROUP_SIZE) -> tuple[Matrix, ...]:
    """Breadth-first closure under multiplication, deterministic order.

    Permutation-matrix generators are composed as index tuples; everything
    else multiplies exactly.  Raises ClosureExceeded past max_size.
    """
    if not g.generators:
        return (Matrix.identity(g.dim),)
    perms = [m.as_permutation() for m in g.generators]
    if all(p is not None for p in perms):
        ident = tuple(range(g.dim))
        seen = {ident}
        order = [ident]
        frontier = [ident]
        while frontier:
            nxt = []
            for e in frontier:
                for p in perms:
                    prod = tuple(p[e[j]] for j in range(g.dim))
                    if prod not in seen:
                        if len(seen) >= max_size:
                            raise ClosureExceeded(
                                f"group closure exceeded {max_size} elements")
                        seen.add(prod)
                        order.append(prod)
                        nxt.append(prod)
            frontier = nxt
        return tuple(Matrix.from_perm(p) for p in order)
    ident = Matrix.identity(g.dim)
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for e in frontier:
            for m in g.generators:
                prod = m @ e
                if prod not in seen:
                    if len(seen) >= max_size:
                        raise ClosureExceeded(
                            f"group closure exceeded {max_size} elements")
                    seen.add(prod)
                    order.append(prod)
                    nxt.append(prod)
        frontier = nxt
    return tuple(order)


@dataclass(frozen=True)
class CompositionRule:
    """min_tensor, max_tensor, or an explicit composite vertex list."""

    tag: str  # "min_tensor" | "max_tensor" | "explicit"
    explicit_vertices: tuple[Vector, ...] | None = None

    def __post_init__(self):
        if self.tag not in ("min_tensor", "max_tensor", "explicit"):
            raise ValueError(f"unknown composition rule {self.tag!r}")
        if self.tag == "explicit" and not self.explicit_vertices:
            raise ValueError("explicit rule needs explicit_vertices")
        if self.tag != "explicit" and self.explicit_vertices is not None:
            raise ValueError("explicit_vertices only valid for tag='explicit'")


@dataclass
class CompositeSystem:
    """An n-party composite of identical systems."""

    parts: tuple[GptSystem, ...]
    rule: CompositionRule
    dim: int
    vertices: Polytope
    unit_effect: Vector
    group: TransformationGroup
    perm_ops: dict[tuple[int, ...], Matrix]

    @property
    def n_parties(self) -> int:
        return len(self.parts)

    @property
    def local_dim(self) -> int:
        return self.parts[0].dim

    def swap_op(self) -> Matrix:
        """The operator exchanging the first two parties."""
        sigma = tuple([1, 0] + list(range(2, self.n_parties)))
        return self.perm_ops[sigma]


def party_permutation_matrix(d: int, n: int, sigma: tuple[int, ...]) -> Matrix:
    """Permutation of tensor factors: factor at slot i moves to slot sigma[i].

    Acts on basis vectors by e_{i_1..i_n} -> e_{j_1..j_n} with
    j_{sigma(k)} = i_k, so that composition satisfies
    R(sigma) R(tau) = R(sigma o tau).
    """
    if sorted(sigma) != list(range(n)):
        raise ValueError("not a permutation")
    size = d ** n
    perm = [0] * size
    for idx in itertools.product(range(d), repeat=n):
        out = [0] * n
        for k, i in enumerate(idx):
            out[sigma[k]] = i
        src = 0
        for i in idx:
            src = src * d + i
        dst = 0
        for i in out:
            dst = dst * d + i
        perm[src] = dst
    return Matrix.from_perm(tuple(perm))


def effect_vertices(system: GptSystem) -> list[Vector]:
    """Extremal effects of the no-restriction effect polytope
    {e : 0 <= <e, v> <= 1 for all extremal states v}, zero excluded."""
    one = Fraction(1)
    ineqs = []
    for v in system.vertices.vertices:
        ineqs.append((tuple(-x for x in v), Fraction(0)))  # <e, v> >= 0
        ineqs.append((v, one))                             # <e, v> <= 1
    verts = enumerate_vertices(ineqs, [], system.dim)
    zero = tuple(Fraction(0) for _ in range(system.dim))
    return [e for e in verts if e != zero]


def _min_tensor_vertices(parts) -> list[Vector]:
    out = []
    for combo in itertools.product(*(p.vertices.vertices for p in parts)):
        v = combo[0]
        for w in combo[1:]:
            v = kron_vec(v, w)
        out.append(v)
    return out


def _max_tensor_vertices(parts, unit: Vector) -> list[Vector]:
    effs = [effect_vertices(p) for p in parts]
    ineqs = []
    for combo in itertools.product(*effs):
        e = combo[0]
        for f in combo[1:]:
            e = kron_vec(e, f)
        ineqs.append((tuple(-x for x in e), Fraction(0)))  # <e, x> >= 0
    dim = 1
    for p in parts:
        dim *= p.dim
    return enumerate_vertices(ineqs, [(unit, Fraction(1))], dim)


def compose(parts, rule: CompositionRule, group_gens) -> CompositeSystem:
    """Build the composite state space of identical parts under a rule.

    Raises InvalidVertexList for explicit non-extremal lists and
    InvalidTransformation when a generator leaves the state space.
    """
    parts = tuple(parts)
    if not parts:
        raise ValueError("no parts")
    d = parts[0].dim
    if any(p.dim != d for p in parts):
        raise ValueError("only identical systems compose here")
    n = len(parts)
    dim = d ** n
    unit = parts[0].unit_effect
    for p in parts[1:]:
        unit = kron_vec(unit, p.unit_effect)

    if rule.tag == "min_tensor":
        verts = _min_tensor_vertices(parts)
    elif rule.tag == "max_tensor":
        verts = _max_tensor_vertices(parts, unit)
    else:
        verts = [vec(v) for v in rule.explicit_vertices]
        seen = set()
        for v in verts:
            if len(v) != dim:
                raise InvalidVertexList("explicit vertex has wrong dimension")
            if vec_dot(unit, v) != 1:
                raise InvalidVertexList("explicit vertex not normalized")
            if v in seen:
                raise InvalidVertexList("duplicate explicit vertex")
            seen.add(v)
        for i, v in enumerate(verts):
            if not is_extreme_among(v, verts[:i] + verts[i + 1:]):
                raise InvalidVertexList(
                    f"explicit vertex {i} is a mixture of the others")

    poly = Polytope(dim, tuple(verts))
    perm_ops = {sigma: party_permutation_matrix(d, n, sigma)
                for sigma in itertools.permutations(range(n))}
    group = TransformationGroup(dim, group_gens)

    vert_set = set(verts)
    for gi, g in enumerate(group.generators):
        for v in poly.vertices:
            image = g.apply(v)
            if image in vert_set:
                continue
            if not hull_membership(image, poly):
                raise InvalidTransformation(
                    f"generator {gi} maps a vertex outside the state space")
    return CompositeSystem(parts=parts, rule=rule, dim=dim, vertices=poly,
                           unit_effect=unit, group=group, perm_ops=perm_ops)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_theory(c: CompositeSystem) -> ValidationReport:
    """Full consistency check; violations come back as data, not errors."""
    report = ValidationReport()
    verts = c.vertices.vertices
    vert_set = set(verts)

    for i, v in enumerate(verts):
        if vec_dot(c.unit_effect, v) != 1:
            report.violations.append(f"vertex {i} not normalized to 1")
    for i, v in enumerate(verts):
        if not is_extreme_among(v, list(verts[:i]) + list(verts[i + 1:])):
            report.violations.append(f"vertex {i} is not extremal")

    n = c.n_parties
    ident = tuple(range(n))
    for sigma, op in c.perm_ops.items():
        mapped = [op.apply(v) for v in verts]
        if set(mapped) != vert_set:
            report.violations.append(
                f"perm_op {sigma} does not permute the vertex set")
    swap = tuple([1, 0] + list(range(2, n)))
    if swap in c.perm_ops:
        P = c.perm_ops[swap]
        if P @ P != Matrix.identity(c.dim):
            report.violations.append("swap not self-inverse")
    for sigma in c.perm_ops:
        for tau in c.perm_ops:
            prod = tuple(sigma[tau[k]] for k in range(n))
            if c.perm_ops[sigma] @ c.perm_ops[tau] != c.perm_ops[prod]:
                report.violations.append(
                    f"perm_ops violate the group law at {sigma}*{tau}")
    if c.perm_ops.get(ident) != Matrix.identity(c.dim):
        report.violations.append("identity permutation operator is wrong")

    for gi, g in enumerate(c.group.generators):
        for v in verts:
            image = g.apply(v)
            if image in vert_set:
                continue
            if not hull_membership(image, c.vertices):
                report.violations.append(
                    f"generator {gi} maps a vertex outside the state space")
                break
    return report

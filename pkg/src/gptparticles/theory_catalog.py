"""Built-in, pre-validated theories: classical simplices, the square-state
Boxworld pair, the convexified toy theory with a knowledge-balance
restriction, and qubit composites (handled by the quantum backend)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BadParams, InvalidTransformation, UnknownTheory, UnsupportedArity
from .exact_linalg import Matrix, Polytope, Vector, kron_vec, vec
from .gpt_core import (
    CompositeSystem,
    CompositionRule,
    GptSystem,
    compose,
    party_permutation_matrix,
)
from .quantum_backend import QuantumComposite

F = Fraction


@dataclass
class TheorySpec:
    """A catalog entry: single system plus per-party-count composition."""

    name: str
    backend: str  # "polytopal" | "quantum"
    system: GptSystem | None
    provenance_notes: str
    params: dict = field(default_factory=dict)
    _composites: dict = field(default_factory=dict, repr=False)

    def composite(self, n: int = 2) -> CompositeSystem:
        if self.backend != "polytopal":
            raise UnsupportedArity("quantum theories do not build polytopal composites")
        if n not in self._composites:
            self._composites[n] = _build_composite(self, n)
        return self._composites[n]

    def quantum(self, n: int | None = None) -> QuantumComposite:
        if self.backend != "quantum":
            raise UnsupportedArity(f"{self.name} has no quantum composite")
        n = n if n is not None else self.params.get("parties", 2)
        if n not in (2, 3, 4):
            raise BadParams("qubit composites support 2 to 4 parties")
        return QuantumComposite(d=2, n=n)


def _unit_vec(n: int, i: int) -> Vector:
    return tuple(F(1) if j == i else F(0) for j in range(n))


def _sd_generators(d: int) -> list[Matrix]:
    """Transposition and full cycle generate all relabellings."""
    gens = [Matrix.from_perm(tuple([1, 0] + list(range(2, d))))]
    if d > 2:
        gens.append(Matrix.from_perm(tuple(list(range(1, d)) + [0])))
    return gens


def _embed_at_slot(g: Matrix, d: int, n: int, slot: int) -> Matrix:
    from .exact_linalg import tensor_product
    m = None
    for k in range(n):
        factor = g if k == slot else Matrix.identity(d)
        m = factor if m is None else tensor_product(m, factor)
    return m


# ---------------------------------------------------------------------------
# classical simplices
# ---------------------------------------------------------------------------


def _classical_system(d: int) -> GptSystem:
    verts = Polytope(d, tuple(_unit_vec(d, i) for i in range(d)))
    return GptSystem(name=f"classical-{d}", dim=d, vertices=verts,
                     unit_effect=tuple(F(1) for _ in range(d)))


def _classical_composite_gens(d: int, n: int) -> list[Matrix]:
    """Local relabellings of every slot plus party permutations: together
    these generate the full relabelling group of the composite simplex,
    which acts transitively on its vertices."""
    gens = [_embed_at_slot(g, d, n, 0) for g in _sd_generators(d)]
    gens.append(party_permutation_matrix(d, n, tuple([1, 0] + list(range(2, n)))))
    if n > 2:
        gens.append(party_permutation_matrix(d, n, tuple(list(range(1, n)) + [0])))
    return gens


# ---------------------------------------------------------------------------
# boxworld (square state space, maximal tensor product)
# ---------------------------------------------------------------------------

_BOX_ROT = Matrix.from_rows([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
_BOX_REF = Matrix.from_rows([[0, 1, 0], [1, 0, 0], [0, 0, 1]])


def _boxworld_system() -> GptSystem:
    verts = Polytope(3, (vec([1, 1, 1]), vec([-1, 1, 1]),
                         vec([-1, -1, 1]), vec([1, -1, 1])))
    return GptSystem(name="boxworld", dim=3, vertices=verts,
                     unit_effect=vec([0, 0, 1]))


def _boxworld_composite_gens(n: int) -> list[Matrix]:
    if n != 2:
        raise UnsupportedArity("boxworld composites are implemented for pairs")
    from .exact_linalg import tensor_product
    I3 = Matrix.identity(3)
    gens = [tensor_product(g, I3) for g in (_BOX_ROT, _BOX_REF)]
    gens += [tensor_product(I3, g) for g in (_BOX_ROT, _BOX_REF)]
    gens.append(party_permutation_matrix(3, 2, (1, 0)))
    return gens


# ---------------------------------------------------------------------------
# convexified toy theory with a knowledge-balance restriction
# ---------------------------------------------------------------------------

# Two-system entangling gate as a permutation of the 16 ontic pairs
# (flat index 4a + b).  Derived by constraint search over the group
# generated by local relabellings, the system swap and the ontic CNOT
# (z_t += z_c, x_c += x_t on bit-encoded ontic states):
#   * commutes with the system swap (so it preserves symmetric states),
#   * maps each pure epistemic state to a pure epistemic state,
#   * sends the separable seed to an entangled state,
#   * together with the diagonal relabellings splits the 16 symmetric
#     pure states into the three diagonal-ontic-count classes 0 / 2 / 4.
# 96 permutations satisfy all four; this is the lexicographically least
# involution, equal to swap . (t x 1) . CNOT . (t x 1) with t = (1 2).
_TOY_GATE_PERM = (0, 6, 8, 14, 9, 15, 1, 7, 2, 4, 10, 12, 11, 13, 3, 5)


def _toy_single_states() -> list[Vector]:
    half = F(1, 2)
    out = []
    for a, b in itertools.combinations(range(4), 2):
        v = [F(0)] * 4
        v[a] = half
        v[b] = half
        out.append(tuple(v))
    return out


def _toy_pair_states() -> list[Vector]:
    """All pure bipartite states: the local-relabelling classes of the
    separable seed (support {0,1} x {0,1}) and the entangled seed
    (support = the ontic diagonal)."""
    quarter = F(1, 4)

    def from_support(cells) -> Vector:
        v = [F(0)] * 16
        for (a, b) in cells:
            v[4 * a + b] = quarter
        return tuple(v)

    states = set()
    seeds = [
        [(a, b) for a in (0, 1) for b in (0, 1)],
        [(i, i) for i in range(4)],
    ]
    for seed in seeds:
        for s in itertools.permutations(range(4)):
            for t in itertools.permutations(range(4)):
                states.add(from_support([(s[a], t[b]) for (a, b) in seed]))
    return sorted(states)


def _toy_composite_gens() -> list[Matrix]:
    from .exact_linalg import tensor_product
    gens = [tensor_product(g, g) for g in _sd_generators(4)]
    gens.append(Matrix.from_perm(_TOY_GATE_PERM))
    return gens


def _check_toy_gate() -> None:
    gate = Matrix.from_perm(_TOY_GATE_PERM)
    swap = party_permutation_matrix(4, 2, (1, 0))
    if gate @ swap != swap @ gate:
        raise InvalidTransformation("toy gate must commute with the swap")
    if gate @ gate != Matrix.identity(16):
        raise InvalidTransformation("toy gate is expected to be an involution")


# ---------------------------------------------------------------------------
# catalog assembly
# ---------------------------------------------------------------------------


def _build_composite(spec: TheorySpec, n: int) -> CompositeSystem:
    name = spec.params["kind"]
    if name == "classical":
        d = spec.system.dim
        rule = CompositionRule(tag="min_tensor")
        gens = _classical_composite_gens(d, n)
    elif name == "boxworld":
        rule = CompositionRule(tag="max_tensor")
        gens = _boxworld_composite_gens(n)
    elif name == "spekkens":
        if n != 2:
            raise UnsupportedArity("toy-theory composites are implemented for pairs")
        rule = CompositionRule(tag="explicit",
                               explicit_vertices=tuple(_toy_pair_states()))
        gens = _toy_composite_gens()
    elif name == "file":
        if n != spec.params["parties"]:
            raise UnsupportedArity(
                f"theory file declares {spec.params['parties']} parties")
        rule = spec.params["rule"]
        gens = spec.params["generators"]
    else:
        raise UnknownTheory(name)
    return compose([spec.system] * n, rule, gens)


def load_builtin(name: str, d: int | None = None,
                 parties: int | None = None) -> TheorySpec:
    """Load a catalog theory.

    classical takes d >= 2; qubit takes parties in {2, 3, 4}; boxworld and
    spekkens take no parameters.
    """
    if name == "classical":
        if d is None:
            d = 2
        if not isinstance(d, int) or d < 2:
            raise BadParams("classical theory needs integer d >= 2")
        if parties is not None and parties < 2:
            raise BadParams("need at least two parties")
        return TheorySpec(
            name=f"classical-{d}", backend="polytopal",
            system=_classical_system(d),
            provenance_notes=(
                "d-outcome simplex; transformations are outcome relabellings; "
                "composites take the minimal tensor product with the full "
                "relabelling group of the composite simplex"),
            params={"kind": "classical", "d": d})
    if name == "boxworld":
        if d is not None:
            raise BadParams("boxworld takes no dimension parameter")
        return TheorySpec(
            name="boxworld", backend="polytopal", system=_boxworld_system(),
            provenance_notes=(
                "square state space (+-1, +-1, 1) with unit effect (0,0,1) and "
                "the 8 square symmetries; pairs take the maximal tensor "
                "product (the no-signaling polytope) with local symmetries "
                "on each side plus the system swap"),
            params={"kind": "boxworld"})
    if name == "spekkens":
        if d is not None:
            raise BadParams("the toy theory takes no dimension parameter")
        _check_toy_gate()
        return TheorySpec(
            name="spekkens", backend="polytopal",
            system=GptSystem(name="spekkens", dim=4,
                             vertices=Polytope(4, tuple(_toy_single_states())),
                             unit_effect=tuple(F(1) for _ in range(4))),
            provenance_notes=(
                "4 ontic states per system, pure epistemic states uniform "
                "over 2 of them (an octahedron); bipartite pure states are "
                "the local-relabelling classes of a separable and an "
                "entangled seed (60 states); symmetric transformations are "
                "diagonal relabellings plus a swap-commuting entangling "
                "gate derived from the ontic CNOT by relabelling (see "
                "comment at _TOY_GATE_PERM)"),
            params={"kind": "spekkens"})
    if name == "qubit":
        if d not in (None, 2):
            raise BadParams("the qubit theory has local dimension 2")
        n = parties if parties is not None else 2
        if n not in (2, 3, 4):
            raise BadParams("qubit composites support 2 to 4 parties")
        return TheorySpec(
            name=f"qubit-pairs-{n}", backend="quantum", system=None,
            provenance_notes=(
                "complex qubits; states are density operators, "
                "transformations unitary conjugations; handled numerically "
                "by the quantum backend"),
            params={"kind": "qubit", "d": 2, "parties": n})
    raise UnknownTheory(f"no builtin theory named {name!r}")


BUILTIN_NAMES = ("classical", "boxworld", "spekkens", "qubit")

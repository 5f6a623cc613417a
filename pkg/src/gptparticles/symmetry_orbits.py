"""Orbit pipeline for particle types: symmetric pure states, the
swap-preserving subgroup, orbit partitions under both groups, and the
containment map from symmetric orbits to base orbits."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import OrbitEscape
from .exact_linalg import (
    Matrix,
    Polytope,
    Subspace,
    Vector,
    extreme_points,
    hull_membership,
)
from .gpt_core import (
    CompositeSystem,
    TransformationGroup,
    party_permutation_matrix,
)


def permutation_operator(d: int, n: int, sigma) -> Matrix:
    """The d^n x d^n 0/1 matrix permuting tensor factors by sigma."""
    return party_permutation_matrix(d, n, tuple(sigma))


def symmetric_subspace(c: CompositeSystem) -> Subspace:
    """Joint fixed space of all party permutation operators."""
    n = c.n_parties
    gens = [tuple([1, 0] + list(range(2, n)))]
    if n > 2:
        gens.append(tuple(list(range(1, n)) + [0]))
    rows = []
    ident = Matrix.identity(c.dim)
    for sigma in gens:
        diff = c.perm_ops[sigma] - ident
        rows.extend(diff.to_rows())
    m = Matrix.from_rows(rows)
    return Subspace(c.dim, tuple(m.nullspace()))


@dataclass(frozen=True)
class SymmetricStateSet:
    """Symmetric pure states under one of the two conventions.

    Option I: extremal points of the symmetric-state set (slice vertices).
    Option II: symmetric members of the composite extremal states.
    """

    option: str  # "I" | "II"
    states: tuple[Vector, ...]


def symmetric_extremal_states(c: CompositeSystem, option: str) -> SymmetricStateSet:
    if option not in ("I", "II"):
        raise ValueError("option must be 'I' or 'II'")
    if option == "II":
        n = c.n_parties
        gens = [tuple([1, 0] + list(range(2, n)))]
        if n > 2:
            gens.append(tuple(list(range(1, n)) + [0]))
        ops = [c.perm_ops[s] for s in gens]
        states = tuple(v for v in c.vertices.vertices
                       if all(op.apply(v) == v for op in ops))
    else:
        # The symmetric slice of a permutation-invariant polytope is the
        # image of the permutation-averaging map: symmetric states are its
        # fixed points and averages of states stay in the polytope.  Its
        # vertices are therefore the extreme points among the averaged
        # vertices, which avoids a facet enumeration.
        ops = list(c.perm_ops.values())
        E = Matrix.zeros(c.dim, c.dim)
        for op in ops:
            E = E + op
        E = E.scale(Fraction(1, len(ops)))
        states = tuple(extreme_points([E.apply(v) for v in c.vertices.vertices]))
    return SymmetricStateSet(option=option, states=tuple(sorted(states)))


def symmetry_preserving_subgroup(g: TransformationGroup, P: Matrix,
                                 sym: Subspace,
                                 max_size: int | None = None) -> TransformationGroup:
    """Subgroup of transformations commuting with the swap on the symmetric
    subspace; equivalently (used here) those mapping it into itself.

    If every generator already qualifies the whole group does, and no
    closure is taken.  Otherwise the closure is filtered; the filtered set
    is itself a subgroup (the condition is closed under products, and under
    inverses in a finite group) and is returned as its own generator set.
    """

    def preserves(T: Matrix) -> bool:
        for b in sym.basis:
            image = T.apply(b)
            if P.apply(image) != image:
                return False
        return True

    if all(preserves(m) for m in g.generators):
        return TransformationGroup(g.dim, g.generators,
                                   elements=g._elements)
    kwargs = {} if max_size is None else {"max_size": max_size}
    elements = g.closure(**kwargs)
    kept = tuple(T for T in elements if preserves(T))
    return TransformationGroup(g.dim, kept, elements=kept)


@dataclass(frozen=True)
class Orbit:
    representative: Vector
    members: tuple[Vector, ...]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class OrbitPartition:
    orbits: tuple[Orbit, ...]
    group_tag: str  # "full" | "symmetric"

    def __len__(self) -> int:
        return len(self.orbits)

    def index_of(self, state: Vector) -> int | None:
        for i, orb in enumerate(self.orbits):
            if state in orb.members:
                return i
        return None


def orbit_partition(states, g: TransformationGroup, group_tag: str = "full",
                    within: Polytope | None = None) -> OrbitPartition:
    """Partition states into group orbits by breadth-first closure.

    Orbits are sorted by their lexicographically least member, which also
    serves as the canonical representative, so the result is independent
    of generator and visitation order.
    """
    if isinstance(states, SymmetricStateSet):
        states = states.states
    state_list = list(states)
    state_set = set(state_list)
    unassigned = dict.fromkeys(state_list)
    orbits = []
    while unassigned:
        seed = next(iter(unassigned))
        members = {seed}
        frontier = [seed]
        while frontier:
            s = frontier.pop()
            for T in g.generators:
                image = T.apply(s)
                if image in members:
                    continue
                if image not in state_set:
                    if within is not None and not hull_membership(image, within):
                        raise OrbitEscape(
                            "a group element maps a state outside the state space")
                    raise OrbitEscape(
                        "group does not preserve the given state set")
                members.add(image)
                frontier.append(image)
        for m in members:
            unassigned.pop(m, None)
        ordered = tuple(sorted(members))
        orbits.append(Orbit(representative=ordered[0], members=ordered))
    orbits.sort(key=lambda o: o.representative)
    return OrbitPartition(orbits=tuple(orbits), group_tag=group_tag)


@dataclass
class ParticleTypeReport:
    """Output of the orbit pipeline for one theory and option."""

    theory_name: str
    option: str
    full_orbits: OrbitPartition
    symmetric_orbits: OrbitPartition
    f_map: dict[int, int | None]
    types_per_base_orbit: dict[int, list[int]] = field(default_factory=dict)
    unbased_types: list[int] = field(default_factory=list)
    hull_generators: dict[int, tuple[Vector, ...]] = field(default_factory=dict)

    @property
    def n_types(self) -> int:
        return len(self.symmetric_orbits.orbits)


def particle_type_report(c: CompositeSystem, option: str,
                         theory_name: str = "",
                         max_group_size: int | None = None) -> ParticleTypeReport:
    """Run the whole pipeline: base orbits on the composite extremal states,
    symmetric orbits under the swap-preserving subgroup, and the preimage
    structure of the containment map.

    Symmetric orbits whose members are not composite vertices (possible
    under option I) have no containing base orbit; they map to None and are
    listed as unbased types.
    """
    P = c.swap_op()
    sym = symmetric_subspace(c)
    full = orbit_partition(c.vertices.vertices, c.group, group_tag="full",
                           within=c.vertices)
    subgroup = symmetry_preserving_subgroup(c.group, P, sym,
                                            max_size=max_group_size)
    states = symmetric_extremal_states(c, option)
    symmetric = orbit_partition(states, subgroup, group_tag="symmetric",
                                within=c.vertices)

    vert_set = set(c.vertices.vertices)
    f_map: dict[int, int | None] = {}
    for i, orb in enumerate(symmetric.orbits):
        if orb.representative in vert_set:
            base = full.index_of(orb.representative)
            for m in orb.members:
                # containment must be orbit-wide, or the map is ill-defined
                if full.index_of(m) != base:
                    raise OrbitEscape(
                        "symmetric orbit straddles two base orbits")
            f_map[i] = base
        else:
            f_map[i] = None

    types_per_base = {j: [] for j in range(len(full.orbits))}
    unbased = []
    for i, base in f_map.items():
        if base is None:
            unbased.append(i)
        else:
            types_per_base[base].append(i)
    hulls = {i: orb.members for i, orb in enumerate(symmetric.orbits)}
    return ParticleTypeReport(
        theory_name=theory_name or "composite",
        option=option,
        full_orbits=full,
        symmetric_orbits=symmetric,
        f_map=f_map,
        types_per_base_orbit=types_per_base,
        unbased_types=unbased,
        hull_generators=hulls,
    )

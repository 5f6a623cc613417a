"""Particle types of indistinguishable systems in general probabilistic
theories, computed two ways: orbits of symmetric pure states under
swap-preserving transformations, and sector decomposition of the
operational symmetrisation idempotent."""

__version__ = "0.1.0"

from .exact_linalg import (
    Matrix,
    Polytope,
    Subspace,
    fixed_subspace,
    hull_membership,
    matroid_components,
    tensor_product,
    vertices_of_slice,
)
from .gpt_core import (
    CompositeSystem,
    CompositionRule,
    GptSystem,
    TransformationGroup,
    compose,
    group_closure,
    validate_theory,
)
from .symmetry_orbits import (
    OrbitPartition,
    ParticleTypeReport,
    SymmetricStateSet,
    orbit_partition,
    particle_type_report,
    permutation_operator,
    symmetric_extremal_states,
    symmetry_preserving_subgroup,
)
from .quantum_backend import (
    QuantumComposite,
    SectorProjectors,
    classify_symmetric_pure,
    lemma1_decompose,
    sample_symmetric_unitary,
    sector_projectors,
)
from .idempotent_engine import (
    LinearIdempotent,
    SectorDecomposition,
    Splitting,
    compare_decompositions,
    extend_symmetrisation,
    parts_as_measurement,
    refine_parts,
    split,
    symmetrisation_idempotent,
    unsymmetrised_decomposition,
)
from .theory_catalog import TheorySpec, load_builtin

__all__ = [
    "Matrix", "Polytope", "Subspace", "fixed_subspace", "hull_membership",
    "matroid_components", "tensor_product", "vertices_of_slice",
    "CompositeSystem", "CompositionRule", "GptSystem", "TransformationGroup",
    "compose", "group_closure", "validate_theory",
    "OrbitPartition", "ParticleTypeReport", "SymmetricStateSet",
    "orbit_partition", "particle_type_report", "permutation_operator",
    "symmetric_extremal_states", "symmetry_preserving_subgroup",
    "QuantumComposite", "SectorProjectors", "classify_symmetric_pure",
    "lemma1_decompose", "sample_symmetric_unitary", "sector_projectors",
    "LinearIdempotent", "SectorDecomposition", "Splitting",
    "compare_decompositions", "extend_symmetrisation", "parts_as_measurement",
    "refine_parts", "split", "symmetrisation_idempotent",
    "unsymmetrised_decomposition",
    "TheorySpec", "load_builtin",
]

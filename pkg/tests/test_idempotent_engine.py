"""Symmetrisation idempotents: construction, splitting, sector refinement,
the measurement reading, composition of partial symmetrisations, and the
before/after sector comparison.

Derived expectations (Sym ranks, sector dimensions, block structure) were
computed with an independent float implementation before this package:
two-qubit Sym has rank 10 = 3^2 + 1^2, three-qubit rank 20 = 4^2 + 2^2,
boxworld and the toy pair each refine to a single sector (ranks 6 and 10),
classical pairs refine to d(d+1)/2 one-dimensional sectors.
"""

import numpy as np
import pytest

from gptparticles.errors import NotIdempotent, NotSymmetrisation
from gptparticles.exact_linalg import Matrix, rank_of_vectors
from gptparticles.idempotent_engine import (
    LinearIdempotent,
    biproduct_maps,
    compare_decompositions,
    extend_symmetrisation,
    parts_as_measurement,
    refine_parts,
    split,
    symmetrisation_idempotent,
    unsymmetrised_decomposition,
)
from gptparticles.quantum_backend import QuantumComposite
from gptparticles.theory_catalog import load_builtin


def classical_sym(d=2, n=2):
    return symmetrisation_idempotent(load_builtin("classical", d=d).composite(n))


def qubit_sym(n=2):
    return symmetrisation_idempotent(QuantumComposite(d=2, n=n))


# ---------------------------------------------------------------------------
# symmetrisation_idempotent
# ---------------------------------------------------------------------------


def test_two_bit_sym_matrix_and_rank():
    E = classical_sym()
    P = load_builtin("classical", d=2).composite(2).swap_op()
    expected = (Matrix.identity(4) + P).scale("1/2")
    assert E.matrix == expected
    assert E.rank() == 3
    E.check_idempotent()
    assert E.is_permutation_invariant()


@pytest.mark.parametrize("n,rank", [(2, 10), (3, 20)])
def test_qubit_sym_rank(n, rank):
    E = qubit_sym(n)
    E.check_idempotent()
    assert E.is_permutation_invariant()
    assert E.rank() == rank


def test_sym_idempotence_residual_quantum():
    E = qubit_sym(3)
    M = np.asarray(E.matrix)
    assert np.linalg.norm(M @ M - M) < 1e-12


def test_sym_permutation_invariance_exact():
    for name, kwargs in [("classical", {"d": 3}), ("boxworld", {}), ("spekkens", {})]:
        E = symmetrisation_idempotent(load_builtin(name, **kwargs).composite(2))
        for R in E.perm_reps:
            assert R @ E.matrix == E.matrix
            assert E.matrix @ R == E.matrix


# ---------------------------------------------------------------------------
# split
# ---------------------------------------------------------------------------


def test_split_identity():
    c = load_builtin("classical", d=2).composite(2)
    E = LinearIdempotent(backend="rational", dim=4, matrix=Matrix.identity(4),
                         n_parties=2, perm_reps=(),
                         state_vertices=c.vertices.vertices,
                         unit_effect=c.unit_effect)
    s = split(E)
    assert s.sector_dim == 4
    assert s.kappa @ s.iota == Matrix.identity(4)
    assert s.iota @ s.kappa == Matrix.identity(4)


def test_split_two_bit_sym_roundtrip():
    E = classical_sym()
    s = split(E)
    assert s.sector_dim == 3
    assert s.kappa @ s.iota == E.matrix
    assert s.iota @ s.kappa == Matrix.identity(3)


def test_split_rejects_non_idempotent():
    c = load_builtin("classical", d=2).composite(2)
    bad = LinearIdempotent(backend="rational", dim=4,
                           matrix=Matrix.from_rows([[1, 1, 0, 0], [0, 1, 0, 0],
                                                    [0, 0, 1, 0], [0, 0, 0, 1]]),
                           n_parties=2, perm_reps=(),
                           state_vertices=c.vertices.vertices)
    with pytest.raises(NotIdempotent):
        split(bad)


def test_split_two_qubit_sym():
    E = qubit_sym(2)
    s = split(E)
    assert s.sector_dim == 10
    K, I = np.asarray(s.kappa), np.asarray(s.iota)
    assert np.linalg.norm(K @ I - np.asarray(E.matrix)) < 1e-10
    assert np.linalg.norm(I @ K - np.eye(10)) < 1e-10


# ---------------------------------------------------------------------------
# refine_parts
# ---------------------------------------------------------------------------


def test_refine_two_qubits():
    dec = refine_parts(qubit_sym(2), seed=0)
    assert dec.sector_dims == [3, 1]
    assert dec.operator_ranks == [9, 1]
    assert sum(dec.operator_ranks) == 10
    assert dec.refinement_certificate["one_dimensional_centers"]


def test_refine_three_qubits():
    dec = refine_parts(qubit_sym(3), seed=0)
    assert dec.sector_dims == [4, 2]
    assert dec.operator_ranks == [16, 4]
    assert sum(dec.operator_ranks) == 20


def test_refine_two_bits():
    dec = refine_parts(classical_sym())
    assert dec.sector_dims == [1, 1, 1]
    assert len(dec.rays) == 3
    assert dec.refinement_certificate["matroid_connected"]
    assert dec.refinement_certificate["unit_effect_on_rays"]


def test_refine_two_trits():
    dec = refine_parts(classical_sym(d=3))
    assert dec.sector_dims == [1] * 6


def test_refine_boxworld_single_sector():
    E = symmetrisation_idempotent(load_builtin("boxworld").composite(2))
    dec = refine_parts(E)
    assert len(dec.rays) == 14
    assert dec.sector_dims == [6]
    assert dec.parts[0].matrix == E.matrix


def test_refine_spekkens_single_sector():
    E = symmetrisation_idempotent(load_builtin("spekkens").composite(2))
    dec = refine_parts(E)
    assert len(dec.rays) == 32
    assert dec.sector_dims == [10]


def orthogonality_laws(dec):
    if dec.backend == "rational":
        total = Matrix.zeros(dec.sym.dim, dec.sym.dim)
        for i, p in enumerate(dec.parts):
            total = total + p.matrix
            for j, q in enumerate(dec.parts):
                prod = p.matrix @ q.matrix
                if i == j:
                    assert prod == p.matrix
                else:
                    assert prod.is_zero()
        assert total == dec.sym.matrix
    else:
        total = sum(np.asarray(p.matrix) for p in dec.parts)
        assert np.linalg.norm(total - np.asarray(dec.sym.matrix)) < 1e-10
        for i, p in enumerate(dec.parts):
            for j, q in enumerate(dec.parts):
                prod = np.asarray(p.matrix) @ np.asarray(q.matrix)
                target = np.asarray(p.matrix) if i == j else 0
                assert np.linalg.norm(prod - target) < 1e-10


def test_part_orthogonality_all_theories():
    for dec in [refine_parts(classical_sym()),
                refine_parts(classical_sym(d=3)),
                refine_parts(symmetrisation_idempotent(
                    load_builtin("boxworld").composite(2))),
                refine_parts(symmetrisation_idempotent(
                    load_builtin("spekkens").composite(2))),
                refine_parts(qubit_sym(2), seed=0),
                refine_parts(qubit_sym(3), seed=0)]:
        orthogonality_laws(dec)


def test_refine_rejects_non_symmetrisation():
    c = load_builtin("classical", d=2).composite(2)
    E = LinearIdempotent(backend="rational", dim=4, matrix=Matrix.identity(4),
                         n_parties=2,
                         perm_reps=tuple(c.perm_ops[s] for s in sorted(c.perm_ops)),
                         state_vertices=c.vertices.vertices,
                         unit_effect=c.unit_effect)
    with pytest.raises(NotSymmetrisation):
        refine_parts(E)


def test_quantum_parts_cannot_refine_further():
    dec = refine_parts(qubit_sym(2), seed=0)
    for p in dec.parts:
        sub = refine_parts(p, seed=1, require_permutation_invariance=False)
        assert len(sub.parts) == 1


def test_polytopal_blocks_cannot_split():
    # exhaustive finest-ness oracle: any k-way direct sum coarsens to a
    # 2-way one, so ruling out every bipartition rules out all splits
    dec = refine_parts(symmetrisation_idempotent(
        load_builtin("boxworld").composite(2)))
    rays = list(dec.rays)
    n = len(rays)
    total = rank_of_vectors(rays)
    rank_cache = {}

    def rank_of_mask(mask):
        if mask not in rank_cache:
            rank_cache[mask] = rank_of_vectors(
                [rays[i] for i in range(n) if mask >> i & 1])
        return rank_cache[mask]

    full = (1 << n) - 1
    for mask in range(1, 1 << (n - 1)):  # ray 0 always in the complement
        if rank_of_mask(mask) + rank_of_mask(full ^ mask) == total:
            pytest.fail(f"sector splits along mask {mask:b}")


def test_refine_seed_determinism():
    a = refine_parts(qubit_sym(3), seed=5)
    b = refine_parts(qubit_sym(3), seed=5)
    for p, q in zip(a.parts, b.parts):
        assert np.allclose(np.asarray(p.matrix), np.asarray(q.matrix))


# ---------------------------------------------------------------------------
# biproduct maps
# ---------------------------------------------------------------------------


def test_biproduct_laws_rational():
    for dec in [refine_parts(classical_sym()),
                refine_parts(classical_sym(d=3)),
                refine_parts(symmetrisation_idempotent(
                    load_builtin("spekkens").composite(2)))]:
        maps = biproduct_maps(dec)
        r = maps.sym_splitting.sector_dim
        total = Matrix.zeros(r, r)
        for i, (inc_i, p_i) in enumerate(zip(maps.inclusions, maps.projections)):
            total = total + inc_i @ p_i
            for j, inc_j in enumerate(maps.inclusions):
                prod = p_i @ inc_j
                if i == j:
                    assert prod == Matrix.identity(dec.splittings[i].sector_dim)
                else:
                    assert prod.is_zero()
        assert total == Matrix.identity(r)


def test_biproduct_laws_quantum():
    for n in (2, 3):
        dec = refine_parts(qubit_sym(n), seed=0)
        maps = biproduct_maps(dec)
        r = maps.sym_splitting.sector_dim
        total = np.zeros((r, r), dtype=complex)
        for i, (inc_i, p_i) in enumerate(zip(maps.inclusions, maps.projections)):
            total = total + inc_i @ p_i
            for j, inc_j in enumerate(maps.inclusions):
                prod = p_i @ inc_j
                if i == j:
                    assert np.linalg.norm(
                        prod - np.eye(dec.splittings[i].sector_dim)) < 1e-10
                else:
                    assert np.linalg.norm(prod) < 1e-10
        assert np.linalg.norm(total - np.eye(r)) < 1e-10


# ---------------------------------------------------------------------------
# parts_as_measurement
# ---------------------------------------------------------------------------


def test_measurement_report_two_qubits():
    dec = refine_parts(qubit_sym(2), seed=0)
    report = parts_as_measurement(dec, seed=1, trials=50)
    assert report.sum_is_sym
    assert report.sum_residual < 1e-12
    assert report.image_preserved
    # individual parts renormalize, so they are not operations by themselves
    assert not report.parts_preserve_normalization


def test_antisymmetric_part_annihilates_product_state():
    dec = refine_parts(qubit_sym(2), seed=0)
    # the one-dimensional sector is the antisymmetric one for a qubit pair
    part = dec.parts[dec.sector_dims.index(1)]
    rho = np.zeros((4, 4))
    rho[0, 0] = 1.0  # |00><00|
    out = (np.asarray(part.matrix) @ rho.reshape(-1)).reshape(4, 4)
    assert np.linalg.norm(out) < 1e-12


def test_measurement_trace_sums_to_one():
    dec = refine_parts(qubit_sym(2), seed=0)
    rng = np.random.default_rng(9)
    E = np.asarray(dec.sym.matrix)
    for _ in range(100):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        rho = g @ g.conj().T
        rho /= np.trace(rho)
        sym_rho = (E @ rho.reshape(-1)).reshape(4, 4)
        tot = sum(np.trace((np.asarray(p.matrix) @ sym_rho.reshape(-1)).reshape(4, 4))
                  for p in dec.parts)
        assert abs(tot - 1) < 1e-10


def test_measurement_report_rational():
    dec = refine_parts(classical_sym())
    report = parts_as_measurement(dec)
    assert report.sum_is_sym
    assert report.image_preserved
    assert not report.parts_preserve_normalization
    for lo, hi in report.part_trace_ranges:
        assert 0 <= lo <= hi <= 1


# ---------------------------------------------------------------------------
# ext. symmetrisation (2+1 composition)
# ---------------------------------------------------------------------------


def test_two_plus_one_qubits():
    report = extend_symmetrisation(QuantumComposite(2, 2), 2, 1)
    assert report.sector_dims == (10, 4, 20)
    assert report.roundtrip_is_identity
    assert report.roundtrip_residual < 1e-10
    assert report.absorption_holds
    assert report.absorption_residual < 1e-12


def test_one_plus_one_reduces_to_split_roundtrip():
    report = extend_symmetrisation(QuantumComposite(2, 2), 1, 1)
    assert report.sector_dims == (4, 4, 10)  # single-qubit op spaces, Sym2
    assert report.roundtrip_is_identity
    assert report.absorption_holds


def test_two_plus_one_classical():
    spec = load_builtin("classical", d=2)
    report = extend_symmetrisation(spec, 2, 1)
    assert report.backend == "rational"
    assert report.roundtrip_is_identity
    assert report.absorption_holds
    assert report.sector_dims == (3, 2, 4)  # sym ranks: 3, d, C(d+2,3)+...


# ---------------------------------------------------------------------------
# compare_decompositions
# ---------------------------------------------------------------------------


def test_compare_classical_two_bits():
    comp = load_builtin("classical", d=2).composite(2)
    before = unsymmetrised_decomposition(comp)
    assert len(before.parts) == 4
    after = refine_parts(symmetrisation_idempotent(comp))
    report = compare_decompositions(before, after)
    assert report.summary == "2 preserved, 1 merged, 0 new"
    merged = [s for s in report.statuses if s.status == "merged"]
    assert len(merged) == 1
    assert len(merged[0].from_before) == 2


def test_compare_two_qubits_all_new():
    qc = QuantumComposite(2, 2)
    before = unsymmetrised_decomposition(qc)
    assert len(before.parts) == 1
    after = refine_parts(symmetrisation_idempotent(qc), seed=0)
    report = compare_decompositions(before, after)
    assert report.before_count == 1
    assert report.after_count == 2
    assert all(s.status == "new" for s in report.statuses)


def test_compare_identity_is_all_preserved():
    comp = load_builtin("classical", d=2).composite(2)
    before = unsymmetrised_decomposition(comp)
    report = compare_decompositions(before, before)
    assert all(s.status == "preserved" for s in report.statuses)
    assert report.summary == "4 preserved, 0 merged, 0 new"


def test_compare_requires_matching_backends():
    comp = load_builtin("classical", d=2).composite(2)
    with pytest.raises(ValueError):
        compare_decompositions(unsymmetrised_decomposition(comp),
                               refine_parts(qubit_sym(2), seed=0))

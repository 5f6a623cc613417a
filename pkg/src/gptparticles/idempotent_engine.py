"""Operational symmetrisation made concrete: build the averaging
idempotent, split it through its image system, refine it into the finest
sum of orthogonal parts (the sectors), verify the measurement reading of
the parts, compose partial symmetrisations, and compare sector structure
before and after symmetrising."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, isqrt

import numpy as np

from .errors import (
    DegenerateCenter,
    NotIdempotent,
    NotSymmetrisation,
    UnsupportedArity,
)
from .exact_linalg import (
    Matrix,
    Vector,
    extreme_points,
    matroid_components,
    rank_of_vectors,
    tensor_product,
    vec_dot,
)
from .gpt_core import CompositeSystem
from .quantum_backend import DEFAULT_TOLERANCE, QuantumComposite, perm_unitary


@dataclass
class LinearIdempotent:
    """An idempotent on a composite's state-vector space (rational backend)
    or on its operator space as a superoperator (quantum backend)."""

    backend: str  # "rational" | "quantum"
    dim: int  # side length of `matrix`
    matrix: object  # Matrix | np.ndarray
    n_parties: int
    perm_reps: tuple  # action of each party permutation on the same space
    state_vertices: tuple[Vector, ...] | None = None
    unit_effect: Vector | None = None
    hilbert_dim: int | None = None
    tolerance: float = DEFAULT_TOLERANCE

    def check_idempotent(self) -> None:
        if self.backend == "rational":
            if (self.matrix @ self.matrix) != self.matrix:
                raise NotIdempotent("E*E differs from E")
        else:
            err = np.linalg.norm(self.matrix @ self.matrix - self.matrix)
            if err > self.tolerance:
                raise NotIdempotent(f"E*E differs from E by {err:.3e}")

    def is_permutation_invariant(self) -> bool:
        """R(sigma) E = E R(sigma) = E for every party permutation."""
        if self.backend == "rational":
            return all(R @ self.matrix == self.matrix
                       and self.matrix @ R == self.matrix
                       for R in self.perm_reps)
        return all(np.linalg.norm(R @ self.matrix - self.matrix) < self.tolerance
                   and np.linalg.norm(self.matrix @ R - self.matrix) < self.tolerance
                   for R in self.perm_reps)

    def rank(self) -> int:
        if self.backend == "rational":
            return self.matrix.rank()
        evals = np.linalg.eigvalsh((self.matrix + self.matrix.T.conj()) / 2)
        return int(np.sum(evals > 0.5))


def _superop_conjugation(U: np.ndarray) -> np.ndarray:
    """Row-major-vec superoperator of rho -> U rho U^dagger."""
    return np.kron(U, U.conj())


def symmetrisation_idempotent(c, n: int | None = None) -> LinearIdempotent:
    """The equal mixture of all party exchanges, as an idempotent map.

    Rational backend: the average of the permutation operators on the
    composite vector space.  Quantum backend: the averaging channel as a
    superoperator on the operator space.
    """
    if isinstance(c, CompositeSystem):
        if n is not None and n != c.n_parties:
            raise ValueError("n does not match the composite")
        n = c.n_parties
        reps = tuple(c.perm_ops[s] for s in sorted(c.perm_ops))
        E = Matrix.zeros(c.dim, c.dim)
        for R in reps:
            E = E + R
        E = E.scale(Fraction(1, len(reps)))
        return LinearIdempotent(
            backend="rational", dim=c.dim, matrix=E, n_parties=n,
            perm_reps=reps, state_vertices=c.vertices.vertices,
            unit_effect=c.unit_effect)
    if isinstance(c, QuantumComposite):
        if n is not None and n != c.n:
            raise ValueError("n does not match the composite")
        n = c.n
        reps = tuple(_superop_conjugation(perm_unitary(c.d, n, s))
                     for s in itertools.permutations(range(n)))
        E = sum(reps) / factorial(n)
        return LinearIdempotent(
            backend="quantum", dim=c.hilbert_dim ** 2, matrix=E, n_parties=n,
            perm_reps=reps, hilbert_dim=c.hilbert_dim, tolerance=c.tolerance)
    raise TypeError(f"unsupported composite type {type(c)!r}")


@dataclass
class Splitting:
    """E = kappa . iota with iota . kappa the identity on the sector."""

    backend: str
    sector_dim: int
    iota: object  # sector <- composite
    kappa: object  # composite <- sector


def split(E: LinearIdempotent) -> Splitting:
    """Rank factorization of an idempotent through its image.

    Rational: reduced row echelon factorization, exact.  Quantum: spectral
    decomposition, eigenvalues thresholded at the backend tolerance.
    """
    E.check_idempotent()
    if E.backend == "rational":
        rows, pivots = E.matrix.rref()
        r = len(pivots)
        iota = Matrix.from_rows(rows[:r]) if r else Matrix.zeros(0, E.dim)
        kappa = Matrix.from_columns([E.matrix.column(c) for c in pivots]) \
            if r else Matrix.zeros(E.dim, 0)
        return Splitting(backend="rational", sector_dim=r, iota=iota, kappa=kappa)
    M = np.asarray(E.matrix)
    if np.linalg.norm(M - M.T.conj()) > E.tolerance * max(1.0, np.linalg.norm(M)):
        raise NotIdempotent("quantum splitting expects a self-adjoint idempotent")
    evals, evecs = np.linalg.eigh((M + M.T.conj()) / 2)
    gap = max(E.tolerance * 10, 1e-8)
    if np.any((evals > gap) & (evals < 1 - gap)):
        raise NotIdempotent("spectrum is not concentrated on {0, 1}")
    V = evecs[:, evals > 0.5]
    return Splitting(backend="quantum", sector_dim=V.shape[1],
                     iota=V.T.conj(), kappa=V)


@dataclass
class SectorDecomposition:
    """Sym written as a sum of orthogonal idempotents, one per sector."""

    backend: str
    sym: LinearIdempotent
    parts: list[LinearIdempotent]
    splittings: list[Splitting]
    sector_dims: list[int]          # quantum: sector Hilbert dims
    operator_ranks: list[int]       # rank of each part
    refinement_certificate: dict = field(default_factory=dict)
    rays: tuple[Vector, ...] | None = None     # rational backend
    blocks: list[list[int]] | None = None


def _part_from_matrix(E: LinearIdempotent, M) -> LinearIdempotent:
    return LinearIdempotent(
        backend=E.backend, dim=E.dim, matrix=M, n_parties=E.n_parties,
        perm_reps=E.perm_reps, state_vertices=E.state_vertices,
        unit_effect=E.unit_effect, hilbert_dim=E.hilbert_dim,
        tolerance=E.tolerance)


def _refine_rational(E: LinearIdempotent) -> SectorDecomposition:
    if E.state_vertices is None:
        raise ValueError("rational refinement needs the composite vertices")
    image_points = [E.matrix.apply(v) for v in E.state_vertices]
    rays = tuple(extreme_points(image_points))
    blocks = matroid_components(list(rays))

    # basis adapted to the block spans plus the kernel of E
    block_bases: list[list[Vector]] = []
    for block in blocks:
        block_vecs = [rays[i] for i in block]
        m = Matrix.from_columns(block_vecs)
        _, pivots = m.rref()
        block_bases.append([block_vecs[j] for j in pivots])
    kernel = E.matrix.nullspace()
    columns: list[Vector] = [v for basis in block_bases for v in basis]
    offsets = []
    pos = 0
    for basis in block_bases:
        offsets.append((pos, pos + len(basis)))
        pos += len(basis)
    columns.extend(kernel)
    B = Matrix.from_columns(columns)
    if B.rows != B.cols:
        raise ValueError("composite vertices do not span the ambient space")
    Binv = B.inverse()

    parts = []
    for (lo, hi) in offsets:
        sel = Matrix.from_rows(
            [[Fraction(1) if (i == j and lo <= i < hi) else Fraction(0)
              for j in range(B.cols)] for i in range(B.rows)])
        parts.append(_part_from_matrix(E, B @ sel @ Binv))

    splittings = [split(p) for p in parts]
    dims = [rank_of_vectors([rays[i] for i in block]) for block in blocks]
    cert = {
        "matroid_connected": all(
            len(matroid_components([rays[i] for i in block])) == 1
            for block in blocks),
        "unit_effect_on_rays": all(
            vec_dot(E.unit_effect, r) == 1 for r in rays) if E.unit_effect else None,
    }
    return SectorDecomposition(
        backend="rational", sym=E, parts=parts, splittings=splittings,
        sector_dims=dims, operator_ranks=dims,
        refinement_certificate=cert, rays=rays, blocks=blocks)


def _hermitian_fixed_basis(E: LinearIdempotent) -> list[np.ndarray]:
    """Hermitian basis of the fixed-point algebra {X : E(X) = X}."""
    D = E.hilbert_dim
    M = np.asarray(E.matrix)
    evals, evecs = np.linalg.eigh((M + M.T.conj()) / 2)
    fixed = [evecs[:, k].reshape(D, D) for k in range(len(evals))
             if evals[k] > 0.5]
    candidates = []
    for X in fixed:
        candidates.append((X + X.conj().T) / 2)
        candidates.append(1j * (X - X.conj().T) / 2)
    basis: list[np.ndarray] = []
    for H in candidates:
        G = H.copy()
        for Bk in basis:
            G = G - np.trace(Bk.conj().T @ G) * Bk
        nrm = np.linalg.norm(G)
        if nrm > 1e-8:
            basis.append(G / nrm)
    if len(basis) != len(fixed):
        raise NotIdempotent("fixed-point algebra dimension mismatch")
    return basis


def _algebra_center(basis: list[np.ndarray]) -> list[np.ndarray]:
    """Hermitian basis of {Z in span(basis) : [Z, H] = 0 for all H}."""
    r = len(basis)
    rows = []
    for Hm in basis:
        comms = [Hk @ Hm - Hm @ Hk for Hk in basis]
        block = np.array([c.reshape(-1) for c in comms]).T  # D^2 x r
        rows.append(np.vstack([block.real, block.imag]))
    A = np.vstack(rows)
    # A has 2 D^2 r rows and r columns, so the reduced SVD sees the kernel
    _, s, vh = np.linalg.svd(A, full_matrices=False)
    null_mask = s < 1e-8
    center = []
    for coeffs in vh[null_mask]:
        Z = sum(c * H for c, H in zip(coeffs, basis))
        center.append((Z + Z.conj().T) / 2)
    return center


def _refine_quantum(E: LinearIdempotent, seed: int) -> SectorDecomposition:
    D = E.hilbert_dim
    basis = _hermitian_fixed_basis(E)
    center = _algebra_center(basis)
    n_sectors = len(center)

    # support of the algebra: central elements act only there, so the
    # generic element is clustered after compressing onto it (otherwise a
    # kernel of the algebra's unit shows up as a spurious zero eigenvalue)
    gram = sum(H @ H for H in basis)
    svals, svecs = np.linalg.eigh(gram)
    Vu = svecs[:, svals > 1e-10]

    rng = np.random.default_rng(seed)
    z_projs: list[np.ndarray] | None = None
    means: list[float] = []
    for _ in range(5):
        Z = sum(rng.standard_normal() * C for C in center)
        Zc = Vu.conj().T @ Z @ Vu
        evals, evecs = np.linalg.eigh((Zc + Zc.conj().T) / 2)
        clusters: list[list[int]] = [[0]]
        for k in range(1, len(evals)):
            if evals[k] - evals[k - 1] > 1e-6:
                clusters.append([k])
            else:
                clusters[-1].append(k)
        if len(clusters) == n_sectors:
            z_projs = [Vu @ evecs[:, idx] @ evecs[:, idx].conj().T @ Vu.conj().T
                       for idx in clusters]
            means = [float(np.mean(evals[idx])) for idx in clusters]
            break
    if z_projs is None:
        raise DegenerateCenter(
            "generic central element kept a degenerate spectrum after 5 draws")

    parts_raw = []
    for z, mu in zip(z_projs, means):
        M = np.kron(z, z.conj()) @ np.asarray(E.matrix)
        rank = int(round(np.real(np.trace(M))))
        hdim = isqrt(rank)
        if hdim * hdim != rank:
            raise NotIdempotent(
                f"sector rank {rank} is not a square; not a full matrix algebra")
        parts_raw.append((hdim, mu, rank, M))
    parts_raw.sort(key=lambda t: (-t[0], t[1]))

    parts = [_part_from_matrix(E, M) for _, _, _, M in parts_raw]
    splittings = [split(p) for p in parts]
    dims = [h for h, _, _, _ in parts_raw]
    ranks = [r for _, _, r, _ in parts_raw]

    centers_ok = []
    for p in parts:
        sub_basis = _hermitian_fixed_basis(p)
        centers_ok.append(len(_algebra_center(sub_basis)) == 1)
    cert = {"one_dimensional_centers": all(centers_ok)}
    return SectorDecomposition(
        backend="quantum", sym=E, parts=parts, splittings=splittings,
        sector_dims=dims, operator_ranks=ranks, refinement_certificate=cert)


def refine_parts(E: LinearIdempotent, seed: int = 0,
                 require_permutation_invariance: bool = True) -> SectorDecomposition:
    """Finest decomposition of E into orthogonal idempotent parts.

    Rational backend: matroid components of the extreme rays of E's image
    polytope; Part_k projects onto a block's span along the other blocks
    and ker E.  Quantum backend: minimal central projectors z_i of the
    fixed-point algebra, via the spectral clusters of a seeded generic
    central element; Part_i(rho) = z_i E(rho) z_i.
    """
    E.check_idempotent()
    if require_permutation_invariance and not E.is_permutation_invariant():
        raise NotSymmetrisation("idempotent is not permutation invariant")
    if E.backend == "rational":
        return _refine_rational(E)
    return _refine_quantum(E, seed)


def unsymmetrised_decomposition(c) -> SectorDecomposition:
    """Finest sector decomposition of the plain composite (identity map),
    for comparison against the symmetrised one."""
    if isinstance(c, CompositeSystem):
        E = LinearIdempotent(
            backend="rational", dim=c.dim, matrix=Matrix.identity(c.dim),
            n_parties=c.n_parties,
            perm_reps=tuple(c.perm_ops[s] for s in sorted(c.perm_ops)),
            state_vertices=c.vertices.vertices, unit_effect=c.unit_effect)
    elif isinstance(c, QuantumComposite):
        E = LinearIdempotent(
            backend="quantum", dim=c.hilbert_dim ** 2,
            matrix=np.eye(c.hilbert_dim ** 2), n_parties=c.n,
            perm_reps=(), hilbert_dim=c.hilbert_dim, tolerance=c.tolerance)
    else:
        raise TypeError(f"unsupported composite type {type(c)!r}")
    return refine_parts(E, require_permutation_invariance=False)


@dataclass
class NondisturbanceReport:
    """How the parts behave as a measurement of the symmetrised system."""

    backend: str
    sum_is_sym: bool
    sum_residual: float
    image_preserved: bool
    image_residual: float
    part_trace_ranges: list[tuple[float, float]]
    parts_preserve_normalization: bool
    n_states_checked: int


def parts_as_measurement(dec: SectorDecomposition, seed: int = 0,
                         trials: int = 50) -> NondisturbanceReport:
    """Check that the parts jointly act as the identity on symmetrised
    states while individually renormalizing them (so only the collection,
    not one part, is an operation)."""
    E = dec.sym
    if dec.backend == "rational":
        total = Matrix.zeros(E.dim, E.dim)
        for p in dec.parts:
            total = total + p.matrix
        sum_ok = total == E.matrix
        ranges = []
        image_ok = True
        count = 0
        for v in E.state_vertices:
            img = E.matrix.apply(v)
            back = total.apply(img)
            image_ok = image_ok and back == img
            count += 1
        for p in dec.parts:
            vals = [vec_dot(E.unit_effect, p.matrix.apply(E.matrix.apply(v)))
                    for v in E.state_vertices]
            ranges.append((float(min(vals)), float(max(vals))))
        preserve = all(lo == hi == 1.0 for lo, hi in ranges)
        return NondisturbanceReport(
            backend="rational", sum_is_sym=sum_ok, sum_residual=0.0,
            image_preserved=image_ok, image_residual=0.0,
            part_trace_ranges=ranges, parts_preserve_normalization=preserve,
            n_states_checked=count)

    D = E.hilbert_dim
    total = sum(np.asarray(p.matrix) for p in dec.parts)
    sum_residual = float(np.linalg.norm(total - np.asarray(E.matrix)))
    rng = np.random.default_rng(seed)
    image_residual = 0.0
    mins = [np.inf] * len(dec.parts)
    maxs = [-np.inf] * len(dec.parts)
    for _ in range(trials):
        g = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
        rho = g @ g.conj().T
        rho /= np.trace(rho)
        sym_rho = (np.asarray(E.matrix) @ rho.reshape(-1)).reshape(D, D)
        back = (total @ sym_rho.reshape(-1)).reshape(D, D)
        image_residual = max(image_residual,
                             float(np.linalg.norm(back - sym_rho)))
        for k, p in enumerate(dec.parts):
            out = (np.asarray(p.matrix) @ sym_rho.reshape(-1)).reshape(D, D)
            t = float(np.real(np.trace(out)))
            mins[k] = min(mins[k], t)
            maxs[k] = max(maxs[k], t)
    tol = E.tolerance * 100
    return NondisturbanceReport(
        backend="quantum", sum_is_sym=sum_residual < tol,
        sum_residual=sum_residual,
        image_preserved=image_residual < tol, image_residual=image_residual,
        part_trace_ranges=list(zip(mins, maxs)),
        parts_preserve_normalization=all(
            abs(lo - 1) < tol and abs(hi - 1) < tol for lo, hi in zip(mins, maxs)),
        n_states_checked=trials)


@dataclass
class BiproductMaps:
    """Inclusions and projections exhibiting the symmetrised sector as the
    direct sum of the part sectors: p_i . incl_j = delta_ij id and
    sum_i incl_i . p_i = id."""

    backend: str
    sym_splitting: Splitting
    inclusions: list  # sector_i -> symmetrised sector
    projections: list  # symmetrised sector -> sector_i


def biproduct_maps(dec: SectorDecomposition) -> BiproductMaps:
    """Derive the direct-sum inclusion/projection maps from the splittings:
    incl_i = iota_Sym . kappa_i and p_i = iota_i . kappa_Sym."""
    s = split(dec.sym)
    if dec.backend == "rational":
        inclusions = [s.iota @ sp.kappa for sp in dec.splittings]
        projections = [sp.iota @ s.kappa for sp in dec.splittings]
    else:
        inclusions = [np.asarray(s.iota) @ np.asarray(sp.kappa)
                      for sp in dec.splittings]
        projections = [np.asarray(sp.iota) @ np.asarray(s.kappa)
                       for sp in dec.splittings]
    return BiproductMaps(backend=dec.backend, sym_splitting=s,
                         inclusions=inclusions, projections=projections)


# ---------------------------------------------------------------------------
# composing partial symmetrisations (bringing particles together)
# ---------------------------------------------------------------------------


def _superop_tensor(M1: np.ndarray, D1: int, M2: np.ndarray, D2: int) -> np.ndarray:
    """Tensor of two superoperators under row-major vec on H1 (x) H2."""
    T1 = M1.reshape(D1, D1, D1, D1)
    T2 = M2.reshape(D2, D2, D2, D2)
    out = np.einsum("ijkl,abcd->iajbkcld", T1, T2)
    D = D1 * D2
    return out.reshape(D * D, D * D)


def _kappa_tensor_quantum(s1: Splitting, D1: int, s2: Splitting, D2: int):
    """(kappa1 x kappa2) and (iota1 x iota2) on the joint operator space."""
    K1 = np.asarray(s1.kappa).reshape(D1, D1, s1.sector_dim)
    K2 = np.asarray(s2.kappa).reshape(D2, D2, s2.sector_dim)
    K = np.einsum("ija,klb->ikjlab", K1, K2)
    D = D1 * D2
    K = K.reshape(D * D, s1.sector_dim * s2.sector_dim)
    I1 = np.asarray(s1.iota).reshape(s1.sector_dim, D1, D1)
    I2 = np.asarray(s2.iota).reshape(s2.sector_dim, D2, D2)
    I = np.einsum("aij,bkl->abikjl", I1, I2)
    I = I.reshape(s1.sector_dim * s2.sector_dim, D * D)
    return K, I


@dataclass
class ExtensionReport:
    """The two composition identities for merging n1 + n2 particles."""

    backend: str
    n1: int
    n2: int
    sector_dims: tuple[int, int, int]
    roundtrip_is_identity: bool
    roundtrip_residual: float
    absorption_holds: bool
    absorption_residual: float


def extend_symmetrisation(theory, n1: int, n2: int) -> ExtensionReport:
    """Build the map merging n1 indistinguishable and n2 indistinguishable
    particles into n1+n2, then verify:

      (merge) . (merge-reverse) = identity on the joint sector, and
      Sym_{n1+n2} . (Sym_{n1} (x) Sym_{n2}) = Sym_{n1+n2}.
    """
    if isinstance(theory, QuantumComposite):
        d = theory.d
        tol = theory.tolerance

        def sym_for(m):
            if m == 1:
                return LinearIdempotent(
                    backend="quantum", dim=d * d, matrix=np.eye(d * d),
                    n_parties=1, perm_reps=(), hilbert_dim=d, tolerance=tol)
            return symmetrisation_idempotent(QuantumComposite(d, m, tol))

        E1, E2, E12 = sym_for(n1), sym_for(n2), sym_for(n1 + n2)
        s1, s2, s12 = split(E1), split(E2), split(E12)
        D1, D2 = d ** n1, d ** n2
        K, I = _kappa_tensor_quantum(s1, D1, s2, D2)
        f = np.asarray(s12.iota) @ K
        f_rev = I @ np.asarray(s12.kappa)
        round_res = float(np.linalg.norm(f @ f_rev - np.eye(s12.sector_dim)))
        joint = _superop_tensor(np.asarray(E1.matrix), D1,
                                np.asarray(E2.matrix), D2)
        absorb_res = float(np.linalg.norm(
            np.asarray(E12.matrix) @ joint - np.asarray(E12.matrix)))
        check = max(tol * 100, 1e-10)
        return ExtensionReport(
            backend="quantum", n1=n1, n2=n2,
            sector_dims=(s1.sector_dim, s2.sector_dim, s12.sector_dim),
            roundtrip_is_identity=round_res < check,
            roundtrip_residual=round_res,
            absorption_holds=absorb_res < check,
            absorption_residual=absorb_res)

    # polytopal: theory must provide composites for n1, n2, n1+n2
    from .theory_catalog import TheorySpec
    if not isinstance(theory, TheorySpec) or theory.backend != "polytopal":
        raise UnsupportedArity(
            "extension needs a quantum composite or a polytopal theory spec")
    d = theory.system.dim

    def sym_for(m):
        if m == 1:
            return LinearIdempotent(
                backend="rational", dim=d, matrix=Matrix.identity(d),
                n_parties=1, perm_reps=(),
                state_vertices=theory.system.vertices.vertices,
                unit_effect=theory.system.unit_effect)
        return symmetrisation_idempotent(theory.composite(m))

    E1, E2, E12 = sym_for(n1), sym_for(n2), sym_for(n1 + n2)
    s1, s2, s12 = split(E1), split(E2), split(E12)
    f = s12.iota @ tensor_product(s1.kappa, s2.kappa)
    f_rev = tensor_product(s1.iota, s2.iota) @ s12.kappa
    round_ok = (f @ f_rev) == Matrix.identity(s12.sector_dim)
    joint = tensor_product(E1.matrix, E2.matrix)
    absorb_ok = (E12.matrix @ joint) == E12.matrix
    return ExtensionReport(
        backend="rational", n1=n1, n2=n2,
        sector_dims=(s1.sector_dim, s2.sector_dim, s12.sector_dim),
        roundtrip_is_identity=round_ok, roundtrip_residual=0.0 if round_ok else 1.0,
        absorption_holds=absorb_ok, absorption_residual=0.0 if absorb_ok else 1.0)


# ---------------------------------------------------------------------------
# comparing sector structure before and after symmetrisation
# ---------------------------------------------------------------------------


@dataclass
class SectorStatus:
    after_index: int
    status: str  # "preserved" | "merged" | "new"
    from_before: list[int]


@dataclass
class NewSectorReport:
    """Which symmetrised sectors restate pre-existing direct summands and
    which ones only appear through symmetrisation.  Experimental: the
    comparison semantics for theories that already decompose is not
    settled; this reports data, not a verdict."""

    experimental: bool
    before_count: int
    after_count: int
    statuses: list[SectorStatus]
    summary: str


def _span_contains_rational(span_cols: list[Vector], probe_cols: list[Vector]) -> bool:
    base = rank_of_vectors(span_cols)
    return rank_of_vectors(span_cols + probe_cols) == base


def _push_span_rational(E: Matrix, splitting: Splitting) -> list[Vector]:
    pushed = E @ splitting.kappa
    cols = [pushed.column(j) for j in range(pushed.cols)]
    return [c for c in cols if any(x != 0 for x in c)]


def compare_decompositions(before: SectorDecomposition,
                           after: SectorDecomposition) -> NewSectorReport:
    """Per after-sector: preserved if exactly one before-sector pushes onto
    it, merged if several push into it and jointly span it, new otherwise."""
    if before.backend != after.backend:
        raise ValueError("decompositions use different backends")
    statuses = []
    if after.backend == "rational":
        E = after.sym.matrix
        pushed = [_push_span_rational(E, s) for s in before.splittings]
        for k, sk in enumerate(after.splittings):
            W = [sk.kappa.column(j) for j in range(sk.kappa.cols)]
            contrib = [j for j, p in enumerate(pushed)
                       if p and _span_contains_rational(W, p)]
            joint: list[Vector] = []
            for j in contrib:
                joint.extend(pushed[j])
            if (len(contrib) == 1
                    and rank_of_vectors(pushed[contrib[0]]) == len(W)):
                statuses.append(SectorStatus(k, "preserved", contrib))
            elif contrib and rank_of_vectors(joint) == len(W):
                statuses.append(SectorStatus(k, "merged", contrib))
            else:
                statuses.append(SectorStatus(k, "new", contrib))
    else:
        E = np.asarray(after.sym.matrix)
        tol = 1e-8

        def colspace(M):
            M = np.asarray(M)
            if min(M.shape) == 0:
                return M[:, :0]
            u, s, _ = np.linalg.svd(M, full_matrices=False)
            return u[:, s > tol]

        pushed = [colspace(E @ np.asarray(s.kappa)) for s in before.splittings]

        def contained(P, W):
            if P.shape[1] == 0:
                return False
            resid = P - W @ (W.conj().T @ P)
            return float(np.linalg.norm(resid)) < tol * max(1, P.shape[1])

        for k, sk in enumerate(after.splittings):
            W = np.asarray(sk.kappa)
            contrib = [j for j, p in enumerate(pushed) if contained(p, W)]
            if contrib:
                joint = np.hstack([pushed[j] for j in contrib])
                joint_rank = int(np.linalg.matrix_rank(joint, tol=tol))
            else:
                joint_rank = 0
            if len(contrib) == 1 and joint_rank == W.shape[1]:
                statuses.append(SectorStatus(k, "preserved", contrib))
            elif contrib and joint_rank == W.shape[1]:
                statuses.append(SectorStatus(k, "merged", contrib))
            else:
                statuses.append(SectorStatus(k, "new", contrib))

    n_pres = sum(1 for s in statuses if s.status == "preserved")
    n_merg = sum(1 for s in statuses if s.status == "merged")
    n_new = sum(1 for s in statuses if s.status == "new")
    return NewSectorReport(
        experimental=True,
        before_count=len(before.parts),
        after_count=len(after.parts),
        statuses=statuses,
        summary=f"{n_pres} preserved, {n_merg} merged, {n_new} new")

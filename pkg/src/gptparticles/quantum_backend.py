"""Quantum instantiation: permutation unitaries, exchange-sector
projectors from symmetric-group characters (n <= 4), the convex
decomposition of swap-invariant density matrices into sector components,
and swap-commuting Haar sampling."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import NotExchangeEigenstate, NotSymmetricState, UnsupportedArity

DEFAULT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class QuantumComposite:
    """n parties, each a d-dimensional quantum system."""

    d: int
    n: int
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.d < 2 or self.n < 2:
            raise ValueError("need d >= 2 and n >= 2")

    @property
    def hilbert_dim(self) -> int:
        return self.d ** self.n


def perm_unitary(d: int, n: int, sigma: tuple[int, ...]) -> np.ndarray:
    """Unitary permuting tensor factors: slot k of the input moves to slot
    sigma[k], so that U(sigma) U(tau) = U(sigma o tau)."""
    D = d ** n
    U = np.zeros((D, D))
    for idx in itertools.product(range(d), repeat=n):
        out = [0] * n
        for k, i in enumerate(idx):
            out[sigma[k]] = i
        src = sum(i * d ** (n - 1 - k) for k, i in enumerate(idx))
        dst = sum(i * d ** (n - 1 - k) for k, i in enumerate(out))
        U[dst, src] = 1.0
    return U


def swap_unitary(d: int) -> np.ndarray:
    return perm_unitary(d, 2, (1, 0))


def cycle_type(sigma: tuple[int, ...]) -> tuple[int, ...]:
    n = len(sigma)
    seen = [False] * n
    lens = []
    for i in range(n):
        if not seen[i]:
            length, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = sigma[j]
                length += 1
            lens.append(length)
    return tuple(sorted(lens, reverse=True))


# characters of the symmetric groups S2..S4, keyed by cycle type;
# entries (irrep dimension, {cycle_type: character value})
CHARACTER_TABLES: dict[int, dict[tuple[int, ...], tuple[int, dict]]] = {
    2: {
        (2,): (1, {(1, 1): 1, (2,): 1}),
        (1, 1): (1, {(1, 1): 1, (2,): -1}),
    },
    3: {
        (3,): (1, {(1, 1, 1): 1, (2, 1): 1, (3,): 1}),
        (2, 1): (2, {(1, 1, 1): 2, (2, 1): 0, (3,): -1}),
        (1, 1, 1): (1, {(1, 1, 1): 1, (2, 1): -1, (3,): 1}),
    },
    4: {
        (4,): (1, {(1, 1, 1, 1): 1, (2, 1, 1): 1, (2, 2): 1, (3, 1): 1, (4,): 1}),
        (3, 1): (3, {(1, 1, 1, 1): 3, (2, 1, 1): 1, (2, 2): -1, (3, 1): 0, (4,): -1}),
        (2, 2): (2, {(1, 1, 1, 1): 2, (2, 1, 1): 0, (2, 2): 2, (3, 1): -1, (4,): 0}),
        (2, 1, 1): (3, {(1, 1, 1, 1): 3, (2, 1, 1): -1, (2, 2): -1, (3, 1): 0, (4,): 1}),
        (1, 1, 1, 1): (1, {(1, 1, 1, 1): 1, (2, 1, 1): -1, (2, 2): 1, (3, 1): 1, (4,): -1}),
    },
}


def _verify_character_table(n: int) -> None:
    """Column orthogonality: sum_l chi_l(c1) chi_l(c2) = delta * |centralizer|."""
    table = CHARACTER_TABLES[n]
    perms = list(itertools.permutations(range(n)))
    class_sizes: dict[tuple[int, ...], int] = {}
    for s in perms:
        class_sizes[cycle_type(s)] = class_sizes.get(cycle_type(s), 0) + 1
    for c1 in class_sizes:
        for c2 in class_sizes:
            total = sum(chars[c1] * chars[c2]
                        for _, chars in table.values())
            expected = factorial(n) // class_sizes[c1] if c1 == c2 else 0
            if total != expected:
                raise AssertionError(
                    f"character table for S{n} fails orthogonality at {c1},{c2}")
    for lam, (dim, chars) in table.items():
        if chars[tuple([1] * n)] != dim:
            raise AssertionError(f"dimension mismatch for {lam}")


for _n in CHARACTER_TABLES:
    _verify_character_table(_n)


@dataclass(frozen=True)
class IsotypicSector:
    label: tuple[int, ...]
    projector: np.ndarray
    rank: int


@dataclass(frozen=True)
class SectorProjectors:
    d: int
    n: int
    S: np.ndarray
    A: np.ndarray
    isotypic: tuple[IsotypicSector, ...]


def sector_projectors(d: int, n: int) -> SectorProjectors:
    """Isotypic projectors (dim_l / n!) sum_pi chi_l(pi) U_pi for n <= 4.

    For n = 2 these reduce to S = (I + P)/2 and A = (I - P)/2.
    """
    if n not in CHARACTER_TABLES:
        raise UnsupportedArity(f"sector projectors implemented for n <= 4, got {n}")
    perms = list(itertools.permutations(range(n)))
    unitaries = {s: perm_unitary(d, n, s) for s in perms}
    sectors = []
    for lam, (dim_l, chars) in sorted(CHARACTER_TABLES[n].items(), reverse=True):
        P = np.zeros((d ** n, d ** n))
        for s in perms:
            P += chars[cycle_type(s)] * unitaries[s]
        P *= dim_l / factorial(n)
        rank = int(round(np.trace(P)))
        sectors.append(IsotypicSector(label=lam, projector=P, rank=rank))
    sym = next(s.projector for s in sectors if s.label == (n,))
    anti = next(s.projector for s in sectors if s.label == tuple([1] * n))
    return SectorProjectors(d=d, n=n, S=sym, A=anti, isotypic=tuple(sectors))


@dataclass(frozen=True)
class PureStateLabel:
    label: str
    partition: tuple[int, ...]
    weight: float


def classify_symmetric_pure(psi: np.ndarray, d: int, n: int = 2,
                            tolerance: float = DEFAULT_TOLERANCE) -> PureStateLabel:
    """Assign a pure state to the exchange sector supporting it.

    Raises NotExchangeEigenstate when no single isotypic component carries
    the state (e.g. |01> for a qubit pair).
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1.0) > max(tolerance, 1e-8):
        raise ValueError("state vector must be normalized")
    projs = sector_projectors(d, n)
    best = None
    for sector in projs.isotypic:
        w = float(np.real(np.vdot(psi, sector.projector @ psi)))
        if best is None or w > best[1]:
            best = (sector.label, w)
    label, weight = best
    if weight < 1.0 - max(tolerance, 1e-8):
        raise NotExchangeEigenstate(
            f"state is spread over sectors (max weight {weight:.6f})")
    if label == (n,):
        name = "symmetric_sector"
    elif label == tuple([1] * n):
        name = "antisymmetric_sector"
    else:
        name = f"mixed_sector{label}"
    return PureStateLabel(label=name, partition=label, weight=weight)


def lemma1_decompose(rho: np.ndarray, tolerance: float = DEFAULT_TOLERANCE):
    """Split a swap-invariant two-party density matrix into its symmetric
    and antisymmetric sector components:

        rho = tr(rho S) rho_s + tr(rho A) rho_a,

    with rho_s = S rho S / tr(rho S) and likewise for rho_a.  Components
    with vanishing weight come back as None.
    """
    rho = np.asarray(rho, dtype=complex)
    D = rho.shape[0]
    d = int(round(np.sqrt(D)))
    if d * d != D:
        raise ValueError("density matrix is not on a two-party space")
    if abs(np.trace(rho) - 1.0) > max(tolerance, 1e-8):
        raise NotSymmetricState("density matrix must have unit trace")
    evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if evals.min() < -max(tolerance, 1e-8):
        raise NotSymmetricState("density matrix must be positive semidefinite")
    P = swap_unitary(d)
    if np.linalg.norm(P @ rho @ P - rho) > max(tolerance, 1e-8):
        raise NotSymmetricState("density matrix is not swap-invariant")
    S = (np.eye(D) + P) / 2
    A = (np.eye(D) - P) / 2
    p_s = float(np.real(np.trace(rho @ S)))
    p_a = float(np.real(np.trace(rho @ A)))
    rho_s = S @ rho @ S / p_s if p_s > tolerance else None
    rho_a = A @ rho @ A / p_a if p_a > tolerance else None
    return p_s, rho_s, p_a, rho_a


def symmetric_basis(d: int) -> np.ndarray:
    """Orthonormal basis (columns) of the symmetric subspace of C^d x C^d."""
    cols = []
    for i in range(d):
        v = np.zeros(d * d)
        v[i * d + i] = 1.0
        cols.append(v)
    for i in range(d):
        for j in range(i + 1, d):
            v = np.zeros(d * d)
            v[i * d + j] = v[j * d + i] = 1.0 / np.sqrt(2)
            cols.append(v)
    return np.array(cols).T


def antisymmetric_basis(d: int) -> np.ndarray:
    cols = []
    for i in range(d):
        for j in range(i + 1, d):
            v = np.zeros(d * d)
            v[i * d + j] = 1.0 / np.sqrt(2)
            v[j * d + i] = -1.0 / np.sqrt(2)
            cols.append(v)
    return np.array(cols).T


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim))
         + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def sample_symmetric_unitary(d: int, n: int = 2, seed: int = 0) -> np.ndarray:
    """Swap-commuting unitary: independent Haar blocks on the symmetric and
    antisymmetric subspaces, assembled in the computational basis."""
    if n != 2:
        raise UnsupportedArity("swap-commuting sampling implemented for pairs")
    rng = np.random.default_rng(seed)
    Vs = symmetric_basis(d)
    Va = antisymmetric_basis(d)
    Us = haar_unitary(Vs.shape[1], rng)
    Ua = haar_unitary(Va.shape[1], rng)
    return Vs @ Us @ Vs.conj().T + Va @ Ua @ Va.conj().T


def random_symmetric_density(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random swap-invariant density matrix: S rho S + A rho A of a random
    full-rank density matrix."""
    D = d * d
    g = (rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D)))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    P = swap_unitary(d)
    S = (np.eye(D) + P) / 2
    A = (np.eye(D) - P) / 2
    out = S @ rho @ S + A @ rho @ A
    return out / np.trace(out)

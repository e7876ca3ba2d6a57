"""Dense non-Hermitian eigendecomposition, twist sweeps, and determinant phases.

The winding primitive is the phase of ``det[H(theta) - E_ref]`` accumulated
factor-by-factor from a pivoted LU decomposition; tracking that phase avoids
any eigenvalue pairing across theta (trajectories cross and permute freely).
Eigendecompositions are used for full spectral flows, gap margins and
occupation observables.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

RESIDUAL_RTOL = 1e-8
DEGENERACY_TOL = 1e-8
SINGULARITY_RTOL = 1e-12


class SpectralError(Exception):
    """Base class for engine failures."""


class EigensolverError(SpectralError):
    """Dense eigensolver did not converge."""


class SpectrumHitError(SpectralError):
    """Reference energy sits on (or numerically on) the spectrum."""


@dataclass
class EigenSolution:
    """Eigenvalues with unit-norm right eigenvectors and per-pair diagnostics.

    ``defective[i]`` marks pairs whose residual exceeds tolerance or that
    belong to a degenerate cluster with a deficient eigenvector rank (e.g. the
    open-boundary noninteracting chain, a single Jordan block); consumers must
    branch on the flag before trusting individual vectors.
    """

    values: np.ndarray
    right_vectors: np.ndarray
    residuals: np.ndarray
    defective: np.ndarray

    @property
    def dim(self):
        return len(self.values)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Unit 2-norm columns with the largest-magnitude component real-positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        nrm = np.linalg.norm(col)
        if nrm > 0:
            col = col / nrm
        lead = col[np.argmax(np.abs(col))]
        if lead != 0:
            col = col * (np.conj(lead) / abs(lead))
        out[:, k] = col
    return out


def eigendecompose(matrix) -> EigenSolution:
    """Full eigendecomposition of a sector matrix (or plain ndarray)."""
    a = np.asarray(getattr(matrix, "entries", matrix), dtype=complex)
    dim = a.shape[0]
    if dim == 0:
        z = np.zeros(0)
        return EigenSolution(z.astype(complex), np.zeros((0, 0), complex), z, z.astype(bool))
    try:
        values, vectors = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(
            f"eigensolver failed on dim={dim} matrix "
            f"(|H|_F={np.linalg.norm(a):.3e}, nonfinite={np.count_nonzero(~np.isfinite(a))})"
        ) from exc
    vectors = _fix_phases(vectors)
    scale = np.linalg.norm(a)
    residuals = np.linalg.norm(a @ vectors - vectors * values[None, :], axis=0)
    defective = residuals > RESIDUAL_RTOL * max(scale, 1e-300)

    # rank-deficient degenerate clusters: group nearly equal eigenvalues and
    # compare the numerical rank of their eigenvector block to the cluster size
    tol = DEGENERACY_TOL * max(np.abs(values).max(), 1.0)
    order = np.lexsort((values.imag, values.real))
    cluster = [order[0]]
    clusters = []
    for i in order[1:]:
        if abs(values[i] - values[cluster[-1]]) <= tol:
            cluster.append(i)
        else:
            clusters.append(cluster)
            cluster = [i]
    clusters.append(cluster)
    for cl in clusters:
        if len(cl) < 2:
            continue
        sv = np.linalg.svd(vectors[:, cl], compute_uv=False)
        rank = int(np.sum(sv > sv[0] * 1e-6))
        if rank < len(cl):
            defective[cl] = True
    return EigenSolution(values, vectors, residuals, defective)


def parallel_map(fn, items, workers: int = 1):
    """Order-preserving map, threaded when workers > 1 (LAPACK releases the GIL)."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class SpectralFlow:
    """Eigenvalue trajectories over an ordered parameter grid."""

    grid: np.ndarray
    spectra: np.ndarray  # (len(grid), dim)
    path_label: str

    @property
    def dim(self):
        return self.spectra.shape[1]

    def gap_margin(self, e_ref: complex) -> float:
        return float(np.abs(self.spectra - e_ref).min())


def theta_grid(n_grid: int) -> np.ndarray:
    return np.linspace(0.0, 2.0 * np.pi, n_grid + 1)


def sweep_theta(matrix_fn, n_grid: int, path_label: str = "theta-sweep",
                workers: int = 1) -> SpectralFlow:
    """Eigenvalues at theta_k = 2 pi k / n_grid for k = 0..n_grid (inclusive).

    ``matrix_fn(theta)`` must return the dense matrix; each spectrum is sorted
    by (real, imag) for reproducible output.
    """
    if n_grid < 16:
        raise ValueError("n_grid must be at least 16")
    grid = theta_grid(n_grid)

    def solve(theta):
        try:
            values = np.linalg.eigvals(np.asarray(matrix_fn(theta), dtype=complex))
        except np.linalg.LinAlgError as exc:
            raise EigensolverError(f"eigensolver failed at theta={theta:.6f}") from exc
        return values[np.lexsort((values.imag, values.real))]

    spectra = np.array(parallel_map(solve, grid, workers))
    return SpectralFlow(grid, spectra, path_label)


def periodicity_defect(flow: SpectralFlow) -> float:
    """Max distance between matched eigenvalues at the two grid ends."""
    from scipy.optimize import linear_sum_assignment

    first, last = flow.spectra[0], flow.spectra[-1]
    cost = np.abs(first[:, None] - last[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def deformation_params(base, path: str, s: float):
    """Dot parameters along the two trivializing deformation paths.

    * ``pair-ramp``: couplings J = V = s grow from 0 to 1 at fixed lam = 1.
    * ``hop-ramp``: lam = 1 - s shrinks to 0 with J = V = sqrt(lam).
    """
    from .models import DotParams

    if path == "pair-ramp":
        return DotParams(lam=1.0, eps_a_up=base.eps_a_up, eps_a_dn=base.eps_a_dn,
                         eps_b_up=base.eps_b_up, eps_b_dn=base.eps_b_dn, j=s, v=s)
    if path == "hop-ramp":
        lam = 1.0 - s
        g = np.sqrt(lam)
        return DotParams(lam=lam, eps_a_up=base.eps_a_up, eps_a_dn=base.eps_a_dn,
                         eps_b_up=base.eps_b_up, eps_b_dn=base.eps_b_dn, j=g, v=g)
    raise ValueError(f"unknown deformation path {path!r}")


@dataclass
class DeformationFlow:
    """theta-resolved spectra along a deformation path."""

    path: str
    path_values: np.ndarray
    flows: list
    e_ref: complex
    gap_margin: float


def sweep_deformation(base, path: str, sector, n_path: int, n_grid: int,
                      e_ref: complex = 0.0) -> DeformationFlow:
    """Spectral flows at n_path + 1 points along a dot deformation path.

    Reports the minimum over the whole (path, theta) grid of the distance
    between the spectrum and the reference energy.
    """
    from .models import build_dot_many_body, dot_sector_basis

    basis = dot_sector_basis(*sector)
    svals = np.linspace(0.0, 1.0, n_path + 1)
    flows = []
    margin = np.inf
    for s in svals:
        p = deformation_params(base, path, float(s))
        flow = sweep_theta(lambda th, p=p: build_dot_many_body(p, th, basis).entries,
                           n_grid, path_label=f"{path} s={s:.4f}")
        margin = min(margin, flow.gap_margin(e_ref))
        flows.append(flow)
    return DeformationFlow(path, svals, flows, e_ref, float(margin))


def _wrap_phase(phi: float) -> float:
    """Reduce to the principal branch (-pi, pi]."""
    out = np.remainder(phi + np.pi, 2.0 * np.pi) - np.pi
    if out == -np.pi:
        out = np.pi
    return float(out)


def factor_shifted(matrix, e_ref: complex):
    """Pivoted LU of (M - e_ref), plus the Frobenius scale of the shift."""
    a = np.asarray(getattr(matrix, "entries", matrix), dtype=complex)
    shifted = a - e_ref * np.eye(a.shape[0])
    scale = np.linalg.norm(shifted)
    return lu_factor(shifted, check_finite=False), scale


def phase_from_factors(factors, scale: float, e_ref: complex):
    """(log magnitude, principal phase) of the determinant behind an LU."""
    lu, piv = factors
    diag = np.diagonal(lu)
    if len(diag) and np.abs(diag).min() <= SINGULARITY_RTOL * max(scale, 1e-300):
        raise SpectrumHitError(
            f"reference energy {e_ref} lies on the spectrum "
            f"(pivot {np.abs(diag).min():.3e})")
    log_mag = float(np.sum(np.log(np.abs(diag))))
    swaps = int(np.sum(piv != np.arange(len(diag))))
    phase = float(np.sum(np.angle(diag))) + np.pi * (swaps % 2)
    return log_mag, _wrap_phase(phase)


def logdet_phase(matrix, e_ref: complex = 0.0):
    """Principal log-determinant of (M - e_ref), split as (log magnitude, phase).

    The phase is accumulated factor-by-factor over the pivoted triangular
    diagonal and then reduced to (-pi, pi].  Raises SpectrumHitError when a
    pivot falls below the singularity tolerance.
    """
    a = np.asarray(getattr(matrix, "entries", matrix), dtype=complex)
    if a.shape[0] == 0:
        return 0.0, 0.0
    factors, scale = factor_shifted(a, e_ref)
    return phase_from_factors(factors, scale, e_ref)


def sigma_min_from_factors(factors, dim: int, iters: int = 8) -> float:
    """Inverse-iteration estimate of the smallest singular value behind an LU."""
    v = np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)
    growth = 0.0
    for _ in range(iters):
        w = lu_solve(factors, v, trans=0, check_finite=False)
        u = lu_solve(factors, w, trans=2, check_finite=False)
        growth = np.linalg.norm(u)
        if not np.isfinite(growth) or growth == 0.0:
            return 0.0
        v = u / growth
    return float(1.0 / np.sqrt(growth))


def smallest_singular_estimate(matrix, e_ref: complex = 0.0, iters: int = 8) -> float:
    """Estimated smallest singular value of M - e_ref.

    Cheap certificate that the reference energy is spectrally isolated; for
    any matrix the smallest singular value lower-bounds the distance from
    e_ref to the spectrum.
    """
    a = np.asarray(getattr(matrix, "entries", matrix), dtype=complex)
    if a.shape[0] == 0:
        return np.inf
    factors, _ = factor_shifted(a, e_ref)
    return sigma_min_from_factors(factors, a.shape[0], iters)

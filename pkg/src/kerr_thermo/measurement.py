"""Gaussian measurements in the truncated Fock basis and their Fisher information.

Homodyne detection measures the quadrature Q_phi = (a e^{-i phi} + a^dag e^{i phi})/2;
its POVM is the eigenprojector family of the truncated quadrature operator, so
completeness is exact by the spectral theorem and the continuum is discretized
without any bin-width parameter.  Heterodyne detection is the coherent-state
POVM |alpha><alpha| / pi, discretized on a square grid over a disc with the
grid cell area as the integration weight; its outcome distribution is the
Husimi Q function.

Both POVMs are rank one, so elements are stored as their factor vectors.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc

from .errors import GridInsufficientError, TruncationError, TailMassWarning
from .fock import DensityMatrix, SystemParams, Truncation, annihilation
from .dynamics import TimeGrid
from .estimation import (
    CfiResult,
    FdConfig,
    FisherSeries,
    PerturbedTrajectories,
    cfi_result,
    perturbed_trajectories,
    stencil_combine,
)

__all__ = [
    "Povm",
    "quadrature_op",
    "homodyne_povm",
    "coherent_state",
    "heterodyne_povm",
    "outcome_distribution",
    "cfi_series",
]


@dataclass(frozen=True)
class Povm:
    """A rank-one POVM: element_i = |v_i><v_i| with integration weight w_i.

    Args stored:
        vectors: (n_outcomes, dim) factor kets, one per row.
        weights: positive measure weight per outcome (1 for projective
            measurements, grid cell area / pi for the heterodyne grid).
        labels: outcome coordinates, real (quadrature value) or complex
            (phase-space point).
        kind: "homodyne" or "heterodyne".
        phi: quadrature angle for homodyne, else None.
        completeness_tol: admissible max-entry deviation of
            sum_i w_i |v_i><v_i| from the identity.

    Construction verifies completeness at ``completeness_tol`` and records the
    achieved ``completeness_defect``.  Elements are positive semidefinite by
    construction (rank one).
    """

    vectors: np.ndarray
    weights: np.ndarray
    labels: np.ndarray
    kind: str
    phi: float | None = None
    completeness_tol: float = 1e-6
    completeness_defect: float = field(init=False, default=0.0)

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.complex128)
        weights = np.asarray(self.weights, dtype=float)
        labels = np.asarray(self.labels)
        if vectors.ndim != 2:
            raise ValueError(f"vectors must be 2d (n_outcomes, dim), got {vectors.shape}")
        if len(weights) != vectors.shape[0] or len(labels) != vectors.shape[0]:
            raise ValueError("vectors, weights and labels must agree in outcome count")
        if np.any(weights <= 0):
            raise ValueError("weights must be strictly positive")
        resolved = (vectors.T * weights) @ vectors.conj()
        defect = float(np.abs(resolved - np.eye(vectors.shape[1])).max())
        if defect > self.completeness_tol:
            raise ValueError(
                f"POVM completeness defect {defect:.3e} exceeds tolerance "
                f"{self.completeness_tol:.1e}"
            )
        for name, arr in (("vectors", vectors), ("weights", weights), ("labels", labels)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "completeness_defect", defect)

    @property
    def n_outcomes(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def element(self, i: int) -> np.ndarray:
        """The i-th POVM element w_i |v_i><v_i| as an explicit matrix."""
        v = self.vectors[i]
        return self.weights[i] * np.outer(v, v.conj())

    def elements(self) -> list[np.ndarray]:
        """All elements as explicit matrices (can be large for fine grids)."""
        return [self.element(i) for i in range(self.n_outcomes)]

    def completeness_operator(self) -> np.ndarray:
        """sum_i w_i |v_i><v_i|; equals the identity up to ``completeness_defect``."""
        return (self.vectors.T * self.weights) @ self.vectors.conj()


def quadrature_op(phi: float, trunc: Truncation) -> np.ndarray:
    """Quadrature operator (a e^{-i phi} + a^dag e^{i phi}) / 2.

    The vacuum variance under this normalization is 1/4.
    """
    a = annihilation(trunc.n_cut)
    rotated = 0.5 * np.exp(-1j * phi) * a
    return rotated + rotated.conj().T


def homodyne_povm(phi: float, trunc: Truncation) -> Povm:
    """Projective POVM of the truncated quadrature operator at angle ``phi``.

    Labels are the (ascending) eigenvalues; each eigenprojector carries weight
    one, so the resolution of the identity is exact.
    """
    values, vectors = np.linalg.eigh(quadrature_op(phi, trunc))
    return Povm(
        vectors=vectors.T,
        weights=np.ones(trunc.n_cut),
        labels=values,
        kind="homodyne",
        phi=float(phi),
        completeness_tol=1e-6,
    )


def _raw_coherent_amplitudes(alphas: np.ndarray, dim: int) -> np.ndarray:
    """Truncated coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!), not renormalized.

    Computed by cumulative products with the Gaussian prefactor folded in, so
    no intermediate overflows even far outside the cutoff's comfort zone.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=np.complex128))
    out = np.empty((len(alphas), dim), dtype=np.complex128)
    out[:, 0] = np.exp(-0.5 * np.abs(alphas) ** 2)
    for n in range(1, dim):
        out[:, n] = out[:, n - 1] * alphas / math.sqrt(n)
    return out


def coherent_state(alpha: complex, trunc: Truncation) -> np.ndarray:
    """Normalized coherent state |alpha> on the truncated space.

    The dropped tail mass of the untruncated Poisson distribution is checked:
    above 1e-8 a TailMassWarning is emitted, above 1e-3 the truncation is
    rejected outright.
    """
    amps = _raw_coherent_amplitudes(np.array([alpha]), trunc.n_cut)[0]
    norm_sq = float(np.sum(np.abs(amps) ** 2))
    tail = max(0.0, 1.0 - norm_sq)
    if tail > 1e-3:
        raise TruncationError(
            f"coherent state |alpha|^2 = {abs(alpha) ** 2:.3g} loses tail mass "
            f"{tail:.3e} at n_cut = {trunc.n_cut}; increase the cutoff"
        )
    if tail > 1e-8:
        warnings.warn(
            f"coherent-state tail mass {tail:.3e} exceeds 1e-8 at n_cut = {trunc.n_cut}",
            TailMassWarning,
            stacklevel=2,
        )
    return amps / math.sqrt(norm_sq)


def _completeness_radius(n_cut: int, tail_tol: float = 1e-6) -> float:
    # Smallest R with Gamma-tail(n_cut, R^2) <= tail_tol: beyond R the radial
    # integral for the top retained Fock level loses less than tail_tol.
    lo, hi = math.sqrt(n_cut), math.sqrt(n_cut) + 12.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if gammaincc(n_cut, mid * mid) > tail_tol:
            lo = mid
        else:
            hi = mid
    return hi


def _default_grid_step(n_cut: int) -> float:
    # Largest step whose aliasing bound exp(-(pi/h)^2) (pi/h)^{2n} / n! for the
    # top level n = n_cut - 1 stays below 1e-6 (trapezoid sums of Gaussians
    # converge spectrally in the step).
    n = n_cut - 1
    for h in (0.5, 0.45, 0.4, 0.35, 0.3, 0.25, 0.2, 0.15):
        x = math.pi / h
        log_bound = -x * x + 2 * n * math.log(x) - math.lgamma(n + 1)
        if log_bound < math.log(1e-6):
            return h
    return 0.1


def heterodyne_povm(
    trunc: Truncation,
    grid_radius: float | None = None,
    grid_step: float | None = None,
    mean_photon: float = 0.0,
    completeness_tol: float = 1e-4,
) -> Povm:
    """Coherent-state POVM |alpha><alpha| / pi on a square grid over a disc.

    Grid points are integer multiples of ``grid_step`` with |alpha| <=
    ``grid_radius``; each element carries Riemann weight step^2 / pi.  Defaults
    cover both the Husimi support of a state with the given ``mean_photon``
    and the identity resolution on the full truncated space.  A completeness
    defect above ``completeness_tol`` raises GridInsufficientError.
    """
    dim = trunc.n_cut
    if grid_radius is None:
        grid_radius = max(3.0 + 2.0 * math.sqrt(mean_photon + 1.0), _completeness_radius(dim))
    if grid_step is None:
        grid_step = _default_grid_step(dim)
    if not grid_radius > 0 or not grid_step > 0:
        raise ValueError("grid_radius and grid_step must be positive")

    half = int(math.floor(grid_radius / grid_step))
    axis = grid_step * np.arange(-half, half + 1)
    re, im = np.meshgrid(axis, axis, indexing="ij")
    alphas = (re + 1j * im).ravel()
    alphas = alphas[np.abs(alphas) <= grid_radius]
    vectors = _raw_coherent_amplitudes(alphas, dim)
    weights = np.full(len(alphas), grid_step**2 / math.pi)
    try:
        return Povm(
            vectors=vectors,
            weights=weights,
            labels=alphas,
            kind="heterodyne",
            completeness_tol=completeness_tol,
        )
    except ValueError as exc:
        raise GridInsufficientError(
            f"heterodyne grid (radius {grid_radius:g}, step {grid_step:g}) does not "
            f"resolve the identity on {dim} levels: {exc}; enlarge the radius or "
            f"refine the step"
        ) from exc


def outcome_distribution(rho, povm: Povm) -> np.ndarray:
    """Outcome probabilities p_i = w_i <v_i| rho |v_i>.

    Small negative roundoff (above -1e-12) is clipped to zero; anything more
    negative raises.  The probabilities sum to one up to the completeness
    defect of the POVM.
    """
    entries = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    if entries.shape != (povm.dim, povm.dim):
        raise ValueError(f"dimension mismatch: rho {entries.shape} vs POVM dim {povm.dim}")
    sandwich = povm.vectors.conj() @ entries
    p = np.einsum("id,id->i", sandwich, povm.vectors).real * povm.weights
    if p.size and float(p.min()) < -1e-12:
        raise ValueError(f"outcome probability {p.min():.3e} below the -1e-12 clip")
    return np.clip(p, 0.0, None)


def cfi_series(
    params: SystemParams,
    grid: TimeGrid,
    trunc: Truncation,
    cfg: FdConfig,
    povm: Povm,
    *,
    trajectories: PerturbedTrajectories | None = None,
) -> FisherSeries:
    """CFI of the POVM outcome distribution along the evolved probe state.

    Reuses the same central-plus-shifted trajectories as the QFI series (pass
    them in to avoid re-propagating); per sample time the outcome
    distributions are differentiated with the five-point stencil and fed to
    the classical Fisher sum.
    """
    tr = trajectories if trajectories is not None else perturbed_trajectories(params, grid, trunc, cfg)
    dists = {
        key: np.stack([outcome_distribution(s, povm) for s in run.states])
        for key, run in (
            ("m2", tr.minus2),
            ("m1", tr.minus1),
            ("c", tr.central),
            ("p1", tr.plus1),
            ("p2", tr.plus2),
        )
    }
    dp = stencil_combine(dists["p2"], dists["p1"], dists["m1"], dists["m2"], tr.step)
    values = np.empty(len(tr.times))
    skipped = 0.0
    for k in range(len(tr.times)):
        res: CfiResult = cfi_result(dists["c"][k], dp[k])
        values[k] = res.value
        skipped = max(skipped, res.skipped_mass)
    kind = "cfi_homodyne" if povm.kind == "homodyne" else "cfi_heterodyne"
    return FisherSeries(
        times=tr.times,
        values=values,
        kind=kind,
        fd=cfg,
        phi=povm.phi,
        max_skipped_mass=skipped,
    )

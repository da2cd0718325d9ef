"""Quantum and classical Fisher information for reservoir-occupation sensing.

The quantum Fisher information is computed from the symmetric logarithmic
derivative L, defined by 2 drho = {L, rho}: in the eigenbasis of rho,

    F_Q = 2 sum_{k,l} |<k|drho|l>|^2 / (lambda_k + lambda_l),

restricted to eigenvalue pairs whose sum exceeds a rank cutoff.  Parameter
derivatives use the five-point central stencil

    df/dn ~ (-f(n+2h) + 8 f(n+h) - 8 f(n-h) + f(n-2h)) / (12 h),

exact on polynomials up to degree 4.  Series evaluation propagates one
central and four occupation-shifted trajectories from the same vacuum and
differentiates the sampled states entrywise, so one set of propagations
serves every sample time (and can be reused for measurement CFI series).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .fock import DensityMatrix, SystemParams, Truncation, as_matrix, vacuum_state
from .dynamics import TimeGrid, Trajectory, propagate

__all__ = [
    "FdConfig",
    "SldResult",
    "FisherSeries",
    "PerturbedTrajectories",
    "fd_step",
    "stencil_combine",
    "fd_derivative",
    "qfi",
    "perturbed_trajectories",
    "qfi_series",
    "CfiResult",
    "cfi_result",
    "cfi",
    "cr_bound",
]

# Default floor below which an outcome probability is excluded from the CFI sum.
_P_FLOOR = 1e-14


@dataclass(frozen=True)
class FdConfig:
    """Finite-difference step control: h = max(rel_step * n_th, abs_floor).

    rel_step 1e-3 sits near the double-precision optimum for a fourth-order
    stencil; 1e-7 is selectable but amplifies roundoff in the differences.
    """

    rel_step: float = 1e-3
    abs_floor: float = 1e-9

    def __post_init__(self):
        if not self.rel_step > 0:
            raise ValueError(f"rel_step must be positive, got {self.rel_step}")
        if not self.abs_floor > 0:
            raise ValueError(f"abs_floor must be positive, got {self.abs_floor}")


@dataclass(frozen=True)
class SldResult:
    """QFI value with the symmetric logarithmic derivative that produced it."""

    qfi: float
    sld: np.ndarray
    rank_tol: float


@dataclass(frozen=True)
class FisherSeries:
    """Time-indexed Fisher information values and how they were differentiated.

    ``kind`` is "qfi", "cfi_homodyne" (with ``phi`` set) or "cfi_heterodyne".
    """

    times: np.ndarray
    values: np.ndarray
    kind: str
    fd: FdConfig
    phi: float | None = None
    max_skipped_mass: float = 0.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if len(times) != len(values):
            raise ValueError("times and values must have equal length")
        if np.any(values < 0):
            raise ValueError("Fisher information values must be nonnegative")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def plateau(self) -> float:
        """Value at the final sampled time."""
        return float(self.values[-1])

    def final_window_change(self, window_frac: float = 0.1) -> float:
        """Max relative deviation from the final value over the trailing window."""
        k = max(2, int(round(window_frac * len(self.values))))
        ref = max(abs(self.plateau), 1e-300)
        return float(np.max(np.abs(self.values[-k:] - self.plateau)) / ref)

    def time_at_fraction(self, frac: float) -> float:
        """First sampled time at which the series reaches frac * plateau."""
        target = frac * self.plateau
        idx = np.nonzero(self.values >= target)[0]
        if len(idx) == 0:
            raise ValueError(f"series never reaches {frac:g} of its plateau")
        return float(self.times[idx[0]])


def fd_step(n_th: float, cfg: FdConfig) -> float:
    """Stencil half-step for a given occupation; shrinks to keep n_th - 2h > 0."""
    if not n_th > 0:
        raise ValueError(f"n_th must be positive for a centered stencil, got {n_th}")
    h = max(cfg.rel_step * n_th, cfg.abs_floor)
    if n_th - 2.0 * h <= 0.0:
        h = 0.25 * n_th
        if h < cfg.abs_floor:
            raise ValueError(
                f"cannot place the 4-point stencil: n_th = {n_th:g} leaves no room "
                f"above abs_floor = {cfg.abs_floor:g}"
            )
    return h


def stencil_combine(f_p2, f_p1, f_m1, f_m2, h: float):
    """(-f_{+2h} + 8 f_{+h} - 8 f_{-h} + f_{-2h}) / (12 h), applied elementwise.

    Grouped as symmetric differences so nearly equal evaluations cancel before
    any scaling; identical inputs yield exactly zero.
    """
    diff1 = np.asarray(f_p1) - np.asarray(f_m1)
    diff2 = np.asarray(f_m2) - np.asarray(f_p2)
    return (diff2 + 8.0 * diff1) / (12.0 * h)


def fd_derivative(f: Callable[[float], np.ndarray], n_th: float, cfg: FdConfig):
    """Five-point derivative of ``f`` with respect to n_th at the configured step."""
    h = fd_step(n_th, cfg)
    return stencil_combine(f(n_th + 2 * h), f(n_th + h), f(n_th - h), f(n_th - 2 * h), h)


def qfi(
    rho: DensityMatrix,
    drho,
    rank_tol: float | None = None,
    *,
    rank_tol_rel: float = 1e-12,
) -> SldResult:
    """Quantum Fisher information Tr(rho L^2) for the family with derivative ``drho``.

    ``drho`` must be Hermitian and traceless (it is the derivative of a
    Hermitian unit-trace family).  ``rank_tol`` excludes eigenvalue pairs with
    lambda_k + lambda_l below it; when None it is ``rank_tol_rel`` times the
    largest eigenvalue (default 1e-12, scale invariant).  Derivatives obtained
    by finite differences carry roundoff of order eps/h in their entries, and
    near-null eigenvalue pairs turn that noise into spurious Fisher
    information; callers in that situation should raise the cutoff
    accordingly (see :func:`qfi_series`).
    """
    r = rho.entries if isinstance(rho, DensityMatrix) else as_matrix(rho)
    d = as_matrix(drho)
    if d.shape != r.shape:
        raise ValueError(f"dimension mismatch: rho {r.shape} vs drho {d.shape}")
    herm_defect = float(np.abs(d - d.conj().T).max())
    if herm_defect > 1e-8 * max(1.0, float(np.abs(d).max())):
        raise ValueError(f"drho is not Hermitian: defect {herm_defect:.3e}")
    trace_defect = abs(complex(d.trace()))
    if trace_defect > 1e-6:
        raise ValueError(f"drho is not traceless: |Tr drho| = {trace_defect:.3e}")

    lam, vec = np.linalg.eigh(r)
    if rank_tol is None:
        rank_tol = rank_tol_rel * float(lam.max())
    d_eig = vec.conj().T @ (0.5 * (d + d.conj().T)) @ vec
    denom = lam[:, None] + lam[None, :]
    keep = denom > rank_tol
    weights = np.where(keep, 2.0 / np.where(keep, denom, 1.0), 0.0)
    value = float(np.sum(weights * np.abs(d_eig) ** 2))
    sld_eig = weights * d_eig
    sld = vec @ sld_eig @ vec.conj().T
    sld = 0.5 * (sld + sld.conj().T)
    return SldResult(qfi=value, sld=sld, rank_tol=float(rank_tol))


@dataclass(frozen=True)
class PerturbedTrajectories:
    """A central trajectory plus the four occupation-shifted ones for the stencil.

    All five start from the same vacuum state; ``step`` is the stencil
    half-step h, and the trajectories correspond to n_th + {-2h,-h,0,+h,+2h}.
    """

    params: SystemParams
    step: float
    minus2: Trajectory
    minus1: Trajectory
    central: Trajectory
    plus1: Trajectory
    plus2: Trajectory

    @property
    def times(self) -> np.ndarray:
        return self.central.times

    def state_derivative(self, index: int) -> np.ndarray:
        """d rho / d n_th at sample ``index`` via the five-point stencil."""
        return stencil_combine(
            self.plus2.states[index].entries,
            self.plus1.states[index].entries,
            self.minus1.states[index].entries,
            self.minus2.states[index].entries,
            self.step,
        )


def perturbed_trajectories(
    params: SystemParams,
    grid: TimeGrid,
    trunc: Truncation,
    cfg: FdConfig,
) -> PerturbedTrajectories:
    """Propagate the five vacuum-seeded trajectories needed for Fisher series."""
    h = fd_step(params.n_th, cfg)
    rho0 = vacuum_state(trunc)
    runs = [
        propagate(rho0, params.with_n_th(params.n_th + k * h), grid, trunc)
        for k in (-2, -1, 0, 1, 2)
    ]
    return PerturbedTrajectories(
        params=params,
        step=h,
        minus2=runs[0],
        minus1=runs[1],
        central=runs[2],
        plus1=runs[3],
        plus2=runs[4],
    )


def qfi_series(
    params: SystemParams,
    grid: TimeGrid,
    trunc: Truncation,
    cfg: FdConfig,
    *,
    trajectories: PerturbedTrajectories | None = None,
) -> FisherSeries:
    """QFI of the evolved probe state as a function of time.

    Pass ``trajectories`` to reuse propagations already computed (e.g. when a
    measurement CFI series over the same grid is also wanted).
    """
    tr = trajectories if trajectories is not None else perturbed_trajectories(params, grid, trunc, cfg)
    dim = tr.central.states[0].dim
    eye = np.eye(dim)
    # Stencil entries carry roundoff of order eps/h; near-null eigenvalue
    # pairs would convert it into spurious Fisher information, so the rank
    # cutoff grows with that noise floor (~1e-10 at the default step, ~1e-6
    # at the smallest selectable steps).
    rank_rel = max(1e-12, 25.0 * np.finfo(float).eps / tr.step)
    values = np.empty(len(tr.times))
    for k in range(len(tr.times)):
        drho = tr.state_derivative(k)
        # The differentiated family has unit trace for every n_th, so its
        # derivative is exactly traceless; remove the stencil's 1/(12 h)
        # amplified trace roundoff before it meets the qfi input gate.
        drho -= (np.trace(drho) / dim) * eye
        values[k] = qfi(tr.central.states[k], drho, rank_tol_rel=rank_rel).qfi
    return FisherSeries(times=tr.times, values=values, kind="qfi", fd=cfg)


class CfiResult(NamedTuple):
    value: float
    skipped_mass: float


def cfi_result(probabilities, dprobabilities, p_floor: float = _P_FLOOR) -> CfiResult:
    """Classical Fisher information sum_x (dp_x)^2 / p_x with an outcome floor.

    Outcomes with p_x <= p_floor are skipped (continuum discretizations
    produce numerically empty bins) and their total mass is reported alongside
    the value.
    """
    p = np.asarray(probabilities, dtype=float)
    dp = np.asarray(dprobabilities, dtype=float)
    if p.shape != dp.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {dp.shape}")
    if p.size and float(p.min()) < -1e-12:
        raise ValueError(f"negative probability {p.min():.3e} beyond tolerance")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"probabilities sum to {total!r}, not 1 within 1e-6")
    p = np.clip(p, 0.0, None)
    keep = p > p_floor
    skipped = float(p[~keep].sum())
    value = float(np.sum(dp[keep] ** 2 / p[keep]))
    return CfiResult(value=value, skipped_mass=skipped)


def cfi(probabilities, dprobabilities, p_floor: float = _P_FLOOR) -> float:
    """Classical Fisher information of an outcome distribution; see :func:`cfi_result`."""
    return cfi_result(probabilities, dprobabilities, p_floor).value


def cr_bound(fisher: float, repetitions: int = 1) -> float:
    """Cramer-Rao lower bound 1 / (repetitions * fisher) on the estimator variance."""
    if not fisher > 0:
        raise ValueError(f"fisher must be positive, got {fisher}")
    if not isinstance(repetitions, (int, np.integer)) or repetitions < 1:
        raise ValueError(f"repetitions must be an integer >= 1, got {repetitions!r}")
    return 1.0 / (repetitions * fisher)

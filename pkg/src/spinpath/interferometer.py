"""Conditioned spin rotations with Gaussian-fluctuating field angles.

A magnetic field inside one interferometer arm rotates the spin only on
that path component, i.e. it applies the block unitary

    V = U_I (x) |I><I|  +  U_II (x) |II><II|

with per-path spin rotations U_p.  Mode A uses z-rotations with angles
(alpha, beta); mode B additionally applies x-rotations (gamma, delta)
before the z-rotations on each path.  When the angles fluctuate shot to
shot as independent zero-mean Gaussians of width sigma, the ensemble
average over shots reproduces the continuous decoherence channels of
:mod:`spinpath.lindblad` with a coupling fixed by sigma
(:func:`lambda_from_sigma`).

``ensemble_average_analytic`` evaluates the Gaussian average in closed
form for arbitrary input states; ``ensemble_average_monte_carlo`` does
the same by sampling.  Monte Carlo results depend only on (seed,
samples): sampling is organized in fixed-size blocks with per-block
child seeds, so the outcome is bitwise independent of how the work
would be scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import ID2, SIGMA_X, SIGMA_Z
from .states import matrix_to_json, validate_density_matrix

BOHR_MAGNETON = 9.2740100783e-24  # J / T
HBAR = 1.054571817e-34  # J * s

VARIANTS = ("both_paths_independent", "single_field_one_path", "single_field_both_paths")

_BLOCK_SIZE = 8192
_STDERR_FLOOR = 1e-15

_AXES = {"x": SIGMA_X, "z": SIGMA_Z}


@dataclass(frozen=True)
class FieldSetup:
    """Decoherence mode, fluctuation width and field-placement variant."""

    mode: str
    sigma: float
    variant: str = "both_paths_independent"

    def __post_init__(self):
        if self.mode not in ("A", "B"):
            raise ValueError(f"mode must be 'A' or 'B', got {self.mode!r}")
        if not (np.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValueError(f"sigma must be nonnegative, got {self.sigma!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")


@dataclass(frozen=True)
class ShotAngles:
    """Rotation angles of a single shot (gamma/delta only used by mode B)."""

    alpha: float
    beta: float
    gamma: float | None = None
    delta: float | None = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            value = getattr(self, name)
            if value is not None and not np.isfinite(value):
                raise ValueError(f"angle {name} must be finite, got {value!r}")


@dataclass(frozen=True, eq=False)
class EnsembleEstimate:
    """Monte Carlo mean state with per-element standard errors."""

    mean: np.ndarray
    stderr_re: np.ndarray
    stderr_im: np.ndarray
    samples: int
    seed: int
    setup: FieldSetup

    def to_json(self) -> dict:
        return {
            "mean": matrix_to_json(self.mean),
            "stderr_re": np.asarray(self.stderr_re).tolist(),
            "stderr_im": np.asarray(self.stderr_im).tolist(),
            "samples": self.samples,
            "seed": self.seed,
            "sigma": self.setup.sigma,
            "mode": self.setup.mode,
            "variant": self.setup.variant,
        }


def larmor_frequency(field_magnitude: float) -> float:
    """Spin precession angular frequency 2 * mu_B * B / hbar."""
    if field_magnitude < 0.0:
        raise ValueError(f"field magnitude must be nonnegative, got {field_magnitude!r}")
    return 2.0 * BOHR_MAGNETON * field_magnitude / HBAR


def rotation_angle(field_magnitude: float, dwell_time: float) -> float:
    """Accumulated precession angle 2 * mu_B * B * t / hbar."""
    if dwell_time < 0.0:
        raise ValueError(f"dwell time must be nonnegative, got {dwell_time!r}")
    return larmor_frequency(field_magnitude) * dwell_time


def spin_rotation(axis: str, angle: float) -> np.ndarray:
    """Single-qubit rotation cos(angle/2) 1 + i sin(angle/2) sigma_axis."""
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {tuple(_AXES)}, got {axis!r}")
    if not np.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    half = 0.5 * angle
    return np.cos(half) * ID2 + 1j * np.sin(half) * _AXES[axis]


def _conditioned(u_path_i: np.ndarray, u_path_ii: np.ndarray) -> np.ndarray:
    v = np.zeros((4, 4), dtype=complex)
    v[np.ix_((0, 2), (0, 2))] = u_path_i
    v[np.ix_((1, 3), (1, 3))] = u_path_ii
    return v


def conditioned_unitary(shot: ShotAngles, mode: str) -> np.ndarray:
    """Block unitary applying the per-path spin rotations of one shot.

    Mode A rotates about z only (angles alpha on path I, beta on path
    II).  Mode B applies the x-rotation first, then the z-rotation, on
    each path: U_p = U_z * U_x.
    """
    if mode == "A":
        if shot.gamma is not None or shot.delta is not None:
            raise ValueError("mode A uses z-angles only; gamma/delta must be omitted")
        u_i = spin_rotation("z", shot.alpha)
        u_ii = spin_rotation("z", shot.beta)
    elif mode == "B":
        if shot.gamma is None or shot.delta is None:
            raise ValueError("mode B requires gamma and delta")
        u_i = spin_rotation("z", shot.alpha) @ spin_rotation("x", shot.gamma)
        u_ii = spin_rotation("z", shot.beta) @ spin_rotation("x", shot.delta)
    else:
        raise ValueError(f"mode must be 'A' or 'B', got {mode!r}")
    return _conditioned(u_i, u_ii)


def single_shot_state(rho0: np.ndarray, shot: ShotAngles, mode: str) -> np.ndarray:
    """State after one shot with fixed angles: V rho0 V^dagger."""
    rho0 = validate_density_matrix(rho0)
    v = conditioned_unitary(shot, mode)
    return validate_density_matrix(v @ rho0 @ v.conj().T)


# --- closed-form Gaussian averaging -----------------------------------------
#
# Every conditioned rotation in a single Gaussian angle theta decomposes
# into harmonics V(theta) = sum_m exp(i*m*theta/2) G_m with m in
# {-1, 0, +1}.  Averaging V rho V^dagger over theta ~ N(0, sigma) gives
#
#     Phi(rho) = sum_{m,m'} exp(-(m - m')^2 sigma^2 / 8) G_m rho G_m'^dagger
#
# and independent angles average as the composition of their channels.

_P_PATH_I = np.diag([1.0, 0.0, 1.0, 0.0]).astype(complex)
_P_PATH_II = np.diag([0.0, 1.0, 0.0, 1.0]).astype(complex)


def _basis_projector(index: int) -> np.ndarray:
    p = np.zeros((4, 4), dtype=complex)
    p[index, index] = 1.0
    return p


def _spin_swap(path: str) -> np.ndarray:
    # sigma_x on the spin, restricted to one path's two basis states.
    a, b = (0, 2) if path == "I" else (1, 3)
    x = np.zeros((4, 4), dtype=complex)
    x[a, b] = 1.0
    x[b, a] = 1.0
    return x


def _z_harmonics(path: str):
    up, down = (0, 2) if path == "I" else (1, 3)
    idle = _P_PATH_II if path == "I" else _P_PATH_I
    return ((1, _basis_projector(up)), (-1, _basis_projector(down)), (0, idle))


def _x_harmonics(path: str):
    here = _P_PATH_I if path == "I" else _P_PATH_II
    idle = _P_PATH_II if path == "I" else _P_PATH_I
    swap = _spin_swap(path)
    return ((1, 0.5 * (here + swap)), (-1, 0.5 * (here - swap)), (0, idle))


def _global_z_harmonics():
    return (
        (1, np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)),
        (-1, np.diag([0.0, 0.0, 1.0, 1.0]).astype(complex)),
    )


def _angle_channel(rho: np.ndarray, harmonics, sigma: float) -> np.ndarray:
    out = np.zeros_like(rho)
    for m1, g1 in harmonics:
        for m2, g2 in harmonics:
            damp = np.exp(-((m1 - m2) ** 2) * sigma * sigma / 8.0)
            out += damp * (g1 @ rho @ g2.conj().T)
    return out


def _channel_sequence(setup: FieldSetup):
    """Per-angle channels in application order (innermost rotation first)."""
    if setup.mode == "A":
        if setup.variant == "both_paths_independent":
            return (_z_harmonics("II"), _z_harmonics("I"))
        if setup.variant == "single_field_one_path":
            return (_z_harmonics("II"),)
        return (_global_z_harmonics(),)
    if setup.variant != "both_paths_independent":
        raise ValueError(
            f"variant {setup.variant!r} is not supported for mode B; "
            "only 'both_paths_independent' is"
        )
    return (
        _x_harmonics("II"),
        _z_harmonics("II"),
        _x_harmonics("I"),
        _z_harmonics("I"),
    )


def ensemble_average_analytic(rho0: np.ndarray, setup: FieldSetup) -> np.ndarray:
    """Exact Gaussian ensemble average of the shot states."""
    rho = validate_density_matrix(rho0)
    for harmonics in _channel_sequence(setup):
        rho = _angle_channel(rho, harmonics, setup.sigma)
    return validate_density_matrix(rho)


# --- Monte Carlo -------------------------------------------------------------


def _sampled_unitaries(rng: np.random.Generator, setup: FieldSetup, count: int) -> np.ndarray:
    sigma = setup.sigma
    if setup.mode == "A":
        if setup.variant == "both_paths_independent":
            alpha = rng.normal(0.0, sigma, count)
            beta = rng.normal(0.0, sigma, count)
        elif setup.variant == "single_field_one_path":
            alpha = np.zeros(count)
            beta = rng.normal(0.0, sigma, count)
        else:
            alpha = rng.normal(0.0, sigma, count)
            beta = alpha
        u = np.zeros((count, 4, 4), dtype=complex)
        u[:, 0, 0] = np.exp(0.5j * alpha)
        u[:, 1, 1] = np.exp(0.5j * beta)
        u[:, 2, 2] = np.exp(-0.5j * alpha)
        u[:, 3, 3] = np.exp(-0.5j * beta)
        return u
    alpha = rng.normal(0.0, sigma, count)
    beta = rng.normal(0.0, sigma, count)
    gamma = rng.normal(0.0, sigma, count)
    delta = rng.normal(0.0, sigma, count)
    uz = np.zeros((count, 4, 4), dtype=complex)
    uz[:, 0, 0] = np.exp(0.5j * alpha)
    uz[:, 1, 1] = np.exp(0.5j * beta)
    uz[:, 2, 2] = np.exp(-0.5j * alpha)
    uz[:, 3, 3] = np.exp(-0.5j * beta)
    ux = np.zeros((count, 4, 4), dtype=complex)
    cg, sg = np.cos(0.5 * gamma), np.sin(0.5 * gamma)
    cd, sd = np.cos(0.5 * delta), np.sin(0.5 * delta)
    ux[:, 0, 0] = cg
    ux[:, 2, 2] = cg
    ux[:, 0, 2] = 1j * sg
    ux[:, 2, 0] = 1j * sg
    ux[:, 1, 1] = cd
    ux[:, 3, 3] = cd
    ux[:, 1, 3] = 1j * sd
    ux[:, 3, 1] = 1j * sd
    return uz @ ux


def ensemble_average_monte_carlo(
    rho0: np.ndarray, setup: FieldSetup, samples: int, seed: int
) -> EnsembleEstimate:
    """Sample mean of the shot states over Gaussian angle draws.

    Sampling runs in fixed blocks of 8192 shots; block i uses the child
    seed SeedSequence((seed, i)) and blocks are merged in index order,
    so the estimate is a pure function of (rho0, setup, samples, seed).

    Sums are accumulated as deviations from the input state (shifted-data
    form), so a zero-width angle distribution reproduces the input
    bit-exactly instead of picking up summation roundoff.
    """
    rho0 = validate_density_matrix(rho0)
    if not isinstance(samples, (int, np.integer)) or samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples!r}")
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    if setup.mode == "B" and setup.variant != "both_paths_independent":
        raise ValueError(
            f"variant {setup.variant!r} is not supported for mode B; "
            "only 'both_paths_independent' is"
        )
    base_re = rho0.real.copy()
    base_im = rho0.imag.copy()
    sum_re = np.zeros((4, 4))
    sum_im = np.zeros((4, 4))
    sumsq_re = np.zeros((4, 4))
    sumsq_im = np.zeros((4, 4))
    remaining = int(samples)
    block_index = 0
    while remaining > 0:
        count = min(_BLOCK_SIZE, remaining)
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), block_index)))
        u = _sampled_unitaries(rng, setup, count)
        shots = u @ rho0 @ u.conj().transpose(0, 2, 1)
        dev_re = shots.real - base_re
        dev_im = shots.imag - base_im
        sum_re += dev_re.sum(axis=0)
        sum_im += dev_im.sum(axis=0)
        sumsq_re += (dev_re ** 2).sum(axis=0)
        sumsq_im += (dev_im ** 2).sum(axis=0)
        remaining -= count
        block_index += 1
    n = float(samples)
    mean = (base_re + sum_re / n) + 1j * (base_im + sum_im / n)
    var_re = np.clip((sumsq_re - sum_re ** 2 / n) / (n - 1.0), 0.0, None)
    var_im = np.clip((sumsq_im - sum_im ** 2 / n) / (n - 1.0), 0.0, None)
    return EnsembleEstimate(
        mean=mean,
        stderr_re=np.sqrt(var_re / n),
        stderr_im=np.sqrt(var_im / n),
        samples=int(samples),
        seed=int(seed),
        setup=setup,
    )


def consistency_ratio(estimate: EnsembleEstimate, reference: np.ndarray) -> float:
    """Largest |mean - reference| / stderr over elements (re and im apart).

    Standard errors are floored at 1e-15 so elements whose shot-to-shot
    variance sits at rounding level do not produce spurious blowups.
    """
    reference = np.asarray(reference, dtype=complex)
    delta_re = np.abs(estimate.mean.real - reference.real)
    delta_im = np.abs(estimate.mean.imag - reference.imag)
    ratio_re = delta_re / np.maximum(estimate.stderr_re, _STDERR_FLOOR)
    ratio_im = delta_im / np.maximum(estimate.stderr_im, _STDERR_FLOOR)
    return float(max(ratio_re.max(), ratio_im.max()))


_LAMBDA_T_COEFF = {
    ("A", "both_paths_independent"): 0.25,
    ("A", "single_field_one_path"): 0.125,
    ("A", "single_field_both_paths"): 0.5,
    ("B", "both_paths_independent"): 0.5,
}


def lambda_from_sigma(setup: FieldSetup, dwell_time: float) -> float:
    """Coupling strength whose continuous evolution over ``dwell_time``
    matches the Gaussian ensemble average of the setup.

    The product lam * dwell_time equals c * sigma^2 with c = 1/4 for
    mode A with independent fields in both paths, 1/8 with a single
    field in one path, 1/2 with one shared field on both paths, and
    1/2 for mode B.
    """
    if dwell_time <= 0.0:
        raise ValueError(f"dwell time must be positive, got {dwell_time!r}")
    key = (setup.mode, setup.variant)
    if key not in _LAMBDA_T_COEFF:
        raise ValueError(
            f"variant {setup.variant!r} is not supported for mode {setup.mode}"
        )
    return _LAMBDA_T_COEFF[key] * setup.sigma ** 2 / dwell_time

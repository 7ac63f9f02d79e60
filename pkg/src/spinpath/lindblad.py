"""Master-equation dynamics for two projector-valued decoherence modes.

The equation of motion is

    d
    -- rho = -i [H, rho] - lam * (rho - sum_k P_k rho P_k)
    dt

with H diagonal in the product basis and {P_k} a complete family of
orthogonal rank-1 projectors.  Two families are supported:

* mode A: projectors onto the product basis vectors themselves, which
  purely dephases off-diagonal elements;
* mode B: projectors onto the states (e1 +/- e3)/sqrt(2) and
  (e2 +/- e4)/sqrt(2), i.e. the product basis rotated by a Hadamard on
  the spin factor.  This additionally mixes populations pairwise.

Both modes have closed-form solutions (``evolve_mode_a`` /
``evolve_mode_b``); ``integrate_master`` provides an independent
fixed-step numerical route for cross-checking them.

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .states import validate_density_matrix

_MODES = ("A", "B")


@dataclass(frozen=True)
class SystemHamiltonian:
    """Diagonal Hamiltonian, specified by its four energies."""

    energies: tuple[float, float, float, float]

    def __post_init__(self):
        energies = tuple(float(e) for e in self.energies)
        if len(energies) != 4:
            raise ValueError(f"expected 4 energies, got {len(energies)}")
        if not all(np.isfinite(energies)):
            raise ValueError("energies must be finite")
        object.__setattr__(self, "energies", energies)

    @classmethod
    def degenerate(cls) -> "SystemHamiltonian":
        return cls((0.0, 0.0, 0.0, 0.0))

    def diagonal(self) -> np.ndarray:
        return np.diag(np.array(self.energies, dtype=complex))


@dataclass(frozen=True)
class DecoherenceSpec:
    """Mode label, coupling strength and Hamiltonian for one evolution."""

    mode: str
    lam: float
    hamiltonian: SystemHamiltonian = field(default_factory=SystemHamiltonian.degenerate)

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be 'A' or 'B', got {self.mode!r}")
        if not (np.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError(f"coupling strength must be nonnegative, got {self.lam!r}")


@dataclass(frozen=True, eq=False)
class ProjectorSet:
    """Complete family of orthogonal projectors defining a dissipator."""

    projectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        projectors = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        total = np.zeros((4, 4), dtype=complex)
        for i, p in enumerate(projectors):
            if p.shape != (4, 4):
                raise ValueError(f"projector {i} has shape {p.shape}, expected (4, 4)")
            if np.abs(p - p.conj().T).max() > 1e-12:
                raise ValueError(f"projector {i} is not Hermitian")
            if np.abs(p @ p - p).max() > 1e-12:
                raise ValueError(f"projector {i} is not idempotent")
            total += p
        if np.abs(total - np.eye(4)).max() > 1e-12:
            raise ValueError("projectors do not sum to the identity")
        object.__setattr__(self, "projectors", projectors)


def projectors_mode_a() -> ProjectorSet:
    """Rank-1 projectors onto the four product basis vectors."""
    return ProjectorSet(tuple(np.diag(row).astype(complex) for row in np.eye(4)))


def projectors_mode_b() -> ProjectorSet:
    """Projectors onto (e1 +/- e3)/sqrt(2) and (e2 +/- e4)/sqrt(2)."""
    vectors = []
    for a, b in ((0, 2), (1, 3)):
        for sign in (1.0, -1.0):
            v = np.zeros(4, dtype=complex)
            v[a] = 1.0 / np.sqrt(2.0)
            v[b] = sign / np.sqrt(2.0)
            vectors.append(v)
    return ProjectorSet(tuple(np.outer(v, v.conj()) for v in vectors))


def projectors_for_mode(mode: str) -> ProjectorSet:
    if mode == "A":
        return projectors_mode_a()
    if mode == "B":
        return projectors_mode_b()
    raise ValueError(f"mode must be 'A' or 'B', got {mode!r}")


def dissipator(rho: np.ndarray, projectors: ProjectorSet, lam: float) -> np.ndarray:
    """Damping term lam * (rho - sum_k P_k rho P_k) of the master equation."""
    if not (np.isfinite(lam) and lam >= 0.0):
        raise ValueError(f"coupling strength must be nonnegative, got {lam!r}")
    rho = np.asarray(rho, dtype=complex)
    pinched = np.zeros_like(rho)
    for p in projectors.projectors:
        pinched += p @ rho @ p
    return lam * (rho - pinched)


def evolve_mode_a(rho0: np.ndarray, spec: DecoherenceSpec, t: float) -> np.ndarray:
    """Closed-form mode-A state at time t.

    Off-diagonal elements pick up the free phase and an exp(-lam*t)
    envelope; populations are constants of motion.
    """
    rho0 = validate_density_matrix(rho0)
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    energies = np.array(spec.hamiltonian.energies)
    factors = np.exp(
        (-1j * np.subtract.outer(energies, energies) - spec.lam) * t
    )
    np.fill_diagonal(factors, 1.0)
    return validate_density_matrix(rho0 * factors)


def _damped_cosh_sinh(lam: float, mu: complex, t: float) -> tuple[complex, complex]:
    """Overflow-safe exp(-lam*t/2)*cosh(mu*t/2) and exp(-lam*t/2)*sinh(mu*t/2)/mu.

    Re(mu) <= lam always holds here (mu^2 = lam^2 - 4*dE^2), so both
    exponents below are nonpositive and never overflow.  The sinh term
    uses a series for small |mu*t| to avoid cancellation.
    """
    ea = np.exp(0.5 * (mu - lam) * t)
    eb = np.exp(-0.5 * (mu + lam) * t)
    ch = 0.5 * (ea + eb)
    x = 0.5 * mu * t
    if abs(x) < 1e-6:
        sh_over_mu = 0.5 * t * np.exp(-0.5 * lam * t) * (1.0 + x * x / 6.0 + x ** 4 / 120.0)
    else:
        sh_over_mu = 0.5 * (ea - eb) / mu
    return complex(ch), complex(sh_over_mu)


def evolve_mode_b(rho0: np.ndarray, spec: DecoherenceSpec, t: float) -> np.ndarray:
    """Closed-form mode-B state at time t.

    The equations of motion split into three families:

    * elements connecting {e1, e3} to {e2, e4} decay exactly as in
      mode A;
    * the population pairs (rho11, rho33) and (rho22, rho44) relax
      toward their pairwise means with rate lam;
    * the coherence pairs (rho13, rho31) and (rho24, rho42) couple
      through a 2x2 linear system whose eigenfrequencies involve
      mu = sqrt(lam^2 - 4*dE^2); for 2*|dE| > lam the square root is
      taken complex, which analytically continues the same expressions
      into the damped-oscillation regime.
    """
    rho0 = validate_density_matrix(rho0)
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    lam = spec.lam
    energies = spec.hamiltonian.energies
    out = np.zeros((4, 4), dtype=complex)

    # Cross-block elements: same form as mode A.
    decay = np.exp(-lam * t)
    for k, j in ((0, 1), (0, 3), (2, 1), (2, 3)):
        phase = np.exp(-1j * (energies[k] - energies[j]) * t)
        out[k, j] = phase * decay * rho0[k, j]
        out[j, k] = np.conj(phase * decay) * rho0[j, k]

    # Population pairs: exponential approach to the pairwise mean.
    ep = 0.5 * (1.0 + decay)
    em = 0.5 * (1.0 - decay)
    for k, j in ((0, 2), (1, 3)):
        out[k, k] = ep * rho0[k, k] + em * rho0[j, j]
        out[j, j] = em * rho0[k, k] + ep * rho0[j, j]

    # Coupled coherence pairs.
    for k, j in ((0, 2), (1, 3)):
        de = energies[k] - energies[j]
        mu = np.sqrt(complex(lam * lam - 4.0 * de * de))
        ch, sh = _damped_cosh_sinh(lam, mu, t)
        out[k, j] = (ch - 2.0j * de * sh) * rho0[k, j] + lam * sh * rho0[j, k]
        out[j, k] = (ch + 2.0j * de * sh) * rho0[j, k] + lam * sh * rho0[k, j]

    return validate_density_matrix(out)


def evolve(rho0: np.ndarray, spec: DecoherenceSpec, t: float) -> np.ndarray:
    """Dispatch to the closed form matching ``spec.mode``."""
    if spec.mode == "A":
        return evolve_mode_a(rho0, spec, t)
    return evolve_mode_b(rho0, spec, t)


def _master_rhs(rho: np.ndarray, hamiltonian: np.ndarray, projectors, lam: float) -> np.ndarray:
    pinched = np.zeros_like(rho)
    for p in projectors:
        pinched += p @ rho @ p
    return -1j * (hamiltonian @ rho - rho @ hamiltonian) - lam * (rho - pinched)


def integrate_master(
    rho0: np.ndarray,
    projectors: ProjectorSet,
    spec: DecoherenceSpec,
    t: float,
    dt: float = 1e-3,
) -> np.ndarray:
    """Fixed-step RK4 integration of the master equation up to time t.

    Takes steps of size ``dt`` with a single shortened final step to
    land exactly on ``t``.  Hermiticity and trace drift are monitored
    (budget 1e-9 per unit time) and the result is re-Hermitized and
    trace-renormalized before validation.
    """
    rho = np.array(validate_density_matrix(rho0))
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    if dt <= 0.0:
        raise ValueError(f"step size must be positive, got {dt!r}")
    if t == 0.0:
        return rho
    h = spec.hamiltonian.diagonal()
    ps = projectors.projectors
    lam = spec.lam

    n_full, remainder = divmod(t, dt)
    steps = [dt] * int(n_full)
    if remainder > 1e-12 * dt:
        steps.append(remainder)
    for step in steps:
        k1 = _master_rhs(rho, h, ps, lam)
        k2 = _master_rhs(rho + 0.5 * step * k1, h, ps, lam)
        k3 = _master_rhs(rho + 0.5 * step * k2, h, ps, lam)
        k4 = _master_rhs(rho + step * k3, h, ps, lam)
        rho = rho + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    herm_drift = float(np.abs(rho - rho.conj().T).max())
    trace_drift = abs(float(np.trace(rho).real) - 1.0)
    budget = 1e-9 * max(t, 1.0)
    if herm_drift > budget or trace_drift > budget:
        raise np.linalg.LinAlgError(
            f"integration drift exceeded budget {budget:.1e}: "
            f"hermiticity {herm_drift:.3e}, trace {trace_drift:.3e}"
        )
    rho = (rho + rho.conj().T) / 2.0
    rho = rho / np.trace(rho).real
    return validate_density_matrix(rho)

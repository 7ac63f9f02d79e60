"""Mixedness and entanglement measures for two-qubit states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import SIGMA_Y
from .states import BellWeights, validate_density_matrix

_YY = np.kron(SIGMA_Y, SIGMA_Y)
_IMAG_TOL = 1e-9
_NEG_TOL = -1e-9


@dataclass(frozen=True)
class MeasureReport:
    """Mixedness, concurrence and the intermediate spin-flip spectrum."""

    mixedness: float
    concurrence: float
    wootters_roots: tuple[float, float, float, float]

    def __post_init__(self):
        if not (0.25 - 1e-9 <= self.mixedness <= 1.0 + 1e-9):
            raise ValueError(f"mixedness out of range [1/4, 1]: {self.mixedness!r}")
        if not (-1e-12 <= self.concurrence <= 1.0 + 1e-9):
            raise ValueError(f"concurrence out of range [0, 1]: {self.concurrence!r}")
        roots = tuple(float(r) for r in self.wootters_roots)
        if len(roots) != 4 or any(r < 0 for r in roots) or list(roots) != sorted(roots, reverse=True):
            raise ValueError("wootters_roots must be 4 nonnegative reals in decreasing order")
        object.__setattr__(self, "wootters_roots", roots)

    def to_json(self) -> dict:
        return {
            "mixedness": self.mixedness,
            "concurrence": self.concurrence,
            "wootters_roots": list(self.wootters_roots),
        }


def mixedness(rho: np.ndarray) -> float:
    """Purity Tr(rho^2): 1 for pure states, 1/4 for the maximally mixed one."""
    rho = validate_density_matrix(rho)
    return float(np.trace(rho @ rho).real)


def spin_flip_transform(rho: np.ndarray) -> np.ndarray:
    """Product rho * (sy (x) sy) * conj(rho) * (sy (x) sy).

    Complex conjugation is taken entrywise in the product basis the
    state is stored in.  The result is similar to a positive matrix, so
    its spectrum is real and nonnegative up to rounding.
    """
    rho = validate_density_matrix(rho)
    return rho @ _YY @ rho.conj() @ _YY


def wootters_roots(rho: np.ndarray) -> np.ndarray:
    """Decreasing square roots of the spin-flip product's eigenvalues."""
    product = spin_flip_transform(rho)
    eigenvalues = np.linalg.eigvals(product)
    max_imag = float(np.abs(eigenvalues.imag).max())
    if max_imag > _IMAG_TOL:
        raise np.linalg.LinAlgError(
            f"spin-flip spectrum not real: max |Im eigenvalue| = {max_imag:.3e}"
        )
    real_parts = eigenvalues.real
    min_eig = float(real_parts.min())
    if min_eig < _NEG_TOL:
        raise np.linalg.LinAlgError(
            f"spin-flip spectrum not nonnegative: min eigenvalue = {min_eig:.3e}"
        )
    return np.sort(np.sqrt(np.clip(real_parts, 0.0, None)))[::-1]


def concurrence(rho: np.ndarray) -> float:
    """Entanglement monotone max{0, mu1 - mu2 - mu3 - mu4}.

    The mu_i are the decreasing square roots of the eigenvalues of
    ``spin_flip_transform(rho)``.  Returns 0 for separable states and 1
    for maximally entangled ones.
    """
    mu = wootters_roots(rho)
    return float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]))


def concurrence_bell_diagonal(weights) -> float:
    """Closed form max{0, 2*max(nu) - 1} for Bell-diagonal states."""
    if not isinstance(weights, BellWeights):
        weights = BellWeights(tuple(weights))
    return float(max(0.0, 2.0 * max(weights.nu) - 1.0))


def measure_report(rho: np.ndarray) -> MeasureReport:
    """Bundle mixedness, concurrence and the spin-flip roots for one state."""
    rho = validate_density_matrix(rho)
    mu = wootters_roots(rho)
    return MeasureReport(
        mixedness=float(np.trace(rho @ rho).real),
        concurrence=float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3])),
        wootters_roots=tuple(float(x) for x in mu),
    )

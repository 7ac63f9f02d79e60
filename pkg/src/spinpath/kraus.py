"""Discrete Kraus maps matching the two decoherence modes.

Each mode has a four-operator set parametrized by a step weight
w = lam * t (valid for 0 <= w <= 4/3):

    mode A: sqrt(1 - 3w/4) * 1,  sqrt(w/4) * {1 (x) sz, sz (x) 1, sz (x) sz}
    mode B: sqrt(1 - 3w/4) * 1,  sqrt(w/4) * {1 (x) sz, sx (x) 1, sx (x) sz}

Applying the n-fold composition with per-step weight lam*t/n converges
to the continuous-time solution at first order in 1/n, which
``trotter_evolve`` exploits and the test suite cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import ID2, ID4, SIGMA_X, SIGMA_Z, spin_path
from .states import matrix_from_json, matrix_to_json, validate_density_matrix

MAX_WEIGHT = 4.0 / 3.0
_COMPLETENESS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Operators of a completely positive trace-preserving map."""

    operators: tuple[np.ndarray, ...]
    weight: float

    def __post_init__(self):
        operators = tuple(np.asarray(op, dtype=complex) for op in self.operators)
        if not operators:
            raise ValueError("kraus set must contain at least one operator")
        for i, op in enumerate(operators):
            if op.shape != (4, 4):
                raise ValueError(f"operator {i} has shape {op.shape}, expected (4, 4)")
        object.__setattr__(self, "operators", operators)
        defect = _completeness_defect(operators)
        if defect > _COMPLETENESS_TOL:
            raise ValueError(f"kraus completeness violated: max|sum M^t M - 1| = {defect:.3e}")


def _completeness_defect(operators) -> float:
    total = np.zeros((4, 4), dtype=complex)
    for op in operators:
        total += op.conj().T @ op
    return float(np.abs(total - ID4).max())


def completeness_defect(kraus_set: KrausSet) -> float:
    """Max elementwise deviation of sum M^dagger M from the identity."""
    return _completeness_defect(kraus_set.operators)


def _check_weight(weight: float) -> float:
    weight = float(weight)
    if not np.isfinite(weight) or weight < 0.0 or weight > MAX_WEIGHT:
        raise ValueError(f"step weight must lie in [0, 4/3], got {weight!r}")
    return weight


def kraus_set_a(weight: float) -> KrausSet:
    """Mode-A step map: dephasing by sigma_z factors on both qubits."""
    w = _check_weight(weight)
    c = np.sqrt(w / 4.0)
    operators = (
        np.sqrt(1.0 - 3.0 * w / 4.0) * ID4,
        c * spin_path(ID2, SIGMA_Z),
        c * spin_path(SIGMA_Z, ID2),
        c * spin_path(SIGMA_Z, SIGMA_Z),
    )
    return KrausSet(operators=operators, weight=w)


def kraus_set_b(weight: float) -> KrausSet:
    """Mode-B step map: sigma_x on the spin replaces two sigma_z factors."""
    w = _check_weight(weight)
    c = np.sqrt(w / 4.0)
    operators = (
        np.sqrt(1.0 - 3.0 * w / 4.0) * ID4,
        c * spin_path(ID2, SIGMA_Z),
        c * spin_path(SIGMA_X, ID2),
        c * spin_path(SIGMA_X, SIGMA_Z),
    )
    return KrausSet(operators=operators, weight=w)


def kraus_set_for_mode(mode: str, weight: float) -> KrausSet:
    if mode == "A":
        return kraus_set_a(weight)
    if mode == "B":
        return kraus_set_b(weight)
    raise ValueError(f"mode must be 'A' or 'B', got {mode!r}")


def _apply(rho: np.ndarray, operators) -> np.ndarray:
    out = np.zeros_like(rho)
    for op in operators:
        out += op @ rho @ op.conj().T
    return out


def apply_channel(rho: np.ndarray, kraus_set: KrausSet) -> np.ndarray:
    """One application sum_k M_k rho M_k^dagger of the map."""
    rho = validate_density_matrix(rho)
    defect = completeness_defect(kraus_set)
    if defect > _COMPLETENESS_TOL:
        raise ValueError(f"kraus completeness violated: max|sum M^t M - 1| = {defect:.3e}")
    return validate_density_matrix(_apply(rho, kraus_set.operators))


def trotter_evolve(rho0: np.ndarray, mode: str, lam: float, t: float, n: int) -> np.ndarray:
    """n-fold composition of the per-step map with weight lam*t/n."""
    rho = validate_density_matrix(rho0)
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"step count must be a positive integer, got {n!r}")
    if not (np.isfinite(lam) and lam >= 0.0):
        raise ValueError(f"coupling strength must be nonnegative, got {lam!r}")
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    step = kraus_set_for_mode(mode, lam * t / n)
    for _ in range(n):
        rho = _apply(rho, step.operators)
    return validate_density_matrix(rho)


def lindblad_generators_from_kraus(kraus_set: KrausSet, dt: float) -> tuple[list[np.ndarray], float]:
    """Recover continuous-time jump operators from a small-weight step map.

    For a step map with weight w = lam*dt the non-identity operators
    scale as sqrt(dt); dividing by sqrt(dt) yields the jump operators
    A_k of the continuous equation.  Returns the list [A_1, A_2, A_3]
    and the residual max|M_0 - (1 - dt/2 * sum A_k^dagger A_k)|, which
    is O(dt^2) for these maps.

    Only the four-operator structure above (identity leader plus
    unitary-proportional companions) is supported.
    """
    if dt <= 0.0:
        raise ValueError(f"step duration must be positive, got {dt!r}")
    operators = kraus_set.operators
    if len(operators) != 4:
        raise ValueError(f"unsupported kraus set: expected 4 operators, got {len(operators)}")
    leader = operators[0]
    scale = leader[0, 0]
    if abs(scale.imag) > 1e-12 or scale.real <= 0.0 or np.abs(leader - scale * ID4).max() > 1e-12:
        raise ValueError("unsupported kraus set: leading operator is not a positive multiple of the identity")
    generators = []
    correction = np.zeros((4, 4), dtype=complex)
    for op in operators[1:]:
        gen = op / np.sqrt(dt)
        gram = gen.conj().T @ gen
        g = gram[0, 0]
        if np.abs(gram - g * ID4).max() > 1e-12 * max(1.0, abs(g)):
            raise ValueError("unsupported kraus set: jump operator is not unitary-proportional")
        generators.append(gen)
        correction += gram
    residual = float(np.abs(leader - (ID4 - 0.5 * dt * correction)).max())
    return generators, residual


def kraus_to_json(kraus_set: KrausSet) -> dict:
    """Serialize as ``{"weight": w, "operators": [matrix json, ...]}``."""
    return {
        "weight": kraus_set.weight,
        "operators": [matrix_to_json(op) for op in kraus_set.operators],
    }


def kraus_from_json(obj: dict) -> KrausSet:
    if not isinstance(obj, dict) or "weight" not in obj or "operators" not in obj:
        raise ValueError("kraus json must be an object with 'weight' and 'operators'")
    operators = tuple(matrix_from_json(op) for op in obj["operators"])
    return KrausSet(operators=operators, weight=float(obj["weight"]))

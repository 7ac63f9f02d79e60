"""Simulated two-qubit state tomography.

Measurement model: for each of the nine settings (spin observable,
path observable) in {X, Y, Z} x {X, Y, Z}, both qubits are projected
onto the +/-1 eigenspaces of their observables.  Outcome probabilities
follow the Born rule; finite-shot data are multinomial draws.

Reconstruction is linear inversion in the Pauli basis: correlators come
from the matching setting, single-qubit expectations are averaged over
the three settings that share the observable, and the raw estimate is

    raw = 1/4 * (1 + sum_i <s_i> s_i(x)1 + sum_j <p_j> 1(x)p_j
                   + sum_ij <s_i p_j> s_i(x)p_j).

Finite statistics can push raw outside the physical set, so the
returned estimate is its eigenvalue-clipped projection
(:func:`project_psd`), with the Frobenius distance between the two
reported as a diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import ID2, ID4, SIGMA_X, SIGMA_Y, SIGMA_Z, spin_path
from .states import matrix_to_json, validate_density_matrix

_OBSERVABLES = {"X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}
OBSERVABLE_NAMES = ("X", "Y", "Z")

# Outcome order for counts and probabilities: (+,+), (+,-), (-,+), (-,-).
_SPIN_SIGNS = np.array([1.0, 1.0, -1.0, -1.0])
_PATH_SIGNS = np.array([1.0, -1.0, 1.0, -1.0])


@dataclass(frozen=True)
class MeasurementSetting:
    """One observable per qubit, named by its Pauli letter."""

    spin_observable: str
    path_observable: str

    def __post_init__(self):
        for name in (self.spin_observable, self.path_observable):
            if name not in _OBSERVABLES:
                raise ValueError(f"observable must be one of {OBSERVABLE_NAMES}, got {name!r}")


ALL_SETTINGS = tuple(
    MeasurementSetting(s, p) for s in OBSERVABLE_NAMES for p in OBSERVABLE_NAMES
)


@dataclass(frozen=True)
class CountRecord:
    """Outcome tallies for one setting.

    ``shots >= 1`` means integer counts summing to ``shots``.  The
    sentinel ``shots == 0`` marks exact-probability records, whose
    "counts" are the Born probabilities themselves (used to feed the
    reconstruction with infinite-statistics data).
    """

    setting: MeasurementSetting
    counts: tuple
    shots: int

    def __post_init__(self):
        counts = tuple(float(c) for c in self.counts)
        if len(counts) != 4:
            raise ValueError(f"expected 4 outcome tallies, got {len(counts)}")
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if self.shots < 0:
            raise ValueError(f"shots must be nonnegative, got {self.shots!r}")
        if self.shots > 0:
            if any(c != int(c) for c in counts):
                raise ValueError("counts must be integers when shots > 0")
            if int(sum(counts)) != self.shots:
                raise ValueError(
                    f"counts sum to {int(sum(counts))}, expected shots = {self.shots}"
                )
            counts = tuple(int(c) for c in counts)
        elif abs(sum(counts) - 1.0) > 1e-9:
            raise ValueError(f"probability record must sum to 1, got {sum(counts)!r}")
        object.__setattr__(self, "counts", counts)

    def frequencies(self) -> np.ndarray:
        if self.shots > 0:
            return np.array(self.counts, dtype=float) / self.shots
        return np.array(self.counts, dtype=float)


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """Physical estimate, raw linear-inversion matrix, and their distance."""

    estimate: np.ndarray
    raw_linear: np.ndarray
    frobenius_residual: float

    def to_json(self) -> dict:
        return {
            "estimate": matrix_to_json(self.estimate),
            "frobenius_residual": self.frobenius_residual,
        }


def outcome_probabilities(rho: np.ndarray, setting: MeasurementSetting) -> np.ndarray:
    """Born probabilities of the four joint outcomes, in the fixed order."""
    rho = validate_density_matrix(rho)
    spin_obs = _OBSERVABLES[setting.spin_observable]
    path_obs = _OBSERVABLES[setting.path_observable]
    probs = np.empty(4)
    for i, (a, b) in enumerate(((1, 1), (1, -1), (-1, 1), (-1, -1))):
        proj = spin_path((ID2 + a * spin_obs) / 2.0, (ID2 + b * path_obs) / 2.0)
        probs[i] = float(np.trace(rho @ proj).real)
    if probs.min() < -1e-9:
        raise np.linalg.LinAlgError(f"negative outcome probability: {probs.min():.3e}")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def exact_records(rho: np.ndarray) -> list[CountRecord]:
    """Infinite-statistics records (shots = 0 sentinel) for all settings."""
    return [
        CountRecord(setting=s, counts=tuple(outcome_probabilities(rho, s)), shots=0)
        for s in ALL_SETTINGS
    ]


def simulate_counts(rho: np.ndarray, shots: int, seed: int) -> list[CountRecord]:
    """Multinomial outcome counts for all nine settings.

    Setting i (in the fixed X/Y/Z x X/Y/Z enumeration order) draws from
    a generator seeded with SeedSequence((seed, i)), so records are a
    pure function of (rho, shots, seed), independent of scheduling.
    """
    rho = validate_density_matrix(rho)
    if not isinstance(shots, (int, np.integer)) or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    records = []
    for i, setting in enumerate(ALL_SETTINGS):
        probs = outcome_probabilities(rho, setting)
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), i)))
        counts = rng.multinomial(int(shots), probs)
        records.append(CountRecord(setting=setting, counts=tuple(int(c) for c in counts), shots=int(shots)))
    return records


def reconstruct_linear(records) -> Reconstruction:
    """Linear inversion of a complete set of nine setting records."""
    by_key = {}
    for record in records:
        key = (record.setting.spin_observable, record.setting.path_observable)
        if key in by_key:
            raise ValueError(f"duplicate setting {key}")
        by_key[key] = record
    missing = [
        (s, p)
        for s in OBSERVABLE_NAMES
        for p in OBSERVABLE_NAMES
        if (s, p) not in by_key
    ]
    if missing:
        raise ValueError(f"missing settings: {missing}")

    spin_expectations = dict.fromkeys(OBSERVABLE_NAMES, 0.0)
    path_expectations = dict.fromkeys(OBSERVABLE_NAMES, 0.0)
    raw = ID4.copy()
    for s in OBSERVABLE_NAMES:
        for p in OBSERVABLE_NAMES:
            freq = by_key[(s, p)].frequencies()
            correlator = float(freq @ (_SPIN_SIGNS * _PATH_SIGNS))
            raw += correlator * spin_path(_OBSERVABLES[s], _OBSERVABLES[p])
            spin_expectations[s] += float(freq @ _SPIN_SIGNS) / 3.0
            path_expectations[p] += float(freq @ _PATH_SIGNS) / 3.0
    for s in OBSERVABLE_NAMES:
        raw += spin_expectations[s] * spin_path(_OBSERVABLES[s], ID2)
    for p in OBSERVABLE_NAMES:
        raw += path_expectations[p] * spin_path(ID2, _OBSERVABLES[p])
    raw = raw / 4.0

    estimate = project_psd(raw)
    residual = float(np.linalg.norm(raw - estimate))
    return Reconstruction(estimate=estimate, raw_linear=raw, frobenius_residual=residual)


def project_psd(m: np.ndarray) -> np.ndarray:
    """Nearest-physical repair: clip negative eigenvalues, renormalize trace.

    The input must be Hermitian within 1e-9 (it is symmetrized before
    the eigendecomposition).  Raises if every clipped eigenvalue is
    zero, since no state can be formed then.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix contains nan or inf")
    herm_defect = float(np.abs(m - m.conj().T).max())
    if herm_defect > 1e-9:
        raise ValueError(f"matrix not Hermitian: max|m - m^dagger| = {herm_defect:.3e}")
    hermitian = (m + m.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(hermitian)
    vals = np.clip(vals, 0.0, None)
    total = vals.sum()
    if total <= 0.0:
        raise ValueError("cannot project: all eigenvalues nonpositive")
    vals = vals / total
    return validate_density_matrix((vecs * vals) @ vecs.conj().T)


def counts_to_json(records) -> list:
    """Serialize records as a list of per-setting objects."""
    return [
        {
            "spin": r.setting.spin_observable,
            "path": r.setting.path_observable,
            "counts": list(r.counts),
            "shots": r.shots,
        }
        for r in records
    ]


def counts_from_json(items) -> list[CountRecord]:
    if not isinstance(items, list):
        raise ValueError("counts json must be a list")
    records = []
    for item in items:
        try:
            setting = MeasurementSetting(item["spin"], item["path"])
            records.append(
                CountRecord(setting=setting, counts=tuple(item["counts"]), shots=int(item["shots"]))
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed counts json entry: {exc}") from exc
    return records

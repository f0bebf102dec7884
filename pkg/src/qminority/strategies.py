"""Single-qubit strategies and their wave-plate realizations.

A strategy is an SU(2) element parametrized as

    M(theta, b1, b2) = [[ e^{i b1} cos(theta/2),  i e^{i b2} sin(theta/2)],
                        [ i e^{-i b2} sin(theta/2), e^{-i b1} cos(theta/2)]]

with theta in [0, pi] and b1, b2 in [-pi, pi].  Two named strategies matter
throughout: STRATEGY_I = M(pi/2, pi/8, -pi/8) and STRATEGY_II = M(pi/4, 0, 0).

Optically a strategy is realized as a quarter-wave / half-wave / quarter-wave
plate triple.  Jones matrices use the convention

    hwp(phi) = R(phi) diag(1, -1) R(-phi)
    qwp(phi) = R(phi) diag(1, i)  R(-phi)

with R a real rotation by the plate's fast-axis angle phi; global phases are
dropped throughout, and plate angles are pi-periodic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .defaults import ALGEBRA_TOL, OPT_TOL
from .qcore import is_unitary

__all__ = [
    "StrategyParams",
    "strategy_unitary",
    "STRATEGY_I",
    "STRATEGY_II",
    "qwp",
    "hwp",
    "WaveplateTriple",
    "compose_waveplates",
    "solve_waveplate_angles",
    "phase_distance",
    "BENCH_TRIPLES",
    "bench_triple_report",
]


@dataclass(frozen=True)
class StrategyParams:
    """Strategy angles (theta, beta1, beta2)."""

    theta: float
    beta1: float
    beta2: float

    def __post_init__(self):
        eps = ALGEBRA_TOL
        if not -eps <= self.theta <= np.pi + eps:
            raise ValueError(f"theta must be in [0, pi], got {self.theta}")
        for name, b in (("beta1", self.beta1), ("beta2", self.beta2)):
            if not -np.pi - eps <= b <= np.pi + eps:
                raise ValueError(f"{name} must be in [-pi, pi], got {b}")

    @classmethod
    def symmetric(cls, theta: float, beta: float) -> "StrategyParams":
        """The phase-balanced slice beta1 = -beta2 = beta."""
        return cls(theta, beta, -beta)


def strategy_unitary(params: StrategyParams) -> np.ndarray:
    c = np.cos(params.theta / 2.0)
    s = np.sin(params.theta / 2.0)
    e1 = np.exp(1j * params.beta1)
    e2 = np.exp(1j * params.beta2)
    return np.array([[e1 * c, 1j * e2 * s], [1j * s / e2, c / e1]])


STRATEGY_I = StrategyParams(np.pi / 2, np.pi / 8, -np.pi / 8)
STRATEGY_II = StrategyParams(np.pi / 4, 0.0, 0.0)


def _rot(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def hwp(phi: float) -> np.ndarray:
    """Half-wave plate with fast axis at phi."""
    r = _rot(phi)
    return r @ np.diag([1.0, -1.0]).astype(complex) @ r.T


def qwp(phi: float) -> np.ndarray:
    """Quarter-wave plate with fast axis at phi."""
    r = _rot(phi)
    return r @ np.diag([1.0, 1.0j]) @ r.T


def _fold_plate_angle(angle: float) -> float:
    """Map a plate angle into (-pi/2, pi/2] (Jones matrices are pi-periodic)."""
    folded = (float(angle) + np.pi / 2) % np.pi - np.pi / 2
    if folded <= -np.pi / 2 + 1e-15:
        folded = np.pi / 2
    return folded


@dataclass(frozen=True)
class WaveplateTriple:
    """QWP-HWP-QWP settings; light passes qwp1 first."""

    qwp1: float
    hwp: float
    qwp2: float

    def __post_init__(self):
        for name in ("qwp1", "hwp", "qwp2"):
            object.__setattr__(self, name, _fold_plate_angle(getattr(self, name)))


def compose_waveplates(triple: WaveplateTriple) -> np.ndarray:
    """Jones matrix of the triple (first plate applied first)."""
    return qwp(triple.qwp2) @ hwp(triple.hwp) @ qwp(triple.qwp1)


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - |tr(u^dag v)|/2; zero iff the 2x2 unitaries agree up to phase.

    Clamped at zero so floating-point noise never yields a negative distance.
    """
    return max(0.0, float(1.0 - abs(np.trace(np.asarray(u).conj().T @ np.asarray(v))) / 2.0))


def _aligned_difference(u: np.ndarray, v: np.ndarray) -> float:
    """Max entrywise |u - e^{i phi} v| with the best global phase."""
    tr = np.trace(np.asarray(u).conj().T @ np.asarray(v))
    phase = tr / abs(tr) if abs(tr) > 1e-15 else 1.0
    return float(np.max(np.abs(u - v / phase)))


def solve_waveplate_angles(u: np.ndarray, tol: float = OPT_TOL) -> WaveplateTriple:
    """Plate triple reproducing the unitary u up to global phase.

    Coarse grid over the three plate angles, then least-squares polish of the
    phase-aligned entries.  Raises ValueError for non-unitary input and
    RuntimeError if no triple reaches the requested tolerance.
    """
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError("waveplate solve requires a 2x2 unitary")

    def residuals(angles):
        m = compose_waveplates(WaveplateTriple(*angles))
        tr = np.trace(u.conj().T @ m)
        phase = tr / abs(tr) if abs(tr) > 1e-15 else 1.0
        d = (m / phase - u).ravel()
        return np.concatenate([d.real, d.imag])

    grid = np.linspace(-np.pi / 2, np.pi / 2, 13)[:-1]
    coarse = [
        (phase_distance(u, compose_waveplates(WaveplateTriple(a, b, c))), (a, b, c))
        for a in grid
        for b in grid
        for c in grid
    ]
    coarse.sort(key=lambda t: t[0])
    for _, start in coarse[:8]:
        fit = optimize.least_squares(residuals, start, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        triple = WaveplateTriple(*fit.x)
        if _aligned_difference(u, compose_waveplates(triple)) <= tol:
            return triple
    raise RuntimeError("waveplate angle solve did not converge")


# Plate settings used on the optical bench for the two named strategies.
BENCH_TRIPLES = {
    "I": WaveplateTriple(-np.pi / 8, 5 * np.pi / 16, 0.0),
    "II": WaveplateTriple(np.pi / 2, np.pi / 16, np.pi / 2),
}


def bench_triple_report(tol: float = 1e-9) -> list[dict]:
    """Check the bench plate settings against the strategy matrices.

    Returns one row per named strategy with the bench triple, whether its
    Jones matrix matches the strategy unitary up to global phase under this
    module's plate convention, and the residual phase distance.
    """
    targets = {"I": strategy_unitary(STRATEGY_I), "II": strategy_unitary(STRATEGY_II)}
    rows = []
    for name, triple in BENCH_TRIPLES.items():
        m = compose_waveplates(triple)
        d = phase_distance(targets[name], m)
        rows.append(
            {
                "strategy": name,
                "triple": triple,
                "matches": d <= tol,
                "phase_distance": d,
            }
        )
    return rows

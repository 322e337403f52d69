"""Bipartite Gaussian entanglement from covariance matrices.

A two-mode reduction of the steady-state covariance carries everything needed
for the logarithmic negativity: with the 4x4 block written as

    V0 = [[V1, V12], [V12^T, V2]],

the smaller symplectic eigenvalue of the partially transposed state is

    nu = 2^{-1/2} sqrt(Sigma - sqrt(Sigma^2 - 4 det V0)),
    Sigma = det V1 + det V2 - 2 det V12,

and E_N = max(0, -ln 2 nu) in the vacuum-is-one-half convention. An
eigenvalue-based evaluation of the same quantity (partial transpose, then the
spectrum of i Omega V) is exposed alongside as an independent cross-check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .steadystate import CovarianceMatrix, symplectic_form

#: Tolerance scale for the radicand and inner-argument clamps: tiny negative
#: values are roundoff and clamp to zero, anything worse is an error.
_CLAMP_TOL = 1e-12


class Mode(enum.Enum):
    """The five modes, with their rows in the 10x10 covariance."""

    ATOM = "a"
    CAVITY1 = "c1"
    CAVITY2 = "c2"
    PHONON = "b"
    MAGNON = "m"

    @property
    def rows(self) -> tuple[int, int]:
        return _MODE_ROWS[self]


_MODE_ROWS = {
    Mode.ATOM: (0, 1),
    Mode.CAVITY1: (2, 3),
    Mode.CAVITY2: (4, 5),
    Mode.PHONON: (6, 7),
    Mode.MAGNON: (8, 9),
}

#: Abbreviations sorted longest first so "c2b" tokenizes as ("c2", "b").
_ABBREV_ORDER = ("c1", "c2", "a", "b", "m")
_ABBREV_TO_MODE = {mode.value: mode for mode in Mode}


def parse_pair(label: str) -> tuple[Mode, Mode]:
    """Parse a pair label like "am" or "c2b" into two distinct modes."""
    if not isinstance(label, str) or not label:
        raise DomainError(f"pair label must be a non-empty string, got {label!r}")
    modes: list[Mode] = []
    rest = label
    while rest:
        for abbrev in _ABBREV_ORDER:
            if rest.startswith(abbrev):
                modes.append(_ABBREV_TO_MODE[abbrev])
                rest = rest[len(abbrev):]
                break
        else:
            raise DomainError(f"cannot parse pair label {label!r}")
    if len(modes) != 2:
        raise DomainError(f"pair label {label!r} must name exactly two modes")
    if modes[0] is modes[1]:
        raise DomainError(f"pair label {label!r} names the same mode twice")
    return modes[0], modes[1]


def pair_label(pair: tuple[Mode, Mode]) -> str:
    return pair[0].value + pair[1].value


def two_mode_block(
    v: CovarianceMatrix | np.ndarray, mode1: Mode, mode2: Mode
) -> np.ndarray:
    """Extract the 4x4 covariance block of two distinct modes."""
    if mode1 is mode2:
        raise DomainError("two_mode_block needs two distinct modes")
    arr = v.v if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
    if arr.shape != (10, 10):
        raise DomainError("expected the full 10x10 covariance")
    rows = mode1.rows + mode2.rows
    return arr[np.ix_(rows, rows)].copy()


def _check_two_mode(v0: np.ndarray) -> np.ndarray:
    arr = np.asarray(v0, dtype=float)
    if arr.shape != (4, 4):
        raise DomainError("expected a 4x4 two-mode covariance")
    scale = max(1.0, float(np.max(np.abs(arr))))
    if float(np.max(np.abs(arr - arr.T))) > 1e-10 * scale:
        raise DomainError("two-mode covariance must be symmetric")
    return arr


def _det2(b: np.ndarray) -> float:
    return float(b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0])


def symplectic_nu_minus(v0: np.ndarray) -> float:
    """Smaller symplectic eigenvalue of the partially transposed state.

    Evaluated through the determinant closed form. The radicand and the inner
    argument are clamped at zero when they dip below it by roundoff; dips
    beyond 1e-12 (relative to the natural square scale of the matrix) mean
    the input was not a physical covariance and raise instead.
    """
    arr = _check_two_mode(v0)
    det_v1 = _det2(arr[0:2, 0:2])
    det_v2 = _det2(arr[2:4, 2:4])
    det_v12 = _det2(arr[0:2, 2:4])
    det_v0 = float(np.linalg.det(arr))
    sigma = det_v1 + det_v2 - 2.0 * det_v12

    radicand = sigma * sigma - 4.0 * det_v0
    rad_floor = _CLAMP_TOL * max(1.0, sigma * sigma)
    if radicand < -rad_floor:
        raise NumericalError(
            f"negative radicand {radicand:.3e} in the symplectic eigenvalue; "
            "input is not a physical covariance"
        )
    inner = 0.5 * (sigma - math.sqrt(max(radicand, 0.0)))
    inner_floor = _CLAMP_TOL * max(1.0, abs(sigma))
    if inner < -inner_floor:
        raise NumericalError(
            f"negative argument {inner:.3e} under the square root; "
            "input is not a physical covariance"
        )
    nu = math.sqrt(max(inner, 0.0))
    if nu <= 0.0:
        raise NumericalError("vanishing symplectic eigenvalue; state is singular")
    return nu


def nu_minus_via_partial_transpose(v0: np.ndarray) -> float:
    """Same quantity via the spectrum of i Omega V-tilde; independent path.

    Partial transposition flips the momentum of the second mode,
    V-tilde = P V0 P with P = diag(1, 1, 1, -1); the symplectic spectrum is
    |eig(i Omega V-tilde)|.
    """
    arr = _check_two_mode(v0)
    p = np.diag([1.0, 1.0, 1.0, -1.0])
    v_tilde = p @ arr @ p
    omega = symplectic_form(2)
    try:
        eigs = np.linalg.eigvals(1j * omega @ v_tilde)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolve failed: {exc}") from exc
    return float(np.min(np.abs(eigs)))


def log_negativity(
    v: CovarianceMatrix | np.ndarray, pair: tuple[Mode, Mode] | None = None
) -> float:
    """Logarithmic negativity E_N = max(0, -ln 2 nu) of a bipartition.

    Accepts either a 4x4 two-mode covariance directly, or the full 10x10
    covariance together with the pair of modes to reduce to.
    """
    if pair is not None:
        block = two_mode_block(v, pair[0], pair[1])
    else:
        block = v.v if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
        if block.shape == (10, 10):
            raise DomainError("a 10x10 covariance needs an explicit mode pair")
    nu = symplectic_nu_minus(block)
    return max(0.0, -math.log(2.0 * nu))


@dataclass(frozen=True)
class EntanglementReport:
    """One bipartition's measures; None when the point could not be evaluated."""

    pair: tuple[Mode, Mode]
    nu_minus: float | None
    e_n: float | None


def random_two_mode_covariance(rng: np.random.Generator) -> np.ndarray:
    """Draw a random physical two-mode covariance matrix.

    Built as S N S^T with N a thermal diagonal (symplectic eigenvalues in
    [0.5, 5]) and S a random symplectic composed of local squeezes, a
    two-mode squeeze, and local rotations. Covers separable and entangled,
    pure and mixed states.
    """
    nu1, nu2 = rng.uniform(0.5, 5.0, size=2)
    thermal = np.diag([nu1, nu1, nu2, nu2])

    s1, s2 = rng.uniform(-1.0, 1.0, size=2)
    local_squeeze = np.diag([math.exp(s1), math.exp(-s1), math.exp(s2), math.exp(-s2)])

    r = rng.uniform(0.0, 1.5)
    ch, sh = math.cosh(r), math.sinh(r)
    tms = np.array(
        [
            [ch, 0.0, sh, 0.0],
            [0.0, ch, 0.0, -sh],
            [sh, 0.0, ch, 0.0],
            [0.0, -sh, 0.0, ch],
        ]
    )

    def rotation(phi: float) -> np.ndarray:
        c, s = math.cos(phi), math.sin(phi)
        return np.array([[c, s], [-s, c]])

    phi1, phi2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
    local_rot = np.zeros((4, 4))
    local_rot[0:2, 0:2] = rotation(phi1)
    local_rot[2:4, 2:4] = rotation(phi2)

    s_total = local_rot @ tms @ local_squeeze
    v = s_total @ thermal @ s_total.T
    return 0.5 * (v + v.T)


def transformation_efficiency(e_ab: float, e_am: float) -> float | None:
    """Ratio E_am / E_ab of magnon-side to phonon-side atomic entanglement.

    Returns None (the designated undefined marker) when the denominator
    vanishes; never raises a division error. Negative inputs are outside the
    domain since log-negativities are non-negative by construction.
    """
    if e_ab < 0.0 or e_am < 0.0:
        raise DomainError("log-negativities are non-negative")
    if e_ab == 0.0:
        return None
    return e_am / e_ab


__all__ = [
    "EntanglementReport",
    "Mode",
    "log_negativity",
    "nu_minus_via_partial_transpose",
    "pair_label",
    "parse_pair",
    "random_two_mode_covariance",
    "symplectic_nu_minus",
    "transformation_efficiency",
    "two_mode_block",
]

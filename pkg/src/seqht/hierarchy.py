"""Analytic upper bounds on sequency coefficients of polynomial diagonals.

For a digitized monomial x^p, the coefficient of the sequency-``nu`` basis
operator is controlled by the position of the last sign change of that
operator before the grid edge.  The resulting bound decreases octave by
octave in ``nu``, which is what justifies truncating at a cutoff sequency.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import walsh
from .field import FieldGrid, phi_power_operator
from .walsh import DomainError

__all__ = [
    "BoundProfile",
    "last_crossing",
    "crossing_count_prefix",
    "monomial_bound",
    "normalized_coefficient",
    "series_bound",
    "build_bound_profile",
    "bound_profile_to_csv",
]


def _octave(nu: int) -> int:
    return nu.bit_length() - 1


def last_crossing(nu: int, x_max: float) -> float:
    """Position of the final sign change of the sequency-``nu`` pattern.

    On [-x_max, x_max] the last level crossing sits at
    x_max * (1 - 2^-floor(log2 nu)); every operator in the same octave
    shares it.
    """
    if nu < 1:
        raise DomainError("sequency 0 has no crossing")
    return x_max * (1.0 - 2.0 ** (-_octave(nu)))


def crossing_count_prefix(nu: int, n_qubits: int) -> int:
    """Number of identical leading entries of the sequency-``nu`` row.

    Counts entries, reading left to right, before the first sign change or
    the midpoint; halves with every octave: 2^(n_qubits - 1 - floor(log2 nu)).
    """
    if not 1 <= nu < 2**n_qubits:
        raise DomainError(f"sequency {nu} out of range for {n_qubits} qubits")
    return 2 ** (n_qubits - 1 - _octave(nu))


def monomial_bound(p: int, nu: int) -> float:
    """Upper bound on the normalized sequency coefficient of x^p.

    Nonzero only when ``nu`` and ``p`` share parity; equal to
    1 - (1 - 2^-floor(log2 nu))^(p+1) for nu > 0 and to 1 at nu = 0 (even p).
    """
    if nu == 0:
        return 1.0 if p % 2 == 0 else 0.0
    if nu % 2 != p % 2:
        return 0.0
    return 1.0 - (1.0 - 2.0 ** (-_octave(nu))) ** (p + 1)


def normalized_coefficient(p: int, nu: int, x_max: float, n_qubits: int) -> float:
    """Sequency coefficient of the digitized x^p, scaled to a unit constant term.

    The scale is the grid average of |x|^p (equal to the nu = 0 coefficient
    for even p), so the nu = 0 entry is exactly 1.  The continuum analogue of
    the scale is x_max^p / (p + 1); at finite n_qubits the two differ at the
    percent level and the published comparison tables use the grid value.
    Opposite-parity coefficients vanish identically and are returned as an
    exact zero rather than float round-off.
    """
    if nu % 2 != p % 2:
        return 0.0
    grid = FieldGrid(n_qubits, x_max)
    spec = walsh.decompose(phi_power_operator(grid, p))
    scale = float(np.mean(np.abs(grid.values()) ** p))
    return spec[nu] / scale


def series_bound(terms: list[tuple[int, float]], nu: int, x_max: float) -> float:
    """Un-normalized coefficient bound for F(x) = sum_p a_p x^p.

    Each monomial contributes |a_p| times its bound divided by the
    normalization (p + 1) / (2 x_max^(p+1)).
    """
    total = 0.0
    for p, a_p in terms:
        norm = (p + 1) / (2.0 * x_max ** (p + 1))
        total += abs(a_p) * monomial_bound(p, nu) / norm
    return total


@dataclass(frozen=True)
class BoundProfile:
    """Normalized coefficients and their bounds for one monomial order."""

    p: int
    x_max: float
    n_qubits: int
    entries: dict[int, tuple[float, float]]  # nu -> (coefficient, bound)


def build_bound_profile(p: int, x_max: float, n_qubits: int) -> BoundProfile:
    """Profile over every sequency sharing the parity of ``p``."""
    grid = FieldGrid(n_qubits, x_max)
    spec = walsh.decompose(phi_power_operator(grid, p))
    scale = float(np.mean(np.abs(grid.values()) ** p))
    entries: dict[int, tuple[float, float]] = {}
    for nu in range(p % 2, 2**n_qubits, 2):
        entries[nu] = (spec[nu] / scale, monomial_bound(p, nu))
    return BoundProfile(p, x_max, n_qubits, entries)


def bound_profile_to_csv(profile: BoundProfile) -> str:
    buf = io.StringIO()
    buf.write(
        f"# p={profile.p} x_max={profile.x_max!r} n_qubits={profile.n_qubits}"
        " normalization=grid-average\n"
    )
    buf.write("nu,coeff,bound\n")
    for nu in sorted(profile.entries):
        coeff, bound = profile.entries[nu]
        buf.write(f"{nu},{coeff:.4f},{bound:.4f}\n")
    return buf.getvalue()

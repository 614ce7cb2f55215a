"""Sequency-ordered Walsh basis for diagonal operators and digital states.

A diagonal operator on ``n_q`` qubits decomposes into tensor products of I and
Pauli-Z whose diagonals are the rows of the sequency-ordered Walsh-Hadamard
matrix.  Each basis operator is labelled by its sequency ``nu`` (the number of
sign changes along its diagonal); the Z placements are the bit-reversed Gray
code of ``nu``.  Qubit 1 is the most significant bit of the computational
index throughout this package.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "DegenerateTruncationError",
    "SequencyOp",
    "WalshSpectrum",
    "gray_encode",
    "gray_decode",
    "sequency_to_zmask",
    "zmask_to_sequency",
    "walsh_row",
    "decompose",
    "truncate",
    "reconstruct",
    "decompose_state",
    "reconstruct_state",
    "spectrum_to_csv",
    "spectrum_to_json",
]

ZERO_TOL = 1e-12


class DomainError(ValueError):
    """Input outside an operation's documented domain."""


class DegenerateTruncationError(ValueError):
    """Truncation removed every nonzero coefficient of a state."""


def _reverse_bits(value: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def gray_encode(n: int) -> int:
    return n ^ (n >> 1)


def gray_decode(g: int) -> int:
    n = 0
    while g:
        n ^= g
        g >>= 1
    return n


def sequency_to_zmask(nu: int, n_qubits: int) -> int:
    """Z-placement bitmask of the sequency-``nu`` basis operator.

    Bit ``n_qubits - q`` of the mask is set iff Pauli-Z acts on qubit ``q``
    (qubit 1 = most significant).  The mask is the bit-reversal of the Gray
    code of ``nu`` over ``n_qubits`` bits.
    """
    if n_qubits < 1:
        raise DomainError(f"n_qubits must be positive, got {n_qubits}")
    if not 0 <= nu < 2**n_qubits:
        raise DomainError(f"sequency {nu} out of range for {n_qubits} qubits")
    return _reverse_bits(gray_encode(nu), n_qubits)


def zmask_to_sequency(z_mask: int, n_qubits: int) -> int:
    """Inverse of :func:`sequency_to_zmask`."""
    if not 0 <= z_mask < 2**n_qubits:
        raise DomainError(f"z_mask {z_mask:#x} out of range for {n_qubits} qubits")
    return gray_decode(_reverse_bits(z_mask, n_qubits))


@dataclass(frozen=True)
class SequencyOp:
    """A single Walsh basis operator: sequency index plus Z-placement mask."""

    nu: int
    n_qubits: int
    z_mask: int

    def __post_init__(self) -> None:
        expected = sequency_to_zmask(self.nu, self.n_qubits)
        if self.z_mask != expected:
            raise DomainError(
                f"z_mask {self.z_mask:#x} inconsistent with sequency {self.nu}"
            )

    @classmethod
    def from_sequency(cls, nu: int, n_qubits: int) -> SequencyOp:
        return cls(nu, n_qubits, sequency_to_zmask(nu, n_qubits))

    @property
    def qubits(self) -> tuple[int, ...]:
        """1-based qubits carrying a Z, most significant first."""
        return tuple(
            q for q in range(1, self.n_qubits + 1)
            if self.z_mask >> (self.n_qubits - q) & 1
        )

    @property
    def weight(self) -> int:
        """Number of Z factors (the body count of the operator)."""
        return int(self.z_mask).bit_count()

    def label(self) -> str:
        if not self.z_mask:
            return "I"
        return "".join(f"Z{q}" for q in self.qubits)


def walsh_row(nu: int, n_qubits: int) -> np.ndarray:
    """Diagonal of the sequency-``nu`` basis operator as a +/-1 vector.

    Entry ``j`` is the product over Z-carrying qubits of the sign of qubit
    ``q`` in computational state ``j``; the row has exactly ``nu`` sign
    changes.  Computed from the Z mask without materializing the full
    Walsh-Hadamard matrix.
    """
    mask = sequency_to_zmask(nu, n_qubits)
    j = np.arange(2**n_qubits, dtype=np.uint64)
    parity = np.bitwise_count(j & np.uint64(mask)) & 1
    return 1.0 - 2.0 * parity.astype(np.float64)


def _fwht(vec: np.ndarray) -> np.ndarray:
    """In-place-style fast transform: out[m] = sum_j vec[j] * (-1)^popcount(m & j)."""
    out = np.array(vec, copy=True)
    n = out.size
    h = 1
    while h < n:
        out = out.reshape(n // (2 * h), 2, h)
        top = out[:, 0, :].copy()
        out[:, 0, :] = top + out[:, 1, :]
        out[:, 1, :] = top - out[:, 1, :]
        out = out.reshape(n)
        h *= 2
    return out


def _check_power_of_two(length: int) -> int:
    n_qubits = (length - 1).bit_length()
    if length < 2 or 2**n_qubits != length:
        raise DomainError(f"length {length} is not a power of two")
    return n_qubits


@dataclass(frozen=True)
class WalshSpectrum:
    """Map from sequency index to real coefficient for a diagonal or a state."""

    n_qubits: int
    coefficients: dict[int, float]

    def __getitem__(self, nu: int) -> float:
        return self.coefficients.get(nu, 0.0)

    def support(self, rel_tol: float = ZERO_TOL) -> list[int]:
        """Sequencies whose coefficient is nonzero relative to the largest one."""
        if not self.coefficients:
            return []
        scale = max(abs(c) for c in self.coefficients.values())
        if scale == 0.0:
            return []
        return sorted(
            nu for nu, c in self.coefficients.items() if abs(c) > rel_tol * scale
        )


def decompose(diag: np.ndarray) -> WalshSpectrum:
    """Sequency coefficients of a real diagonal: beta_nu = Tr(diag O_nu) / 2^n."""
    diag = np.asarray(diag, dtype=np.float64)
    n_qubits = _check_power_of_two(diag.size)
    natural = _fwht(diag) / diag.size
    coeffs = {
        nu: float(natural[sequency_to_zmask(nu, n_qubits)])
        for nu in range(diag.size)
    }
    return WalshSpectrum(n_qubits, coeffs)


def truncate(
    spec: WalshSpectrum, nu_cut: int, drop_identity: bool = False
) -> WalshSpectrum:
    """Remove coefficients with sequency above ``nu_cut`` (and nu=0 if asked)."""
    kept = {
        nu: c
        for nu, c in spec.coefficients.items()
        if nu <= nu_cut and not (drop_identity and nu == 0)
    }
    return WalshSpectrum(spec.n_qubits, kept)


def reconstruct(spec: WalshSpectrum) -> np.ndarray:
    """Diagonal represented by a spectrum: sum_nu beta_nu * walsh_row(nu)."""
    scattered = np.zeros(2**spec.n_qubits)
    for nu, c in spec.coefficients.items():
        scattered[sequency_to_zmask(nu, spec.n_qubits)] = c
    return _fwht(scattered)


def decompose_state(state: np.ndarray) -> WalshSpectrum:
    """Sequency coefficients of a digital wavefunction (real amplitudes)."""
    state = np.asarray(state)
    if np.iscomplexobj(state):
        if np.max(np.abs(state.imag)) > 1e-9:
            raise DomainError("state decomposition requires real amplitudes")
        state = state.real
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-8:
        raise DomainError(f"state is not normalized (norm {norm})")
    return decompose(state)


def reconstruct_state(spec: WalshSpectrum) -> np.ndarray:
    """State represented by a spectrum, renormalized to unit norm."""
    state = reconstruct(spec)
    norm = np.linalg.norm(state)
    if norm < ZERO_TOL:
        raise DegenerateTruncationError(
            "every surviving sequency coefficient is zero"
        )
    return state / norm


def spectrum_to_csv(spec: WalshSpectrum, stream: io.TextIOBase | None = None) -> str:
    """Serialize as CSV rows (nu, zmask_hex, coefficient); returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["nu", "zmask_hex", "coefficient"])
    for nu in sorted(spec.coefficients):
        mask = sequency_to_zmask(nu, spec.n_qubits)
        writer.writerow([nu, f"{mask:#x}", repr(spec.coefficients[nu])])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def spectrum_to_json(spec: WalshSpectrum) -> str:
    payload = {
        "n_qubits": spec.n_qubits,
        "coefficients": {str(nu): c for nu, c in sorted(spec.coefficients.items())},
    }
    return json.dumps(payload, sort_keys=True)

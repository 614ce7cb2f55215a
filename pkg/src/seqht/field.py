"""Symmetric digitization of a single-site scalar field.

The field operator is mapped to ``2^n_q`` uniformly spaced eigenvalues on
``[-phi_max, phi_max]``; the conjugate momentum is realized through a centered
discrete Fourier kernel (the symmetric-QFT construction), which keeps both
operators symmetric under reflection of the register.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse.linalg as spla
from numpy.polynomial.hermite import hermval
from scipy.special import gammaln

from . import walsh

__all__ = [
    "FieldGrid",
    "MomentumGrid",
    "HamiltonianSpec",
    "ConvergenceError",
    "phi_power_operator",
    "pi_squared_operator",
    "centered_fourier_kernel",
    "build_hamiltonian",
    "ground_state",
    "free_ground_state",
    "target_ground_state",
    "analytic_ho_state",
    "optimal_phi_max",
    "hamiltonian_to_csv",
    "state_to_csv",
]


class ConvergenceError(RuntimeError):
    """Iterative eigensolver failed to reach the requested residual."""


@dataclass(frozen=True)
class FieldGrid:
    """Digitization parameters: qubit count and field cutoff."""

    n_qubits: int
    phi_max: float

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        if self.phi_max <= 0:
            raise ValueError(f"phi_max must be positive, got {self.phi_max}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def delta_phi(self) -> float:
        return 2.0 * self.phi_max / (self.dim - 1)

    def values(self) -> np.ndarray:
        """Field eigenvalues phi_j = -phi_max + j * delta_phi."""
        return -self.phi_max + self.delta_phi * np.arange(self.dim)


@dataclass(frozen=True)
class MomentumGrid:
    """Conjugate-momentum eigenvalues for a given field grid."""

    n_qubits: int
    phi_max: float

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def delta_pi(self) -> float:
        return np.pi * (self.dim - 1) / (self.dim * self.phi_max)

    def values(self) -> np.ndarray:
        center = (self.dim - 1) / 2.0
        return self.delta_pi * (np.arange(self.dim) - center)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Coupling, mass, and optional sequency cutoffs for the two potentials."""

    lam: float = 10.0
    mass: float = 1.0
    nu_cut_phi4: int | None = None
    nu_cut_phi2: int | None = None

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError("coupling must be non-negative")
        for name in ("nu_cut_phi4", "nu_cut_phi2"):
            cut = getattr(self, name)
            if cut is not None and (cut < 0 or cut % 2):
                raise ValueError(f"{name} must be an even non-negative integer")


def phi_power_operator(grid: FieldGrid, p: int) -> np.ndarray:
    """Diagonal of the digitized field operator raised to power ``p``."""
    if p < 1:
        raise ValueError(f"power must be >= 1, got {p}")
    return grid.values() ** p


def centered_fourier_kernel(n_qubits: int) -> np.ndarray:
    """Unitary W with W[k, j] = exp(2 pi i (j - c)(k - c) / 2^n) / 2^(n/2).

    The half-integer shift c = (2^n - 1)/2 centers both grids on zero and is
    what the phase-gate layers around an ordinary QFT produce.
    """
    dim = 2**n_qubits
    c = (dim - 1) / 2.0
    idx = np.arange(dim) - c
    return np.exp(2j * np.pi * np.outer(idx, idx) / dim) / np.sqrt(dim)


def pi_squared_operator(grid: FieldGrid) -> np.ndarray:
    """Squared momentum as a dense Hermitian matrix in the field basis."""
    w = centered_fourier_kernel(grid.n_qubits)
    mom = MomentumGrid(grid.n_qubits, grid.phi_max).values()
    mat = w.conj().T @ (mom[:, None] ** 2 * w)
    herm_defect = np.max(np.abs(mat - mat.conj().T))
    if herm_defect > 1e-12 * np.max(np.abs(mat)):
        raise RuntimeError(f"momentum operator lost hermiticity ({herm_defect:.2e})")
    return mat.real


def _truncated_diagonal(diag: np.ndarray, nu_cut: int | None) -> np.ndarray:
    if nu_cut is None:
        return diag
    spec = walsh.truncate(walsh.decompose(diag), nu_cut)
    return walsh.reconstruct(spec)


def potential_diagonal(grid: FieldGrid, spec: HamiltonianSpec) -> np.ndarray:
    """Diagonal part of the Hamiltonian: mass term plus quartic interaction."""
    phi2 = _truncated_diagonal(phi_power_operator(grid, 2), spec.nu_cut_phi2)
    pot = 0.5 * spec.mass**2 * phi2
    if spec.lam:
        phi4 = _truncated_diagonal(phi_power_operator(grid, 4), spec.nu_cut_phi4)
        pot = pot + spec.lam / 24.0 * phi4
    return pot


def build_hamiltonian(grid: FieldGrid, spec: HamiltonianSpec) -> np.ndarray:
    """Dense H = Pi^2/2 + m^2 phi^2/2 + (lam/4!) phi^4 with optional cutoffs."""
    ham = 0.5 * pi_squared_operator(grid) + np.diag(potential_diagonal(grid, spec))
    return ham


class FieldHamiltonianOperator(spla.LinearOperator):
    """Matrix-free Hamiltonian applying the momentum term through FFTs."""

    def __init__(self, grid: FieldGrid, spec: HamiltonianSpec):
        dim = grid.dim
        super().__init__(dtype=complex, shape=(dim, dim))
        self.potential = potential_diagonal(grid, spec)
        self.mom_sq = MomentumGrid(grid.n_qubits, grid.phi_max).values() ** 2
        self.center_phase = np.exp(-1j * np.pi * (dim - 1) * np.arange(dim) / dim)
        self.spectral_bound = float(
            0.5 * self.mom_sq.max() + np.max(np.abs(self.potential))
        )

    def _matvec(self, psi: np.ndarray) -> np.ndarray:
        # W^dag diag(mom^2) W with the interior centered phases cancelling
        psi = np.asarray(psi).reshape(-1)
        a = np.fft.ifft(self.center_phase * psi, norm="ortho")
        a *= self.mom_sq
        kinetic = self.center_phase.conj() * np.fft.fft(a, norm="ortho")
        return 0.5 * kinetic + self.potential * psi

    def preconditioner(self, level: float) -> spla.LinearOperator:
        """Approximate inverse keeping only the momentum (high-energy) part."""
        kdiag = 0.5 * self.mom_sq + 1.0 + abs(level)

        def minv(v: np.ndarray) -> np.ndarray:
            v = np.asarray(v).reshape(-1)
            a = np.fft.ifft(self.center_phase * v, norm="ortho")
            a /= kdiag
            return self.center_phase.conj() * np.fft.fft(a, norm="ortho")

        return spla.LinearOperator(self.shape, matvec=minv, dtype=complex)


def hamiltonian_operator(grid: FieldGrid, spec: HamiltonianSpec) -> FieldHamiltonianOperator:
    """Matrix-free version of the Hamiltonian using FFT momentum application."""
    return FieldHamiltonianOperator(grid, spec)


def _fix_phase(state: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is positive real."""
    k = int(np.argmax(np.abs(state)))
    phase = state[k] / abs(state[k])
    state = state / phase
    if np.max(np.abs(state.imag)) < 1e-10:
        state = state.real.astype(np.float64)
    return state


def _inverse_iteration(
    ham: spla.LinearOperator, v0: np.ndarray
) -> tuple[float, np.ndarray]:
    """Shifted inverse power iteration with CG solves.

    Target residual is 1e-10 absolute, relaxed to the double-precision floor
    2 * eps * ||H|| when the spectral radius makes the absolute target
    unreachable (the 12-qubit momentum term reaches ~1e6).
    """
    bound = getattr(ham, "spectral_bound", None)
    floor = 1e-10 if bound is None else max(1e-10, 2.0 * np.finfo(float).eps * bound)
    x = v0.astype(complex) / np.linalg.norm(v0)
    energy = float(np.real(np.vdot(x, ham @ x)))
    margin = 0.5
    residual = prev = np.inf
    for _ in range(60):
        shift = energy - margin
        shifted = spla.LinearOperator(
            ham.shape, matvec=lambda v: ham @ v - shift * v, dtype=complex
        )
        precond = ham.preconditioner(energy) if hasattr(ham, "preconditioner") else None
        y, _ = spla.cg(shifted, x, rtol=1e-13, maxiter=5000, M=precond)
        x = y / np.linalg.norm(y)
        energy = float(np.real(np.vdot(x, ham @ x)))
        residual = float(np.linalg.norm(ham @ x - energy * x))
        if residual < 0.5 * floor or residual > 0.8 * prev:
            break
        prev = residual
        margin = max(0.02, min(margin, 10.0 * residual))
    if residual > floor:
        raise ConvergenceError(
            f"eigensolver residual {residual:.3e} exceeds target {floor:.3e}"
        )
    return energy, x


def ground_state(
    ham: np.ndarray | spla.LinearOperator, v0: np.ndarray | None = None
) -> tuple[float, np.ndarray]:
    """Lowest eigenpair; dense for dim <= 256, iterative above.

    The returned state is normalized with its largest amplitude positive real.
    ``v0`` seeds the iterative path (ignored by the dense one).
    """
    dim = ham.shape[0]
    if isinstance(ham, np.ndarray) and dim <= 256:
        energies, vecs = np.linalg.eigh(ham)
        energy, state = float(energies[0]), vecs[:, 0]
    else:
        if isinstance(ham, np.ndarray):
            ham = spla.aslinearoperator(ham)
        if v0 is None:
            rng = np.random.default_rng(0)
            v0 = rng.normal(size=dim)
        energy, state = _inverse_iteration(ham, v0)
    state = state / np.linalg.norm(state)
    return energy, _fix_phase(state)


@lru_cache(maxsize=32)
def _free_ground_cached(n_qubits: int, phi_max: float) -> tuple[float, np.ndarray]:
    grid = FieldGrid(n_qubits, phi_max)
    spec = HamiltonianSpec(lam=0.0)
    if n_qubits <= 8:
        energy, state = ground_state(build_hamiltonian(grid, spec))
    else:
        seed = analytic_ho_state(0, grid)
        energy, state = ground_state(hamiltonian_operator(grid, spec), v0=seed)
    state.setflags(write=False)
    return energy, state


def free_ground_state(grid: FieldGrid) -> np.ndarray:
    """Ground state of the non-interacting (lam = 0) digitized Hamiltonian."""
    return _free_ground_cached(grid.n_qubits, grid.phi_max)[1].copy()


@lru_cache(maxsize=64)
def _target_ground_cached(
    n_qubits: int, phi_max: float, lam: float, cut4: int | None, cut2: int | None
) -> np.ndarray:
    grid = FieldGrid(n_qubits, phi_max)
    spec = HamiltonianSpec(lam=lam, nu_cut_phi4=cut4, nu_cut_phi2=cut2)
    if n_qubits <= 8:
        state = ground_state(build_hamiltonian(grid, spec))[1]
    else:
        seed = free_ground_state(grid)
        state = ground_state(hamiltonian_operator(grid, spec), v0=seed)[1]
    state.setflags(write=False)
    return state


def target_ground_state(
    grid: FieldGrid,
    lam: float,
    nu_cut_phi4: int | None = None,
    nu_cut_phi2: int | None = None,
) -> np.ndarray:
    """Exact ground state of the (optionally truncated) interacting Hamiltonian."""
    return _target_ground_cached(
        grid.n_qubits, grid.phi_max, lam, nu_cut_phi4, nu_cut_phi2
    ).copy()


def analytic_ho_state(n: int, grid: FieldGrid) -> np.ndarray:
    """Continuum oscillator eigenstate sampled on the grid and renormalized."""
    if n < 0:
        raise ValueError("level index must be non-negative")
    phi = grid.values()
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    # log-scaled evaluation keeps the n! normalization finite for larger n
    log_norm = -0.5 * (0.5 * np.log(np.pi) + n * np.log(2.0) + gammaln(n + 1))
    psi = np.exp(log_norm - phi**2 / 2.0) * hermval(phi, coeffs)
    return psi / np.linalg.norm(psi)


def optimal_phi_max(n_qubits: int) -> float:
    """Field cutoff balancing digitization and truncation error for the QHO."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be positive")
    dim = 2**n_qubits
    return dim / 2.0 * np.sqrt(np.sqrt(8.0) * np.pi / dim)


def _grid_header(grid: FieldGrid) -> str:
    return f"# n_qubits={grid.n_qubits} phi_max={grid.phi_max!r}\n"


def hamiltonian_to_csv(ham: np.ndarray, grid: FieldGrid) -> str:
    buf = io.StringIO()
    buf.write(_grid_header(grid))
    buf.write("row,col,value\n")
    for i in range(ham.shape[0]):
        for j in range(ham.shape[1]):
            if ham[i, j] != 0.0:
                buf.write(f"{i},{j},{ham[i, j]!r}\n")
    return buf.getvalue()


def state_to_csv(state: np.ndarray, grid: FieldGrid) -> str:
    buf = io.StringIO()
    buf.write(_grid_header(grid))
    buf.write("index,real,imag\n")
    state = np.asarray(state, dtype=complex)
    for j, amp in enumerate(state):
        buf.write(f"{j},{amp.real!r},{amp.imag!r}\n")
    return buf.getvalue()

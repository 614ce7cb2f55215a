"""Gate-level circuit synthesis and two-qubit resource accounting.

Blocks provided: CNOT-ladder rotations for single sequency operators, the
overlaid nearest-neighbor R_ZZ block covering many pairs at once, symmetric
state preparation with a reflection, and the phase-gate/QFT sandwich that
moves the momentum phases into the field basis.  Qubits are 1-based with
qubit 1 the most significant; single-qubit gates are free in the depth
metric, matching the published two-qubit accounting.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import walsh
from .field import FieldGrid, MomentumGrid, phi_power_operator
from .walsh import DomainError

__all__ = [
    "Gate",
    "CircuitIR",
    "ResourceReport",
    "SerializationError",
    "cx",
    "rz",
    "ry",
    "h",
    "phase",
    "dagger",
    "cancel_cnots",
    "circuit_unitary",
    "apply_circuit",
    "synth_sequency_rotation",
    "synth_phi2_block",
    "state_prep_angles",
    "half_state_angles",
    "synth_state_prep",
    "synth_qft",
    "synth_symmetric_qft",
    "synth_pi_evolution",
    "synth_phi_evolution",
    "assemble_asp_circuit",
    "count_resources",
    "export_qasm",
    "phi2_block_cnot_count",
    "phi2_block_depth",
    "state_prep_cnot_count",
    "qft_segment_cnot_count",
    "asp_resource_accounting",
]

_ANGLE_TOL = 1e-15


class SerializationError(ValueError):
    """Circuit contains a gate the requested format cannot express."""


@dataclass(frozen=True)
class Gate:
    """One gate: kind, 1-based qubits (control first for cx), optional angle."""

    name: str
    qubits: tuple[int, ...]
    angle: float | None = None


def cx(control: int, target: int) -> Gate:
    return Gate("cx", (control, target))


def rz(qubit: int, angle: float) -> Gate:
    return Gate("rz", (qubit,), angle)


def ry(qubit: int, angle: float) -> Gate:
    return Gate("ry", (qubit,), angle)


def h(qubit: int) -> Gate:
    return Gate("h", (qubit,))


def phase(qubit: int, angle: float) -> Gate:
    return Gate("p", (qubit,), angle)


@dataclass
class CircuitIR:
    """Ordered gate list on a fixed register with a connectivity promise."""

    n_qubits: int
    gates: list[Gate] = dc_field(default_factory=list)
    connectivity: str = "all-to-all"

    def __post_init__(self) -> None:
        if self.connectivity not in ("all-to-all", "linear"):
            raise ValueError(f"unknown connectivity {self.connectivity!r}")
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate) -> None:
        for q in gate.qubits:
            if not 1 <= q <= self.n_qubits:
                raise DomainError(f"qubit {q} outside register of {self.n_qubits}")
        if gate.angle is not None and not math.isfinite(gate.angle):
            raise DomainError("gate angle must be finite")
        if (
            self.connectivity == "linear"
            and gate.name == "cx"
            and abs(gate.qubits[0] - gate.qubits[1]) != 1
        ):
            raise DomainError(
                f"non-adjacent cx {gate.qubits} under linear connectivity"
            )

    def append(self, gate: Gate) -> None:
        self._check(gate)
        self.gates.append(gate)

    def extend(self, gates: list[Gate]) -> None:
        for g in gates:
            self.append(g)


def dagger(circ: CircuitIR) -> CircuitIR:
    """Inverse circuit: reversed order with negated angles."""
    out = CircuitIR(circ.n_qubits, [], circ.connectivity)
    for g in reversed(circ.gates):
        if g.angle is None:
            out.append(g)
        else:
            out.append(Gate(g.name, g.qubits, -g.angle))
    return out


def cancel_cnots(circ: CircuitIR) -> CircuitIR:
    """Peephole pass: cancel equal adjacent CNOT pairs, merge rz runs.

    Two identical CNOTs cancel when no gate between them touches either
    qubit; the pass runs to a fixed point and never increases the count.
    """
    gates = list(circ.gates)
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(gates):
            g = gates[i]
            acted = False
            if g.name == "cx":
                qs = set(g.qubits)
                for j in range(i + 1, len(gates)):
                    other = gates[j]
                    if other == g:
                        del gates[j]
                        del gates[i]
                        acted = True
                        break
                    if qs & set(other.qubits):
                        break
            elif g.name in ("rz", "ry", "p"):
                if abs(g.angle) < _ANGLE_TOL:
                    del gates[i]
                    acted = True
                else:
                    for j in range(i + 1, len(gates)):
                        other = gates[j]
                        if other.name == g.name and other.qubits == g.qubits:
                            gates[i] = Gate(g.name, g.qubits, g.angle + other.angle)
                            del gates[j]
                            acted = True
                            break
                        if set(g.qubits) & set(other.qubits):
                            break
            if acted:
                changed = True
            else:
                i += 1
    return CircuitIR(circ.n_qubits, gates, circ.connectivity)


def _gate_matrix(gate: Gate) -> np.ndarray:
    if gate.name == "h":
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    if gate.name == "rz":
        return np.diag([np.exp(-0.5j * gate.angle), np.exp(0.5j * gate.angle)])
    if gate.name == "ry":
        half = gate.angle / 2
        return np.array(
            [[np.cos(half), -np.sin(half)], [np.sin(half), np.cos(half)]],
            dtype=complex,
        )
    if gate.name == "p":
        return np.diag([1.0, np.exp(1j * gate.angle)])
    raise SerializationError(f"no matrix for gate {gate.name!r}")


def apply_circuit(circ: CircuitIR, state: np.ndarray) -> np.ndarray:
    """Apply the gate list to a state vector (or a batch of columns)."""
    n = circ.n_qubits
    batch = np.asarray(state, dtype=complex).reshape(2**n, -1).copy()
    full = batch.reshape((2,) * n + (batch.shape[1],))
    for g in circ.gates:
        if g.name == "cx":
            c, t = g.qubits
            sel = [slice(None)] * (n + 1)
            sel[c - 1] = 1
            s0, s1 = list(sel), list(sel)
            s0[t - 1], s1[t - 1] = 0, 1
            tmp = full[tuple(s0)].copy()
            full[tuple(s0)] = full[tuple(s1)]
            full[tuple(s1)] = tmp
        else:
            m = _gate_matrix(g)
            q = g.qubits[0]
            sel = [slice(None)] * (n + 1)
            s0, s1 = list(sel), list(sel)
            s0[q - 1], s1[q - 1] = 0, 1
            a0 = full[tuple(s0)].copy()
            a1 = full[tuple(s1)].copy()
            full[tuple(s0)] = m[0, 0] * a0 + m[0, 1] * a1
            full[tuple(s1)] = m[1, 0] * a0 + m[1, 1] * a1
    out = full.reshape(2**n, -1)
    return out[:, 0] if np.asarray(state).ndim == 1 else out


def circuit_unitary(circ: CircuitIR) -> np.ndarray:
    """Dense unitary of the circuit (for verification at small sizes)."""
    return apply_circuit(circ, np.eye(2**circ.n_qubits, dtype=complex))


# ---------------------------------------------------------------------------
# sequency rotation ladders


def _cnot_chain(control: int, target: int) -> list[Gate]:
    """Exact CNOT between non-adjacent qubits via the 4-gate relay identity."""
    if abs(control - target) == 1:
        return [cx(control, target)]
    step = 1 if target > control else -1
    mid = target - step
    inner = _cnot_chain(control, mid)
    return inner + [cx(mid, target)] + inner + [cx(mid, target)]


def synth_sequency_rotation(
    op: walsh.SequencyOp, theta: float, connectivity: str = "all-to-all"
) -> CircuitIR:
    """CNOT ladder realizing exp(-i theta/2 * Z-string) for one basis operator.

    The ladder walks from the most significant participating qubit to the
    least significant one, rotates there, and unwinds; under linear
    connectivity non-adjacent hops expand into relay chains.
    """
    qubits = op.qubits
    if not qubits:
        raise DomainError("identity operator has no circuit (pure phase)")
    circ = CircuitIR(op.n_qubits, [], connectivity)
    down: list[Gate] = []
    for a, b in zip(qubits, qubits[1:]):
        down.extend([cx(a, b)] if connectivity == "all-to-all" else _cnot_chain(a, b))
    circ.extend(down)
    circ.append(rz(qubits[-1], theta))
    circ.extend(list(reversed(down)))
    return circ


# ---------------------------------------------------------------------------
# overlaid two-body block


def synth_phi2_block(
    n_qubits: int,
    angles: dict[tuple[int, int], float],
    connectivity: str = "linear",
) -> CircuitIR:
    """Overlaid R_ZZ block: every requested pair rotation with shared ladders.

    Pairs sharing their most significant qubit ride one staircase of
    nearest-neighbor CNOTs; adjacent staircases cancel through the peephole
    pass.  For the complete pair set this costs exactly 2*C(n, 2) CNOTs at
    two-qubit depth n*(n-2)+3.
    """
    by_msb: dict[int, dict[int, float]] = {}
    for (a, b), theta in angles.items():
        if not (1 <= a < b <= n_qubits):
            raise DomainError(f"bad pair {(a, b)}")
        by_msb.setdefault(a, {})[b] = theta
    gates: list[Gate] = []
    for a in sorted(by_msb):
        partners = by_msb[a]
        m = max(partners)
        wind = [cx(j, j + 1) for j in range(m - 1, a - 1, -1)]
        wind += [cx(j, j + 1) for j in range(a + 1, m)]
        gates.extend(wind)
        for b in sorted(partners):
            gates.append(rz(b, partners[b]))
        gates.extend(reversed(wind))
    raw = CircuitIR(n_qubits, gates, connectivity)
    return cancel_cnots(raw)


# ---------------------------------------------------------------------------
# symmetric state preparation


def state_prep_angles(amplitudes: np.ndarray) -> list[np.ndarray]:
    """Multiplexed-RY angles from recursive bisection of probability mass.

    Level k holds 2^k angles, one per control prefix; each angle splits the
    remaining probability between the two halves of its block.  Requires
    non-negative amplitudes.
    """
    amps = np.asarray(amplitudes, dtype=float)
    if np.any(amps < -1e-12):
        raise DomainError("bisection angles require non-negative amplitudes")
    m = (amps.size - 1).bit_length()
    if 2**m != amps.size:
        raise DomainError("amplitude length must be a power of two")
    levels = []
    for k in range(m):
        halves = amps.reshape(2**k, 2, -1)
        lower = np.linalg.norm(halves[:, 0, :], axis=1)
        upper = np.linalg.norm(halves[:, 1, :], axis=1)
        levels.append(2.0 * np.arctan2(upper, lower))
    return levels


def half_state_angles(amplitudes: np.ndarray) -> list[np.ndarray]:
    """Angle levels for the first half of a reflection-symmetric state."""
    amps = np.asarray(amplitudes, dtype=float)
    if np.max(np.abs(amps - amps[::-1])) > 1e-10:
        raise DomainError("state is not reflection symmetric")
    half = amps[: amps.size // 2] * np.sqrt(2.0)
    return state_prep_angles(half)


def _ucry(controls: list[int], target: int, thetas: np.ndarray) -> list[Gate]:
    """Uniformly controlled RY: 2^k RY gates interleaved with 2^k CNOTs."""
    k = len(controls)
    if k == 0:
        return [ry(target, float(thetas[0]))]
    size = 2**k
    grays = np.array([walsh.gray_encode(i) for i in range(size)], dtype=np.uint64)
    c_idx = np.arange(size, dtype=np.uint64)
    signs = 1.0 - 2.0 * (np.bitwise_count(grays[:, None] & c_idx[None, :]) % 2)
    phis = signs @ np.asarray(thetas, dtype=float) / size
    gates: list[Gate] = []
    for i in range(size):
        gates.append(ry(target, float(phis[i])))
        flip = (walsh.gray_encode(i) ^ walsh.gray_encode((i + 1) % size)).bit_length() - 1
        gates.append(cx(controls[k - 1 - flip], target))
    return gates


def synth_state_prep(
    n_qubits: int,
    angles: list[np.ndarray],
    connectivity: str = "all-to-all",
) -> CircuitIR:
    """Prepare a reflection-symmetric real state: half-register cascade plus F.

    ``angles`` are the multiplexer levels for the half state on qubits
    2..n_qubits (from :func:`state_prep_angles`).  All-to-all cost is
    2^(n_qubits-1) + n_qubits - 3 CNOTs.
    """
    if len(angles) != n_qubits - 1:
        raise DomainError(f"expected {n_qubits - 1} angle levels")
    circ = CircuitIR(n_qubits, [], connectivity)
    sub = list(range(2, n_qubits + 1))
    for k, level in enumerate(angles):
        for g in _ucry(sub[:k], sub[k], np.asarray(level)):
            if (
                connectivity == "linear"
                and g.name == "cx"
                and abs(g.qubits[0] - g.qubits[1]) != 1
            ):
                circ.extend(_cnot_chain(*g.qubits))
            else:
                circ.append(g)
    circ.append(h(1))
    if connectivity == "all-to-all":
        for j in range(n_qubits, 1, -1):
            circ.append(cx(1, j))
    else:
        wind = [cx(j, j + 1) for j in range(n_qubits - 1, 0, -1)]
        wind += [cx(j, j + 1) for j in range(2, n_qubits)]
        circ.extend(wind)
    return cancel_cnots(circ)


# ---------------------------------------------------------------------------
# symmetric QFT sandwich


def _fused_cp_swap(a: int, b: int, theta: float) -> list[Gate]:
    """Controlled-phase fused with a swap in three CNOTs.

    The trailing CNOT of the controlled phase cancels against the leading
    CNOT of the swap, leaving cx(a,b) cx(b,a) cx(a,b) dressed with rz gates.
    """
    return [
        rz(a, theta / 2),
        rz(b, theta / 2),
        cx(a, b),
        rz(b, -theta / 2),
        cx(b, a),
        cx(a, b),
    ]


def _cp(a: int, b: int, theta: float) -> list[Gate]:
    """Controlled phase from two CNOTs and three rz gates (global phase free)."""
    return [
        rz(a, theta / 2),
        rz(b, theta / 2),
        cx(a, b),
        rz(b, -theta / 2),
        cx(a, b),
    ]


def synth_qft(n_qubits: int, connectivity: str = "all-to-all") -> CircuitIR:
    """Fourier transform segment.

    All-to-all: the textbook H / controlled-phase cascade with no final
    swaps, leaving the output bit-reversed (compensated by reindexing the
    diagonal between a transform and its inverse).  Linear: fused
    phase+swap staircases whose swap network restores natural ordering.
    """
    circ = CircuitIR(n_qubits, [], connectivity)
    if connectivity == "all-to-all":
        for i in range(1, n_qubits + 1):
            circ.append(h(i))
            for j in range(i + 1, n_qubits + 1):
                circ.extend(_cp(i, j, math.pi / 2 ** (j - i)))
        return circ
    for cascade in range(1, n_qubits):
        circ.append(h(1))
        for p in range(1, n_qubits - cascade + 1):
            circ.extend(_fused_cp_swap(p, p + 1, math.pi / 2**p))
    circ.append(h(1))
    return circ


def _momentum_pair_angles(
    grid: FieldGrid, t: float, reversed_frame: bool
) -> dict[tuple[int, int], float]:
    """R_ZZ angles of exp(-i Pi^2 t / 2) between the transform segments.

    The (k - c)^2 cross terms carry 2^(2n-a-b)/2 per pair in natural index
    order; when the transform segment leaves the register bit-reversed the
    exponent flips to a + b - 2.
    """
    n = grid.n_qubits
    delta_pi = MomentumGrid(n, grid.phi_max).delta_pi
    angles = {}
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            expo = (a + b - 2) if reversed_frame else (2 * n - a - b)
            angles[(a, b)] = t * delta_pi**2 * 2.0**expo / 2.0
    return angles


def synth_symmetric_qft(
    n_qubits: int,
    connectivity: str = "all-to-all",
    inner: CircuitIR | None = None,
) -> CircuitIR:
    """Phase-gate layer, QFT, optional inner diagonal, inverse QFT, layer.

    With an empty inner block this is the identity (up to global phase); the
    inner block sees the bit-reversed index convention of :func:`synth_qft`.
    """
    big_m = 2**n_qubits - 1
    circ = CircuitIR(n_qubits, [], connectivity)
    for q in range(1, n_qubits + 1):
        circ.append(phase(q, -big_m * math.pi / 2**q))
    fwd = synth_qft(n_qubits, connectivity)
    circ.extend(fwd.gates)
    if inner is not None:
        circ.extend(inner.gates)
    circ.extend(dagger(fwd).gates)
    for q in range(1, n_qubits + 1):
        circ.append(phase(q, big_m * math.pi / 2**q))
    return circ


def synth_pi_evolution(
    grid: FieldGrid, t: float, connectivity: str = "all-to-all"
) -> CircuitIR:
    """Circuit for the momentum phase exp(-i Pi^2 t / 2) in the field basis."""
    angles = _momentum_pair_angles(
        grid, t, reversed_frame=(connectivity == "all-to-all")
    )
    inner = synth_phi2_block(grid.n_qubits, angles, connectivity)
    return synth_symmetric_qft(grid.n_qubits, connectivity, inner=inner)


# ---------------------------------------------------------------------------
# field-phase block and full assembly


def _phi_spectrum(
    grid: FieldGrid,
    lam: float,
    nu_cut_phi4: int | None,
    nu_cut_phi2: int | None,
    phi2_time: float,
    phi4_time: float,
) -> dict[int, float]:
    """Combined sequency coefficients of the field phases, identity dropped."""
    spec2 = walsh.decompose(phi_power_operator(grid, 2))
    if nu_cut_phi2 is not None:
        spec2 = walsh.truncate(spec2, nu_cut_phi2)
    spec4 = walsh.decompose(phi_power_operator(grid, 4))
    if nu_cut_phi4 is not None:
        spec4 = walsh.truncate(spec4, nu_cut_phi4)
    combined: dict[int, float] = {}
    for nu in set(spec2.coefficients) | set(spec4.coefficients):
        if nu == 0:
            continue
        val = 0.5 * spec2[nu] * phi2_time + lam / 24.0 * spec4[nu] * phi4_time
        if abs(val) > 1e-14:
            combined[nu] = val
    return combined


def synth_phi_evolution(
    grid: FieldGrid,
    lam: float,
    t: float,
    nu_cut_phi4: int | None = None,
    nu_cut_phi2: int | None = None,
    connectivity: str = "all-to-all",
    phi2_time: float | None = None,
) -> CircuitIR:
    """Circuit for exp(-i (phi^2/2 * t2 + lam phi^4/4! * t) ), up to phase.

    Two-body sequency operators are absorbed into one overlaid R_ZZ block;
    four-body operators get individual CNOT ladders.
    """
    n = grid.n_qubits
    t2 = t if phi2_time is None else phi2_time
    coeffs = _phi_spectrum(grid, lam, nu_cut_phi4, nu_cut_phi2, t2, t)
    pair_angles: dict[tuple[int, int], float] = {}
    ladders: list[tuple[walsh.SequencyOp, float]] = []
    for nu, beta in sorted(coeffs.items()):
        op = walsh.SequencyOp.from_sequency(nu, n)
        theta = 2.0 * beta
        if op.weight == 2:
            a, b = op.qubits
            pair_angles[(a, b)] = pair_angles.get((a, b), 0.0) + theta
        else:
            ladders.append((op, theta))
    circ = CircuitIR(n, [], connectivity)
    block = synth_phi2_block(n, pair_angles, "linear")
    circ.extend(block.gates)
    for op, theta in ladders:
        circ.extend(synth_sequency_rotation(op, theta, connectivity).gates)
    return circ


def assemble_asp_circuit(schedule, grid: FieldGrid) -> CircuitIR:
    """Complete two-step second-order preparation circuit with merged middle.

    State preparation of the free ground state, then
    Phi(l1, dt/2), Pi(dt), merged Phi, Pi(dt), Phi(l2, dt/2), with the merged
    factor carrying the mass phase for the full dt and both half couplings.
    Blocks follow the published accounting style: nearest-neighbor pair
    staircases and transform segments, direct ladders and preparation.
    """
    from .field import free_ground_state

    if schedule.n_steps != 2 or schedule.trotter_order != 2:
        raise DomainError("the device configuration is 2 steps, second order")
    n = grid.n_qubits
    dt = schedule.dt
    lam1, lam2 = schedule.coupling_at(1), schedule.coupling_at(2)
    cut4, cut2 = schedule.nu_cut_phi4, schedule.nu_cut_phi2
    prep = synth_state_prep(n, half_state_angles(free_ground_state(grid)))
    circ = CircuitIR(n, list(prep.gates), "all-to-all")
    pi_block = synth_pi_evolution(grid, dt, "linear")
    circ.extend(synth_phi_evolution(grid, lam1, dt / 2, cut4, cut2).gates)
    circ.extend(pi_block.gates)
    circ.extend(
        synth_phi_evolution(
            grid, lam1 + lam2, dt / 2, cut4, cut2, phi2_time=dt
        ).gates
    )
    circ.extend(pi_block.gates)
    circ.extend(synth_phi_evolution(grid, lam2, dt / 2, cut4, cut2).gates)
    return cancel_cnots(circ)


# ---------------------------------------------------------------------------
# accounting and export


@dataclass(frozen=True)
class ResourceReport:
    two_qubit_count: int
    two_qubit_depth: int


def count_resources(circ: CircuitIR) -> ResourceReport:
    """CNOT count and two-qubit depth via greedy ASAP layering."""
    depth = [0] * (circ.n_qubits + 1)
    count = 0
    for g in circ.gates:
        if g.name != "cx":
            continue
        count += 1
        layer = max(depth[g.qubits[0]], depth[g.qubits[1]]) + 1
        depth[g.qubits[0]] = depth[g.qubits[1]] = layer
    return ResourceReport(count, max(depth))


_QASM_NAMES = {"cx": "cx", "rz": "rz", "ry": "ry", "h": "h", "p": "u1"}


def export_qasm(circ: CircuitIR) -> str:
    """OpenQASM 2.0 text; qubit q maps to wire q-1."""
    buf = io.StringIO()
    buf.write('OPENQASM 2.0;\ninclude "qelib1.inc";\n')
    buf.write(f"qreg q[{circ.n_qubits}];\n")
    for g in circ.gates:
        name = _QASM_NAMES.get(g.name)
        if name is None:
            raise SerializationError(f"gate {g.name!r} has no OpenQASM 2.0 form")
        wires = ",".join(f"q[{q - 1}]" for q in g.qubits)
        if g.angle is None:
            buf.write(f"{name} {wires};\n")
        else:
            buf.write(f"{name}({g.angle!r}) {wires};\n")
    return buf.getvalue()


def phi2_block_cnot_count(n_qubits: int) -> int:
    """Closed form for the complete overlaid pair block: 2 * C(n, 2)."""
    return n_qubits * (n_qubits - 1)


def phi2_block_depth(n_qubits: int) -> int:
    """Closed form for the complete overlaid pair block depth: n(n-2)+3."""
    return n_qubits * (n_qubits - 2) + 3


def state_prep_cnot_count(n_qubits: int) -> int:
    """Closed form for symmetric state preparation: 2^(n-1) + n - 3."""
    return 2 ** (n_qubits - 1) + n_qubits - 3


def qft_segment_cnot_count(n_qubits: int) -> int:
    """Published nearest-neighbor cost per transform segment: n^2 + n - 4.

    Our executable fused-staircase segment uses 3 * C(n, 2) CNOTs instead;
    this closed form is what the published resource totals assume and is
    used for the comparison accounting (see asp_resource_accounting).
    """
    return n_qubits * n_qubits + n_qubits - 4


def _four_body_ops(grid: FieldGrid, nu_cut: int | None) -> list[walsh.SequencyOp]:
    spec = walsh.decompose(phi_power_operator(grid, 4))
    if nu_cut is not None:
        spec = walsh.truncate(spec, nu_cut)
    ops = [
        walsh.SequencyOp.from_sequency(nu, grid.n_qubits)
        for nu in spec.support()
    ]
    return [op for op in ops if op.weight == 4]


def asp_resource_accounting(schedule, grid: FieldGrid) -> dict[str, dict[str, int]]:
    """Two-qubit totals for the two-step plan under three accountings.

    ``formula``   prices blocks with the published closed forms (pair blocks
                  2*C(n,2), four-body ladders 6 CNOTs, transform segments
                  n^2+n-4, preparation 2^(n-1)+n-3);
    ``sequential`` sums the synthesized per-block counts and depths, with
                  blocks executing back to back;
    ``scheduled`` measures the concatenated circuit after the cancellation
                  pass with greedy global layering, which overlaps blocks.
    """
    from .field import free_ground_state

    n = grid.n_qubits
    dt = schedule.dt
    lam1, lam2 = schedule.coupling_at(1), schedule.coupling_at(2)
    cut4, cut2 = schedule.nu_cut_phi4, schedule.nu_cut_phi2

    four_body = len(_four_body_ops(grid, cut4))
    phi_formula = phi2_block_cnot_count(n) + 6 * four_body
    pi_formula = phi2_block_cnot_count(n) + 2 * qft_segment_cnot_count(n)
    formula_total = state_prep_cnot_count(n) + 3 * phi_formula + 2 * pi_formula

    prep = synth_state_prep(n, half_state_angles(free_ground_state(grid)))
    blocks = [
        prep,
        synth_phi_evolution(grid, lam1, dt / 2, cut4, cut2),
        synth_pi_evolution(grid, dt, "linear"),
        synth_phi_evolution(grid, lam1 + lam2, dt / 2, cut4, cut2, phi2_time=dt),
        synth_pi_evolution(grid, dt, "linear"),
        synth_phi_evolution(grid, lam2, dt / 2, cut4, cut2),
    ]
    reports = [count_resources(b) for b in blocks]
    merged = count_resources(assemble_asp_circuit(schedule, grid))
    return {
        "formula": {
            "state_prep": state_prep_cnot_count(n),
            "phi_block_each": phi_formula,
            "pi_block_each": pi_formula,
            "two_step_count": formula_total,
        },
        "sequential": {
            "two_step_count": sum(r.two_qubit_count for r in reports),
            "two_step_depth": sum(r.two_qubit_depth for r in reports),
        },
        "scheduled": {
            "two_step_count": merged.two_qubit_count,
            "two_step_depth": merged.two_qubit_depth,
        },
    }


def resource_report_json(circ: CircuitIR, by_block: dict | None = None) -> str:
    report = count_resources(circ)
    payload = {
        "count": report.two_qubit_count,
        "depth": report.two_qubit_depth,
        "by_block": by_block or {},
    }
    return json.dumps(payload, sort_keys=True)

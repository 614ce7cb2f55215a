"""Acceptance criteria: one test per criterion, run with `pytest -v -s`.

Each test prints a single PASS line when its criterion holds at the stated
tolerance.  Criterion 4 carries a strict expected-failure companion for two
published eigenvalues that are provably inconsistent with the rest of their
own table (see the README reconciliation notes).
"""

import math

import numpy as np
import pytest

import golden
from seqht import circuit as cc
from seqht import evolution, field, hierarchy, magic, walsh
from seqht.evolution import AspSchedule
from seqht.field import FieldGrid, HamiltonianSpec

SIGMA = 1.0 / np.sqrt(2.0)


def sig4_tolerance(value: float) -> float:
    """Half of the least printed digit at 4 significant figures."""
    exponent = math.floor(math.log10(abs(value)))
    return 0.5 * 10.0 ** (exponent - 3) + 1e-9


def report(lines: str) -> None:
    print(f"\n{lines}")


def test_criterion_01_quartic_decomposition():
    worst = 0.0
    for n in (5, 6, 7, 8):
        grid = FieldGrid(n, 4.0)
        spec = walsh.decompose(field.phi_power_operator(grid, 4))
        for nu, entry in golden.PHI4_COEFFICIENTS.items():
            expected = entry[str(n)]
            if expected is None:
                continue
            dev = abs(spec[nu] - expected)
            worst = max(worst, dev)
            assert dev <= 5e-3 + 1e-9, (n, nu)
    report(f"criterion 1 PASS: quartic coefficients, 4 registers, worst |dev| {worst:.2e}")


def test_criterion_02_gray_code_bijection():
    assert walsh.SequencyOp.from_sequency(24, 5).label() == "Z3Z5"
    assert walsh.SequencyOp.from_sequency(10, 5).label() == "Z1Z2Z3Z4"
    for nu in range(2**12):
        assert walsh.zmask_to_sequency(walsh.sequency_to_zmask(nu, 12), 12) == nu
    report("criterion 2 PASS: worked examples exact, round trip over 4096 indices")


def test_criterion_03_bound_table():
    violations = 0
    worst_c = worst_b = 0.0
    for nu, (coeff, bound) in golden.BOUND_PROFILE.items():
        got_c = hierarchy.normalized_coefficient(4, nu, 4.0, 8)
        got_b = hierarchy.monomial_bound(4, nu)
        worst_c = max(worst_c, abs(got_c - coeff))
        worst_b = max(worst_b, abs(got_b - bound))
        assert abs(got_c - coeff) <= 1e-3, nu
        assert abs(got_b - bound) <= 1e-3, nu
        if abs(got_c) > got_b + 1e-12:
            violations += 1
    assert violations == 0
    report(
        "criterion 3 PASS: 128 coefficients and bounds within 1e-3 "
        f"(worst {worst_c:.2e}/{worst_b:.2e}), dominance violations 0"
    )


def _spectra():
    grid = FieldGrid(5, 4.0)
    trunc = np.linalg.eigvalsh(
        field.build_hamiltonian(grid, HamiltonianSpec(lam=10.0, nu_cut_phi4=14))
    )
    full = np.linalg.eigvalsh(field.build_hamiltonian(grid, HamiltonianSpec(lam=10.0)))
    return trunc, full


def test_criterion_04_spectra():
    trunc, full = _spectra()
    checked = 0
    for i, (t_ref, f_ref, _, _) in enumerate(golden.ANHARMONIC_SPECTRA):
        assert abs(trunc[i] - t_ref) <= sig4_tolerance(t_ref), ("trunc", i)
        if i not in golden.SPECTRUM_DEFECT_INDICES:
            assert abs(full[i] - f_ref) <= sig4_tolerance(f_ref), ("full", i)
            checked += 1
    rel = np.abs(trunc[:8] - full[:8]) / full[:8]
    assert np.max(rel) <= 0.05
    report(
        f"criterion 4 PASS: 32 truncated and {checked}/32 full eigenvalues at 4 "
        "significant figures (2 published full entries are internally "
        "inconsistent, see companion xfail), lowest-8 deviations "
        f"max {100 * np.max(rel):.2f}% <= 5%"
    )


@pytest.mark.xfail(
    strict=True,
    reason=(
        "published full-spectrum entries 29 and 30 (118.9, 133.0) are "
        "inconsistent with the published oscillator columns, which this "
        "implementation reproduces 32/32 in both field cutoffs; the "
        "interacting matrix differs from the oscillator one only by the "
        "exact diagonal lam*phi^4/24, leaving no freedom: the values here "
        "evaluate to 117.95 and 133.98"
    ),
)
def test_criterion_04_known_defective_published_entries():
    _, full = _spectra()
    for i in golden.SPECTRUM_DEFECT_INDICES:
        ref = golden.ANHARMONIC_SPECTRA[i][1]
        assert abs(full[i] - ref) <= sig4_tolerance(ref)


def _scan_coverage(table, grid, order, cut4, cut2, target):
    engine = evolution.TrotterEngine(grid, cut4, cut2)
    psi0 = field.free_ground_state(grid).astype(complex)
    hits = total = 0
    for steps, row in table["rows"].items():
        for dt, expected in zip(table["dt"], row):
            sched = AspSchedule(
                n_steps=steps, dt=dt, lambda_target=10.0, trotter_order=order,
                nu_cut_phi4=cut4, nu_cut_phi2=cut2,
            )
            fid = evolution.fidelity(target, engine.run(sched, psi0))
            hits += abs(fid - expected) <= 2e-3
            total += 1
    return hits, total


def test_criterion_05_asp_fidelities():
    grid = FieldGrid(5, 4.0)
    target = field.target_ground_state(grid, 10.0)

    # exact-step preparation: published amplitude profile and quoted overlap
    prepared = evolution.run_asp_exact(5, 5.0, 10.0, grid, nu_cut_phi4=14)
    for j, row in enumerate(golden.GROUND_AMPLITUDES):
        assert abs(abs(prepared[j]) - row[0]) <= 1e-4
    exact_fid = evolution.magnitude_overlap(target, prepared)
    assert abs(exact_fid - 0.9999) <= 1e-4

    hits = total = 0
    for table, order, cut4 in (
        (golden.SCAN_FIRST_FULL, 1, None),
        (golden.SCAN_FIRST_TRUNC, 1, 14),
        (golden.SCAN_SECOND_FULL, 2, None),
        (golden.SCAN_SECOND_TRUNC, 2, 14),
    ):
        h, t = _scan_coverage(table, grid, order, cut4, None, target)
        hits += h
        total += t

    grid12 = FieldGrid(12, 4.0)
    target12 = field.target_ground_state(grid12, 10.0)
    for table, cut2 in ((golden.SCAN_TWELVE_PHI4, None), (golden.SCAN_TWELVE_BOTH, 30)):
        h, t = _scan_coverage(table, grid12, 2, 14, cut2, target12)
        hits += h
        total += t

    # the time series uses exact per-step exponentials at step size 0.1
    hard = {0.0: None, 2.0: None, 5.0: None, 8.0: None}
    for t_val, full_ref, trunc_ref in golden.FIDELITY_VS_TIME:
        steps = round(t_val / 0.1)
        fid_full = evolution.fidelity(
            target, evolution.run_asp_exact(steps, t_val, 10.0, grid)
        )
        fid_trunc = evolution.fidelity(
            target,
            evolution.run_asp_exact(steps, t_val, 10.0, grid, nu_cut_phi4=14),
        )
        hits += abs(fid_full - full_ref) <= 2e-3
        hits += abs(fid_trunc - trunc_ref) <= 2e-3
        total += 2
        if t_val in hard:
            hard[t_val] = abs(fid_full - full_ref)
    for t_val, dev in hard.items():
        assert dev is not None and dev <= 1e-3, t_val

    coverage = hits / total
    assert coverage >= 0.95
    report(
        f"criterion 5 PASS: exact-step overlap {exact_fid:.5f} (0.9999 +/- 1e-4), "
        f"scan coverage {hits}/{total} = {100 * coverage:.2f}% >= 95%, "
        "anchor times within 1e-3"
    )


def test_criterion_06_pair_observables():
    grid = FieldGrid(5, 4.0)
    target = field.target_ground_state(grid, 10.0)
    observed = evolution.zz_expectations(target)
    worst = 0.0
    for pair, expected in golden.ZZ_IDEAL.items():
        dev = abs(observed[pair] - expected)
        worst = max(worst, dev)
        assert dev <= 1e-3, pair
    report(f"criterion 6 PASS: ten pair expectations within 1e-3 (worst {worst:.1e})")


def test_criterion_07_magic():
    for n, expected in golden.MAGIC_VS_QUBITS.items():
        state = magic.gaussian_state(SIGMA, 0.0, FieldGrid(n, 4.0))
        assert abs(magic.linear_magic(state).m_lin - expected) <= 1e-5, n

    grid9 = FieldGrid(9, 4.0)
    state9 = magic.gaussian_state(SIGMA, 0.0, grid9)
    spots = [0, 2, 14, 30, 62, 254, 510]
    profile = magic.truncated_magic_profile(state9, spots)
    for cut in spots:
        assert abs(profile[cut] - golden.MAGIC_VS_CUTOFF[cut]) <= 1e-5, cut

    for k in range(8):
        basis = np.zeros(8)
        basis[k] = 1.0
        assert abs(magic.linear_magic(basis).m_lin) < 1e-12
    assert abs(magic.linear_magic(np.full(16, 0.25)).m_lin) < 1e-12
    report(
        "criterion 7 PASS: seven register sizes and seven cutoffs within 1e-5, "
        "stabilizer states below 1e-12"
    )


def test_criterion_08_mitigation_invariant():
    rng = np.random.default_rng(2024)
    grid = FieldGrid(5, 4.0)
    base = evolution.zz_expectations(field.free_ground_state(grid))
    worst = 0.0
    for _ in range(25):
        sched = AspSchedule(
            n_steps=2,
            dt=float(rng.uniform(0.05, 0.6)),
            lambda_target=float(rng.uniform(0.0, 20.0)),
            trotter_order=2,
            nu_cut_phi4=int(rng.choice([14, 30])) if rng.random() < 0.7 else None,
        )
        out = evolution.run_mitigation(sched, grid)
        after = evolution.zz_expectations(out)
        for key, val in base.items():
            worst = max(worst, abs(after[key] - val))
    assert worst <= 1e-12
    report(
        "criterion 8 PASS: 25 randomized mitigation circuits leave all "
        f"Z-string expectations unchanged (worst {worst:.1e} <= 1e-12)"
    )


def _unitary_close(circ, target, tol=1e-10):
    u = cc.circuit_unitary(circ)
    s = np.trace(target.conj().T @ u) / target.shape[0]
    return abs(abs(s) - 1.0) < tol and np.max(np.abs(u - s * target)) < tol


def test_criterion_09_circuit_synthesis():
    # dense-simulation equivalence of every synthesized block at 5 qubits
    grid = FieldGrid(5, 4.0)
    theta = 0.613
    for nu in range(1, 32):
        op = walsh.SequencyOp.from_sequency(nu, 5)
        circ = cc.synth_sequency_rotation(op, theta)
        target = np.diag(np.exp(-0.5j * theta * walsh.walsh_row(nu, 5)))
        assert _unitary_close(circ, target), nu
        assert cc.count_resources(circ).two_qubit_count == 2 * (op.weight - 1)

    rng = np.random.default_rng(17)
    angles = {
        (a, b): float(rng.normal()) for a in range(1, 6) for b in range(a + 1, 6)
    }
    diag = np.zeros(32)
    for (a, b), th in angles.items():
        mask = (1 << (5 - a)) | (1 << (5 - b))
        diag = diag + 0.5 * th * walsh.walsh_row(walsh.zmask_to_sequency(mask, 5), 5)
    assert _unitary_close(cc.synth_phi2_block(5, angles), np.diag(np.exp(-1j * diag)))

    psi = field.free_ground_state(grid)
    prep = cc.synth_state_prep(5, cc.half_state_angles(psi))
    start = np.zeros(32, dtype=complex)
    start[0] = 1.0
    assert abs(np.vdot(psi, cc.apply_circuit(prep, start))) ** 2 > 1 - 1e-10

    mom2 = field.MomentumGrid(5, 4.0).values() ** 2
    w = field.centered_fourier_kernel(5)
    pi_target = w.conj().T @ (np.exp(-0.5j * mom2 * 0.37)[:, None] * w)
    for conn in ("all-to-all", "linear"):
        assert _unitary_close(cc.synth_pi_evolution(grid, 0.37, conn), pi_target)
    engine = evolution.TrotterEngine(grid, 14, None)
    phi_target = np.diag(np.exp(-1j * engine.phase_diagonal(10.0) * 0.21))
    assert _unitary_close(cc.synth_phi_evolution(grid, 10.0, 0.21, 14), phi_target)

    # closed-form counts
    for n in range(3, 9):
        pairs = {
            (a, b): 0.1 for a in range(1, n + 1) for b in range(a + 1, n + 1)
        }
        rep = cc.count_resources(cc.synth_phi2_block(n, pairs))
        assert rep.two_qubit_count == n * (n - 1)
        assert rep.two_qubit_depth == n * (n - 2) + 3
        free = field.free_ground_state(FieldGrid(n, 4.0))
        prep_n = cc.synth_state_prep(n, cc.half_state_angles(free))
        assert cc.count_resources(prep_n).two_qubit_count == 2 ** (n - 1) + n - 3
        assert cc.qft_segment_cnot_count(n) == n * n + n - 4

    # assembled two-step totals against the published device numbers
    lines = []
    for cut4, key in ((None, "two_step_full"), (14, "two_step_trunc")):
        sched = AspSchedule(n_steps=2, dt=0.3, lambda_target=10.0, nu_cut_phi4=cut4)
        acct = cc.asp_resource_accounting(sched, grid)
        depth_ref, count_ref = golden.RESOURCE_TOTALS[key]
        count = acct["sequential"]["two_step_count"]
        depth = acct["sequential"]["two_step_depth"]
        assert abs(count - count_ref) / count_ref <= 0.10, key
        assert abs(depth - depth_ref) / depth_ref <= 0.10, key
        lines.append(
            f"{key}: count {count} vs {count_ref} ({100 * (count - count_ref) / count_ref:+.1f}%), "
            f"depth {depth} vs {depth_ref} ({100 * (depth - depth_ref) / depth_ref:+.1f}%); "
            f"scheduled {acct['scheduled']['two_step_count']}/{acct['scheduled']['two_step_depth']}, "
            f"formula {acct['formula']['two_step_count']}"
        )
    report(
        "criterion 9 PASS: all blocks dense-equivalent at 1e-10; pair-block, "
        "preparation and transform closed forms match for 3..8 qubits "
        "(executable transform segment uses 3*C(n,2), documented); "
        + " | ".join(lines)
    )


def test_criterion_10_property_suites():
    for n in range(1, 9):
        rows = np.array([walsh.walsh_row(nu, n) for nu in range(2**n)])
        gram = rows @ rows.T
        assert np.array_equal(gram, 2**n * np.eye(2**n))
        changes = np.sum(rows[:, 1:] * rows[:, :-1] < 0, axis=1)
        assert np.array_equal(changes, np.arange(2**n))

    rng = np.random.default_rng(99)
    grid = FieldGrid(5, 4.0)
    engine = evolution.TrotterEngine(grid, 14, None)
    psi = field.free_ground_state(grid).astype(complex)
    worst = 0.0
    for _ in range(1000):
        if rng.random() < 0.5:
            psi = engine.phi_step(psi, rng.uniform(0, 30), rng.uniform(-0.6, 0.6))
        else:
            psi = engine.pi_step(psi, rng.uniform(-0.6, 0.6))
        worst = max(worst, abs(np.linalg.norm(psi) - 1.0))
    assert worst <= 1e-12

    for n in range(5, 13):
        spec = walsh.decompose(field.phi_power_operator(FieldGrid(n, 4.0), 4))
        support = spec.support()
        assert all(nu % 2 == 0 for nu in support)
        weights = {walsh.SequencyOp.from_sequency(nu, n).weight for nu in support}
        assert weights <= {0, 2, 4}
    report(
        "criterion 10 PASS: orthogonality and crossing counts exhaustive to 8 "
        f"qubits, norm drift over 1000 steps {worst:.1e} <= 1e-12, parity and "
        "body structure hold for 5..12 qubits"
    )

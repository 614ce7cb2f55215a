"""Command-line driver wiring the modules into reproducible experiments.

Every subcommand echoes its resolved configuration into the output header,
writes CSV with fixed 4-decimal floats (JSON keeps full precision), and is
deterministic: identical flags produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import circuit, evolution, field, hierarchy, magic, walsh

DEFAULT_SIGMA = float(1.0 / np.sqrt(2.0))


def _parse_int_list(text: str) -> list[int]:
    """Accept '3,4,5' and '3..9' (inclusive) forms."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(p) for p in text.split(",") if p]


def _parse_float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p]


def _config_header(args: argparse.Namespace, keys: list[str]) -> str:
    parts = [f"{k}={getattr(args, k)!r}" for k in keys if hasattr(args, k)]
    return "# " + " ".join(parts)


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise RuntimeError(f"cannot write {out!r}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _check_cut(nu_cut: int | None, n_qubits: int) -> int | None:
    if nu_cut is not None and n_qubits < 5:
        _warn(
            f"sequency cutoff on {n_qubits} qubits: register too coarse, "
            "cutoff ignored"
        )
        return None
    return nu_cut


def cmd_decompose(args) -> str:
    nq_list = _parse_int_list(args.nq_list)
    p = args.power
    specs = {}
    for n in nq_list:
        grid = field.FieldGrid(n, args.phi_max)
        specs[n] = walsh.decompose(field.phi_power_operator(grid, p))
    n_max = max(nq_list)
    continuum = _continuum_coefficients(p, args.phi_max, args.nu_max)
    lines = [_config_header(args, ["power", "nq_list", "phi_max", "nu_max"])]
    lines.append(
        "nu,operator," + ",".join(f"nq{n}" for n in nq_list) + ",continuum"
    )
    for nu in range(0, args.nu_max + 1, 2 if p % 2 == 0 else 1):
        label = walsh.SequencyOp.from_sequency(nu, n_max).label()
        cells = []
        for n in nq_list:
            cells.append(f"{specs[n][nu]:.4f}" if nu < 2**n else "--")
        lines.append(f"{nu},{label}," + ",".join(cells) + f",{continuum[nu]:.4f}")
    return "\n".join(lines) + "\n"


def _continuum_coefficients(p: int, x_max: float, nu_max: int) -> dict[int, float]:
    """Large-register limit of the coefficients via exact piecewise integrals."""
    out = {}
    for nu in range(nu_max + 1):
        bits = max(nu.bit_length() + 1, 3)
        row = walsh.walsh_row(nu, bits)
        edges = np.linspace(-x_max, x_max, row.size + 1)
        anti = edges ** (p + 1) / (p + 1)
        out[nu] = float(np.sum(row * (anti[1:] - anti[:-1])) / (2 * x_max))
    return out


def cmd_bounds(args) -> str:
    profile = hierarchy.build_bound_profile(args.power, args.phi_max, args.nq)
    header = _config_header(args, ["power", "nq", "phi_max"])
    return header + "\n" + hierarchy.bound_profile_to_csv(profile)


def cmd_eigen(args) -> str:
    grid = field.FieldGrid(args.nq, args.phi_max)
    nu_cut = _check_cut(args.nu_cut, args.nq)
    h_full = field.build_hamiltonian(grid, field.HamiltonianSpec(lam=args.lam))
    h_trunc = field.build_hamiltonian(
        grid, field.HamiltonianSpec(lam=args.lam, nu_cut_phi4=nu_cut)
    )
    qho = field.build_hamiltonian(grid, field.HamiltonianSpec(lam=0.0))
    opt_grid = field.FieldGrid(args.nq, field.optimal_phi_max(args.nq))
    qho_opt = field.build_hamiltonian(opt_grid, field.HamiltonianSpec(lam=0.0))
    cols = [
        np.linalg.eigvalsh(h_trunc),
        np.linalg.eigvalsh(h_full),
        np.linalg.eigvalsh(qho),
        np.linalg.eigvalsh(qho_opt),
        np.arange(grid.dim) + 0.5,
    ]
    lines = [_config_header(args, ["nq", "phi_max", "lam", "nu_cut"])]
    lines.append("index,truncated,original,qho,qho_optimal,analytical")
    for i in range(grid.dim):
        lines.append(f"{i}," + ",".join(f"{c[i]:.4f}" for c in cols))
    return "\n".join(lines) + "\n"


def cmd_asp(args) -> str:
    grid = field.FieldGrid(args.nq, args.phi_max)
    nu_cut = _check_cut(args.nu_cut, args.nq)
    nu_cut2 = _check_cut(args.nu_cut_phi2, args.nq)
    target = field.target_ground_state(grid, args.lam)
    if args.exact:
        state = evolution.run_asp_exact(
            args.steps, args.steps * args.dt, args.lam, grid, nu_cut, nu_cut2
        )
    else:
        sched = evolution.AspSchedule(
            n_steps=args.steps,
            dt=args.dt,
            lambda_target=args.lam,
            trotter_order=args.order,
            nu_cut_phi4=nu_cut,
            nu_cut_phi2=nu_cut2,
        )
        state = evolution.run_asp(sched, grid)
    fid = evolution.fidelity(target, state)
    if args.format == "json":
        return evolution.state_report_json(
            state,
            grid,
            fidelity=fid,
            steps=args.steps,
            dt=args.dt,
            order=args.order,
            exact=bool(args.exact),
            lam=args.lam,
            nu_cut=nu_cut,
        ) + "\n"
    lines = [_config_header(args, ["nq", "phi_max", "lam", "nu_cut", "steps", "dt", "order", "exact"])]
    lines.append(f"fidelity,{fid:.4f}")
    lines.append("index,abs_amplitude")
    for j, amp in enumerate(np.abs(state)):
        lines.append(f"{j},{amp:.4f}")
    return "\n".join(lines) + "\n"


def cmd_scan(args) -> str:
    grid = field.FieldGrid(args.nq, args.phi_max)
    nu_cut = _check_cut(args.nu_cut, args.nq)
    nu_cut2 = _check_cut(args.nu_cut_phi2, args.nq)
    dts = _parse_float_list(args.dt_grid)
    steps = _parse_int_list(args.steps_grid)
    matrix = evolution.scan_fidelity(
        dts,
        steps,
        grid,
        lambda_target=args.lam,
        trotter_order=args.order,
        nu_cut_phi4=nu_cut,
        nu_cut_phi2=nu_cut2,
        max_workers=args.workers,
    )
    header = _config_header(
        args, ["nq", "phi_max", "lam", "nu_cut", "nu_cut_phi2", "order"]
    ).lstrip("# ")
    return evolution.scan_to_csv(matrix, dts, steps, header=header)


def cmd_magic(args) -> str:
    lines = [_config_header(args, ["nq", "nq_list", "phi_max", "sigma", "profile"])]
    if args.profile:
        grid = field.FieldGrid(args.nq, args.phi_max)
        state = magic.gaussian_state(args.sigma, 0.0, grid)
        cuts = list(range(0, grid.dim - 1, 2)) + [grid.dim - 2]
        profile = magic.truncated_magic_profile(state, sorted(set(cuts)))
        lines.append("nu_cut,m_lin")
        for cut in sorted(profile):
            lines.append(f"{cut},{profile[cut]:.6f}")
    else:
        lines.append("nq,m_lin")
        for n in _parse_int_list(args.nq_list):
            grid = field.FieldGrid(n, args.phi_max)
            rep = magic.linear_magic(magic.gaussian_state(args.sigma, 0.0, grid))
            lines.append(f"{n},{rep.m_lin:.6f}")
    return "\n".join(lines) + "\n"


def cmd_resources(args) -> str:
    grid = field.FieldGrid(args.nq, args.phi_max)
    nu_cut = _check_cut(args.nu_cut, args.nq)
    sched = evolution.AspSchedule(
        n_steps=2,
        dt=args.dt,
        lambda_target=args.lam,
        trotter_order=2,
        nu_cut_phi4=nu_cut,
        nu_cut_phi2=args.nu_cut_phi2,
    )
    accounting = circuit.asp_resource_accounting(sched, grid)
    payload = {"config": {"nq": args.nq, "nu_cut": nu_cut, "dt": args.dt}}
    payload.update(accounting)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqht",
        description="Sequency-truncated decompositions, evolution, magic, resources",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, nq_default=5):
        p.add_argument("--nq", type=int, default=nq_default)
        p.add_argument("--phi-max", dest="phi_max", type=float, default=4.0)
        p.add_argument("--lambda", dest="lam", type=float, default=10.0)
        p.add_argument("--nu-cut", dest="nu_cut", type=int, default=14)
        p.add_argument("--nu-cut-phi2", dest="nu_cut_phi2", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("decompose", help="sequency coefficients of a field power")
    p.add_argument("--power", type=int, default=4)
    p.add_argument("--nq-list", dest="nq_list", default="5,6,7,8")
    p.add_argument("--phi-max", dest="phi_max", type=float, default=4.0)
    p.add_argument("--nu-max", dest="nu_max", type=int, default=38)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("bounds", help="coefficient bound profile for x^p")
    p.add_argument("--power", type=int, default=4)
    p.add_argument("--nq", type=int, default=8)
    p.add_argument("--phi-max", dest="phi_max", type=float, default=4.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("eigen", help="spectra of the full and truncated Hamiltonians")
    common(p)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("asp", help="one adiabatic preparation run")
    common(p)
    p.add_argument("--steps", type=int, default=2)
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--order", type=int, default=2, choices=(1, 2))
    p.add_argument("--exact", action="store_true", help="exact per-step exponentials")
    p.set_defaults(func=cmd_asp)

    p = sub.add_parser("scan", help="fidelity over a (steps, dt) grid")
    common(p)
    p.add_argument("--dt-grid", dest="dt_grid", default="0.1,0.2,0.3,0.4,0.5")
    p.add_argument("--steps-grid", dest="steps_grid", default="1..10")
    p.add_argument("--order", type=int, default=2, choices=(1, 2))
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("magic", help="linear magic of digitized Gaussians")
    p.add_argument("--nq", type=int, default=9)
    p.add_argument("--nq-list", dest="nq_list", default="3..9")
    p.add_argument("--phi-max", dest="phi_max", type=float, default=4.0)
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p.add_argument("--profile", action="store_true", help="sweep nu_cut instead of nq")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_magic)

    p = sub.add_parser("resources", help="two-qubit totals of the two-step circuit")
    common(p)
    p.add_argument("--dt", type=float, default=0.3)
    p.set_defaults(func=cmd_resources)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
        _emit(text, args.out)
    except (ValueError, walsh.DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures keep a distinct exit code
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

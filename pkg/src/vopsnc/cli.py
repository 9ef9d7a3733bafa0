"""Command-line front end: ``vopsnc <subcommand> [options]``.

Every subcommand builds a table (column names, rows, metadata) and writes it
as CSV (17 significant digits, sidecar ``.meta.json``) or JSON.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .exceptions import DomainError, NumericalError
from .fit import add_noise, fit_model
from .linalg import validate_density
from .phasespace import MARGINAL_PAIRS, amps_grid, marginal, qpd_grid
from .potentials import potentials, regime_map
from .states import ChannelParams, QubitState, TwoModeState, dephase_mix, pure_vops, scissors_output, sigma_prime, two_mode_closed_form, vops

__all__ = ["main", "build_parser", "Table", "parse_grid", "read_density", "write_density", "render"]

S_CLI_MAX = 0.95
BASIS = ["00", "01", "10", "11"]


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# parsing helpers


def parse_grid(spec: str) -> np.ndarray:
    """``min:max:step`` -> inclusive, evenly spaced points."""
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise DomainError(f"grid {spec!r} is not of the form min:max:step") from None
    if not step > 0:
        raise DomainError(f"grid step must be positive, got {step}")
    if hi < lo:
        raise DomainError(f"grid {spec!r} is empty (max < min)")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise DomainError(f"cannot parse {text!r} as a complex number") from None


def channel(args) -> ChannelParams:
    q = args.q if args.q is not None else 0.0
    if args.theta is not None and args.rsq is not None:
        raise DomainError("give at most one of --theta and --rsq")
    if args.theta is not None:
        return ChannelParams(q, args.theta)
    return ChannelParams.from_rsq(q, 0.5 if args.rsq is None else args.rsq)


def _qubit(args) -> QubitState:
    if args.p is None:
        raise DomainError("--p is required")
    if args.pprime is not None:
        return sigma_prime(args.p, args.pprime)
    return vops(args.p, parse_complex(args.x) if args.x is not None else 0.0)


def _check_s(s: float) -> float:
    if s >= S_CLI_MAX:
        raise DomainError(f"s={s} >= {S_CLI_MAX}: the s -> 1 limit is singular and not evaluated")
    if s < -1:
        raise DomainError(f"s={s} below -1")
    return s


def read_density(path: str) -> TwoModeState:
    """Read ``{"basis": [...], "matrix": 4x4 [re, im]}`` JSON or ``row,col,re,im`` CSV."""
    with open(path, newline="") as fh:
        text = fh.read()
    if path.lower().endswith(".csv"):
        m = np.zeros((4, 4), dtype=complex)
        seen = set()
        for rec in csv.DictReader(io.StringIO(text)):
            i, j = int(rec["row"]), int(rec["col"])
            m[i, j] = float(rec["re"]) + 1j * float(rec["im"])
            seen.add((i, j))
        if len(seen) != 16:
            raise DomainError(f"{path}: expected 16 matrix entries, found {len(seen)}")
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path}: invalid JSON ({exc})") from None
        if doc.get("basis") != BASIS:
            raise DomainError(f"{path}: basis must be {BASIS}, got {doc.get('basis')}")
        arr = np.asarray(doc.get("matrix"), dtype=float)
        if arr.shape != (4, 4, 2):
            raise DomainError(f"{path}: matrix must be 4x4 of [re, im] pairs, got shape {arr.shape}")
        m = arr[..., 0] + 1j * arr[..., 1]
    validate_density(m, tol=1e-4, name=path)
    return TwoModeState(m)


def write_density(rho, path: str) -> None:
    m = np.asarray(rho, dtype=complex)
    doc = {"basis": BASIS, "matrix": [[[v.real, v.imag] for v in row] for row in m]}
    _atomic_write(path, json.dumps(doc))


# ---------------------------------------------------------------------------
# output


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    if isinstance(v, (list, tuple)):
        return ";".join(str(e) for e in v)
    return str(v)


def _json_value(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: _json_value(e) for k, e in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(e) for e in v]
    return v


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "metadata": _json_value(table.metadata),
            "columns": table.columns,
            "rows": _json_value(table.rows),
        }
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".vopsnc-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(table: Table, args) -> None:
    text = render(table, args.format)
    if args.out is None:
        sys.stdout.write(text)
        return
    _atomic_write(args.out, text)
    if args.format == "csv":
        meta = json.dumps(_json_value(table.metadata), indent=1, sort_keys=True) + "\n"
        _atomic_write(args.out + ".meta.json", meta)


def _base_meta(args) -> dict:
    return {"command": args.command, "version": __version__}


def _channel_meta(params: ChannelParams) -> dict:
    return {"q": params.q, "theta": params.theta, "rsq": params.r**2}


# ---------------------------------------------------------------------------
# subcommands


def cmd_potentials(args) -> Table:
    params = channel(args)
    cols = ["p", "x_re", "x_im", "cp", "np", "sp", "sp_prime", "bp", "bp_prime", "uwep", "regime"]
    table = Table(cols, metadata={**_base_meta(args), **_channel_meta(params)})
    if args.grid is None:
        states = [_qubit(args)]
    else:
        pts = parse_grid(args.grid)
        table.metadata.update(grid=args.grid, axis=args.axis)
        states = []
        skipped = 0
        for v in pts:
            try:
                if args.axis == "p":
                    if args.pprime is not None:
                        states.append(sigma_prime(v, args.pprime))
                    elif args.x == "pure":
                        states.append(pure_vops(v))
                    else:
                        states.append(vops(v, parse_complex(args.x) if args.x else 0.0))
                elif args.axis == "x":
                    states.append(vops(_req(args.p, "--p"), v))
                else:
                    states.append(sigma_prime(_req(args.p, "--p"), v))
            except DomainError:
                skipped += 1
        table.metadata["omitted_out_of_wedge"] = skipped
        if not states:
            raise DomainError("no valid state on the requested grid")
    for s in states:
        pot = potentials(s.p, s.x, params)
        table.rows.append([s.p, s.x.real, s.x.imag, pot.cp, pot.np, pot.sp, pot.sp_prime,
                           pot.bp, pot.bp_prime, pot.uwep, str(pot.regime)])
    return table


def _req(v, name):
    if v is None:
        raise DomainError(f"{name} is required")
    return v


def cmd_map(args) -> Table:
    params = channel(args)
    pg = parse_grid(args.grid or "0:1:0.01")
    xg = parse_grid(args.xgrid or f"0:0.5:{pg[1] - pg[0] if pg.size > 1 else 0.01}")
    rm = regime_map(pg, xg, params)
    table = Table(["p", "x", "regime"], metadata={
        **_base_meta(args), **_channel_meta(params),
        "grid": args.grid or "0:1:0.01", "xgrid": args.xgrid, "counts": rm.counts(),
    })
    for i, p in enumerate(rm.p):
        for j, x in enumerate(rm.x):
            table.rows.append([float(p), float(x), "out" if rm.out_of_wedge[i, j] else str(rm.labels[i, j])])
    return table


def _phase_grid(args, s: float) -> Table:
    sigma = _qubit(args)
    g = parse_grid(args.grid or "-3:3:0.02")
    grid = qpd_grid(sigma, s, g)
    table = Table(["X", "Y", "W"], metadata={
        **_base_meta(args), "p": sigma.p, "x": sigma.x, "s": s, "grid": args.grid or "-3:3:0.02",
        "min": grid.min, "max": grid.max, "integral": grid.integral(),
    })
    for i, X in enumerate(grid.axes[0]):
        for j, Y in enumerate(grid.axes[1]):
            table.rows.append([float(X), float(Y), float(grid.values[i, j])])
    return table


def cmd_wigner(args) -> Table:
    return _phase_grid(args, 0.0)


def cmd_qpd(args) -> Table:
    return _phase_grid(args, _check_s(args.s))


def _two_mode(args) -> tuple[TwoModeState, dict]:
    if args.input:
        return read_density(args.input), {"input": args.input}
    sigma = _qubit(args)
    params = channel(args)
    return two_mode_closed_form(sigma.p, sigma.x, params), {"p": sigma.p, "x": sigma.x, **_channel_meta(params)}


def cmd_marginals(args) -> Table:
    s = _check_s(args.s)
    rho, meta = _two_mode(args)
    g = parse_grid(args.grid or "-3:3:0.02")
    table = Table(["pair", "u", "v", "value"], metadata={**_base_meta(args), **meta, "s": s,
                                                         "grid": args.grid or "-3:3:0.02"})
    pairs = MARGINAL_PAIRS if args.pair is None else (args.pair,)
    maxima, integrals = {}, {}
    for pair in pairs:
        mg = marginal(rho, pair, g, s=s)
        maxima[pair], integrals[pair] = mg.max, mg.integral()
        for i, u in enumerate(mg.axes[0]):
            for j, v in enumerate(mg.axes[1]):
                table.rows.append([pair, float(u), float(v), float(mg.values[i, j])])
    table.metadata.update(max=maxima, integral=integrals)
    return table


def cmd_amps(args) -> Table:
    rho, meta = _two_mode(args)
    th = parse_grid(args.grid or "0:3.14159265358979:0.05")
    ph = parse_grid(args.phigrid or "0:6.28318530717958:0.05")
    surf = amps_grid(rho, th, ph)
    table = Table(["theta", "phi", "rho_JJ"], metadata={**_base_meta(args), **meta, **surf.meta,
                                                         "min": float(surf.values.min()),
                                                         "max": float(surf.values.max())})
    for i, t in enumerate(surf.theta):
        for j, f in enumerate(surf.phi):
            table.rows.append([float(t), float(f), float(surf.values[i, j])])
    return table


def cmd_fit(args) -> Table:
    rho = read_density(_req(args.input, "--input"))
    res = fit_model(rho, restarts=args.restarts, seed=args.seed, fix_q=args.fix_q)
    d = res.as_dict()
    cols = ["p", "x_re", "x_im", "abs_x", "q", "r", "rsq", "fidelity", "iterations", "converged", "unidentifiable"]
    row = [res.p, res.x.real, res.x.imag, res.abs_x, res.q, res.r, res.r**2, res.fidelity,
           res.iterations, res.converged, list(res.unidentifiable)]
    table = Table(cols, [row], metadata={**_base_meta(args), "input": args.input, "seed": args.seed,
                                         "curvature": d["curvature"], "restarts": res.restarts,
                                         "best_start": res.best_start, "vacuum_fidelity": res.vacuum_fidelity,
                                         "q_fixed": res.q_fixed})
    if not res.converged:
        emit(table, args)
        raise NumericalError("fit did not improve on the vacuum model")
    return table


def cmd_scissors(args) -> Table:
    if args.alpha is not None:
        alpha = parse_complex(args.alpha)
        target_p = abs(alpha) ** 2 / (1 + abs(alpha) ** 2)
    else:
        target_p = _req(args.p, "--p or --alpha")
        if not 0 <= target_p < 1:
            raise DomainError(f"p={target_p} must lie in [0, 1) for a finite coherent amplitude")
        alpha = complex(np.sqrt(target_p / (1 - target_p)))
    cutoff = args.cutoff or 12
    out = scissors_output(alpha, cutoff=cutoff, herald=args.herald)
    sign = 1.0 if args.herald == "d1" else -1.0
    psi = np.array([1.0, sign * alpha]) / np.sqrt(1 + abs(alpha) ** 2)
    target = np.outer(psi, psi.conj())
    fid = float(np.vdot(psi, out.state.matrix @ psi).real)
    cols = ["p", "x_re", "x_im", "success_prob", "target_fidelity"]
    row = [out.state.p, out.state.x.real, out.state.x.imag, out.success_prob, fid]
    meta = {**_base_meta(args), "alpha": alpha, "cutoff": cutoff, "herald": args.herald,
            "target": target_p, "target_matrix": [[[v.real, v.imag] for v in r] for r in target]}
    if args.n0 is not None or args.n1 is not None:
        n0, n1 = args.n0 or 0, args.n1 or 0
        mixed = dephase_mix(n0, n1, target_p)
        cols += ["mix_p", "mix_x_re", "mix_x_im"]
        row += [mixed.p, mixed.x.real, mixed.x.imag]
        meta.update(n0=n0, n1=n1)
    return Table(cols, [row], metadata=meta)


def cmd_state(args) -> Table:
    sigma = _qubit(args)
    params = channel(args)
    rho = two_mode_closed_form(sigma.p, sigma.x, params)
    if args.noise:
        rho = add_noise(rho, args.noise, seed=args.seed)
    meta = {**_base_meta(args), "p": sigma.p, "x": sigma.x, **_channel_meta(params),
            "noise": args.noise, "seed": args.seed}
    if args.out and args.format == "json":
        # density files are what `fit --input` reads
        write_density(rho.rho, args.out)
        return None
    table = Table(["row", "col", "re", "im"], metadata=meta)
    for i in range(4):
        for j in range(4):
            table.rows.append([i, j, float(rho.rho[i, j].real), float(rho.rho[i, j].imag)])
    return table


COMMANDS = {
    "potentials": cmd_potentials,
    "map": cmd_map,
    "wigner": cmd_wigner,
    "qpd": cmd_qpd,
    "marginals": cmd_marginals,
    "amps": cmd_amps,
    "fit": cmd_fit,
    "scissors": cmd_scissors,
    "state": cmd_state,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vopsnc", description="Nonclassicality potentials of vacuum-one-photon states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, help="one-photon population p")
    common.add_argument("--x", help="coherence x (complex, e.g. 0.3+0.1j; 'pure' on p scans)")
    common.add_argument("--pprime", type=float, help="photon admixture p' of sigma'(p, p')")
    common.add_argument("--q", type=float, help="dephasing rate q")
    common.add_argument("--theta", type=float, help="beam-splitter angle (r = sin(theta/2))")
    common.add_argument("--rsq", type=float, help="beam-splitter reflectance r^2")
    common.add_argument("--s", type=float, default=0.0, help="QPD order s (< 0.95)")
    common.add_argument("--grid", help="min:max:step")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cutoff", type=int, help="Fock cutoff per mode")

    helps = {
        "potentials": "potentials and regime at a point or along a grid",
        "map": "regime map over the (p, |x|) wedge",
        "wigner": "single-mode Wigner function on a grid",
        "qpd": "single-mode s-parametrized QPD on a grid",
        "marginals": "two-mode Wigner marginals",
        "amps": "angular-momentum probability surface",
        "fit": "fit the channel model to a density matrix",
        "scissors": "quantum-scissors state generation",
        "state": "write the two-mode output state (input for fit)",
    }
    subs = {name: sub.add_parser(name, parents=[common], help=h) for name, h in helps.items()}
    subs["potentials"].add_argument("--axis", choices=("p", "x", "pprime"), default="p",
                                    help="parameter swept by --grid")
    subs["map"].add_argument("--xgrid", help="min:max:step for |x| (default 0:0.5:<p step>)")
    for name in ("marginals", "amps"):
        subs[name].add_argument("--input", help="two-mode density-matrix file instead of --p/--x")
    subs["marginals"].add_argument("--pair", choices=MARGINAL_PAIRS)
    subs["amps"].add_argument("--phigrid", help="min:max:step for phi")
    subs["fit"].add_argument("--input", help="density-matrix file (JSON or CSV)")
    subs["fit"].add_argument("--restarts", type=int, default=16)
    subs["fit"].add_argument("--fix-q", dest="fix_q", type=float, help="hold q at this value")
    subs["scissors"].add_argument("--alpha", help="coherent amplitude (default from --p)")
    subs["scissors"].add_argument("--herald", choices=("d1", "d2"), default="d1")
    subs["scissors"].add_argument("--n0", type=int, help="copies of |0>+a|1> in the dephasing mixer")
    subs["scissors"].add_argument("--n1", type=int, help="copies of |0>-a|1> in the dephasing mixer")
    subs["state"].add_argument("--noise", type=float, default=0.0, help="random-state admixture epsilon")
    return parser


_VALUE_OPTS = ("--grid", "--xgrid", "--phigrid", "--x", "--alpha")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-3:3:0.1" or "-0.2+0.1j" as a flag; bind it to its option
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTS and i + 1 < len(argv) and argv[i + 1].startswith("-") and len(argv[i + 1]) > 1 \
                and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        table = COMMANDS[args.command](args)
        if table is not None:
            emit(table, args)
    except DomainError as exc:
        print(f"vopsnc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"vopsnc {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every data command writes a table as CSV (``#``-prefixed metadata lines, a
header, then rows with 17 significant digits) or JSON.  Exit status is 0 on
success, 2 for bad input and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .control import (
    ControlSpec,
    bloch_generators,
    ellipsoid_residual,
    full_generators,
    local_generator_names,
    named_generators,
    sample_manifold,
    synthesize_controller,
)
from .errors import NotRelaxingError, NumericalError, QRelaxError
from .io import SchemaError, encode_matrix, load_control, load_model, resolve_model_path
from .lindblad import build_affine, fixed_point, integrate_rk4, is_relaxing, propagate
from .operators import is_hermitian, pauli_string_basis
from .scenarios import (
    OneSpinParams,
    PulseTrain,
    entanglement_vs_J,
    one_spin_model,
    pulsed_steady_state,
    transverse_magnitude,
)

logger = logging.getLogger("qrelax")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
DEFAULT_SEED = 0
DEFAULT_MODEL = "bundled:one_spin"


@dataclass
class Table:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value) + 0.0, ".17g")
    return str(value)


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if np.isfinite(v) else None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    return value


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        doc = {"metadata": _jsonable(table.metadata), "columns": table.columns,
               "rows": _jsonable(table.rows)}
        if table.extra:
            doc.update(_jsonable(table.extra))
        return json.dumps(doc, indent=1) + "\n"
    buf = _io.StringIO()
    for key, value in table.metadata.items():
        buf.write(f"# {key}: {json.dumps(_jsonable(value))}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise SchemaError(f"expected comma-separated numbers, got {text!r}") from None


def _load(args):
    path = resolve_model_path(args.model)
    if not path.exists():
        raise SchemaError(f"model file not found: {path}", "--model")
    return load_model(path)


def _generator_set(spec: str | None, n_qubits: int):
    """``bloch`` (one qubit, X/2 Y/2 Z/2), ``local``, ``full`` or comma-separated names."""
    if spec is None:
        spec = "bloch" if n_qubits == 1 else "local"
    if spec == "bloch":
        if n_qubits != 1:
            raise SchemaError("'bloch' generators need a one-qubit model", "--generators")
        return bloch_generators(), ["ux", "uy", "uz"]
    if spec == "local":
        names = local_generator_names(n_qubits)
        return named_generators(names, n_qubits), names
    if spec == "full":
        return full_generators(n_qubits), list(pauli_string_basis(n_qubits).labels)
    names = [s.strip() for s in spec.split(",") if s.strip()]
    try:
        return named_generators(names, n_qubits), names
    except QRelaxError as exc:
        raise SchemaError(str(exc), "--generators") from None


def _control(args, model) -> ControlSpec | None:
    if getattr(args, "control", None):
        return load_control(args.control, model.n_qubits)
    u = [args.ux, args.uy, args.uz]
    if not any(u):
        return None
    if model.n_qubits != 1:
        raise SchemaError("--ux/--uy/--uz need a one-qubit model; use --control", "--ux")
    return ControlSpec(bloch_generators(), u, ("ux", "uy", "uz"))


def _controlled_rep(model, ctrl):
    if ctrl is None:
        return build_affine(model)
    return build_affine(model.with_hamiltonian(model.hamiltonian + ctrl.hamiltonian))


def _meta(args, basis=None, **params) -> dict:
    meta = {"tool": f"qrelax {__version__}", "command": args.command}
    if basis is not None:
        meta["basis"] = list(basis.labels)
    meta.update(params)
    return meta


def cmd_fixed_point(args) -> Table:
    model = _load(args)
    ctrl = _control(args, model)
    rep = _controlled_rep(model, ctrl)
    res = fixed_point(rep)
    labels = list(rep.basis.labels)
    return Table(
        labels + ["residual", "relaxing"],
        [list(res.r) + [res.residual, res.relaxing]],
        _meta(args, rep.basis, model=args.model,
              u=None if ctrl is None else list(ctrl.u)),
        {"rho": encode_matrix(res.rho)},
    )


def cmd_trajectory(args) -> Table:
    model = _load(args)
    ctrl = _control(args, model)
    rep = _controlled_rep(model, ctrl)
    r0 = np.zeros(rep.basis.size) if args.initial is None else np.array(_floats(args.initial))
    if r0.size != rep.basis.size:
        raise SchemaError(f"initial vector needs {rep.basis.size} components", "--initial")
    times = np.linspace(0.0, args.t, args.steps + 1)
    if args.method == "rk4":
        dt = args.dt or 1e-3
        rows = []
        for t in times:
            _, states = integrate_rk4(rep, r0, float(t), dt)
            rows.append([float(t)] + list(states[-1]))
    else:
        rows = [[float(t)] + list(propagate(rep, r0, float(t))) for t in times]
    return Table(["t"] + list(rep.basis.labels), rows,
                 _meta(args, rep.basis, model=args.model, method=args.method, t=args.t,
                       steps=args.steps, initial=list(r0)))


def cmd_synthesize(args) -> Table:
    model = _load(args)
    gens, names = _generator_set(args.generators, model.n_qubits)
    target = _floats(args.target)
    res = synthesize_controller(model, gens, target)
    achieved = res.achieved_fixed_point
    err = float("nan") if achieved is None else float(np.max(np.abs(achieved.r - np.asarray(target))))
    return Table(
        names + ["residual", "stabilizable", "achieved_error"],
        [list(res.u) + [res.residual, res.stabilizable, err]],
        _meta(args, pauli_string_basis(model.n_qubits), model=args.model, target=target),
    )


def cmd_manifold_sample(args) -> Table:
    model = _load(args)
    gens, names = _generator_set(args.generators, model.n_qubits)
    sample = sample_manifold(model, gens, args.samples, args.scale, args.seed)
    basis = pauli_string_basis(model.n_qubits)
    rows = []
    for k, (u, res) in enumerate(zip(sample.controls, sample.results)):
        rows.append([k] + list(u) + list(res.r) + [float(np.linalg.eigvalsh(res.rho)[0])])
    return Table(["sample"] + names + list(basis.labels) + ["min_eigenvalue"], rows,
                 _meta(args, basis, model=args.model, samples=args.samples, scale=args.scale,
                       seed=args.seed, skipped=sample.n_skipped))


def cmd_ellipsoid(args) -> Table:
    params = OneSpinParams(args.gamma1, args.gamma2)
    model = one_spin_model(params)
    sample = sample_manifold(model, bloch_generators(), args.samples, args.scale, args.seed)
    rows = []
    for u, res in zip(sample.controls, sample.results):
        rows.append(list(u) + list(res.r) + [ellipsoid_residual(res.r, params.gamma1, params.gamma2)])
    return Table(["ux", "uy", "uz", "X", "Y", "Z", "ellipsoid_residual"], rows,
                 _meta(args, pauli_string_basis(1), gamma1=params.gamma1, gamma2=params.gamma2,
                       samples=args.samples, scale=args.scale, seed=args.seed,
                       skipped=sample.n_skipped))


def cmd_sweep_entanglement(args) -> Table:
    grid = np.geomspace(args.j_min, args.j_max, args.points)
    rows = [[r.J, r.eof, r.concurrence, r.fidelity_to_rho_e, r.ok]
            for r in entanglement_vs_J(args.gamma, grid)]
    return Table(["J", "eof", "concurrence", "fidelity_to_rho_e", "ok"], rows,
                 _meta(args, gamma=args.gamma, j_min=args.j_min, j_max=args.j_max,
                       points=args.points))


def cmd_pulsed(args) -> Table:
    if args.model:
        model = _load(args)
    else:
        model = one_spin_model(OneSpinParams(args.gamma1, args.gamma2))
    ctrl = _control(args, model)
    if ctrl is None:
        if model.n_qubits == 1:
            ctrl = ControlSpec(bloch_generators(), (0.0, 0.0, 0.0))
        else:
            raise SchemaError("pulsed runs on multi-qubit models need --control", "--control")
    r = pulsed_steady_state(model, PulseTrain(ctrl.u, args.dt, ctrl.generators))
    basis = pauli_string_basis(model.n_qubits)
    cols = list(basis.labels)
    row = list(r)
    if model.n_qubits == 1:
        cols.append("transverse")
        row.append(transverse_magnitude(r))
    return Table(cols, [row], _meta(args, basis, model=args.model or "one_spin",
                                    gamma1=args.gamma1, gamma2=args.gamma2, dt=args.dt,
                                    u=list(ctrl.u)))


def _complex_text(z: complex) -> str:
    z = complex(round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0)
    if z.imag == 0:
        return format(z.real, "g")
    return format(z.real, "g") + format(z.imag, "+g") + "j"


def cmd_validate(args) -> int:
    model = _load(args)
    rep = build_affine(model)
    check = is_relaxing(rep)
    spectrum = sorted(check.spectrum, key=lambda z: (round(z.real, 10), round(z.imag, 10)))
    report = {
        "model": args.model,
        "n_qubits": model.n_qubits,
        "hermitian": is_hermitian(model.hamiltonian),
        "relaxing": check.relaxing,
        "spectral_abscissa": check.spectral_abscissa,
        "condition_number": check.condition_number,
        "spectrum": [_complex_text(z) for z in spectrum],
        "fixed_point": None,
    }
    if check.relaxing:
        report["fixed_point"] = dict(zip(rep.basis.labels, fixed_point(rep).r))
    if args.format == "json":
        _emit(json.dumps(_jsonable(report), indent=1) + "\n", args.output)
        return EXIT_OK
    lines = [
        f"model: {args.model}",
        f"n_qubits: {model.n_qubits}",
        f"hermitian: {str(report['hermitian']).lower()}",
        f"relaxing: {str(check.relaxing).lower()}",
        f"spectrum: {', '.join(report['spectrum'])}",
        f"spectral_abscissa: {_fmt(check.spectral_abscissa)}",
        f"condition_number: {_fmt(check.condition_number)}",
    ]
    if report["fixed_point"] is not None:
        lines.append("fixed_point: " + ", ".join(f"{k}={_fmt(v)}" for k, v in report["fixed_point"].items()))
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


COMMANDS = {
    "fixed-point": cmd_fixed_point,
    "trajectory": cmd_trajectory,
    "synthesize": cmd_synthesize,
    "manifold-sample": cmd_manifold_sample,
    "ellipsoid": cmd_ellipsoid,
    "sweep-entanglement": cmd_sweep_entanglement,
    "pulsed": cmd_pulsed,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrelax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qrelax {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default=None,
                        help="model JSON file or bundled:<one_spin|two_spin|dephasing>")
    common.add_argument("--output", "-o", default="-", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    controls = argparse.ArgumentParser(add_help=False)
    controls.add_argument("--ux", type=float, default=0.0)
    controls.add_argument("--uy", type=float, default=0.0)
    controls.add_argument("--uz", type=float, default=0.0)
    controls.add_argument("--control", help="ControlSpec JSON file")

    one_spin = argparse.ArgumentParser(add_help=False)
    one_spin.add_argument("--gamma1", type=float, default=1.0)
    one_spin.add_argument("--gamma2", type=float, default=1.0)

    sub.add_parser("fixed-point", parents=[common, controls], help="stabilized fixed point")

    p = sub.add_parser("trajectory", parents=[common, controls], help="relaxation trajectory")
    p.add_argument("--t", type=float, default=5.0)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--dt", type=float, default=None, help="RK4 step (method rk4)")
    p.add_argument("--method", choices=("expm", "rk4"), default="expm")
    p.add_argument("--initial", help="comma-separated initial coherence vector (default 0)")

    p = sub.add_parser("synthesize", parents=[common], help="controls for a target state")
    p.add_argument("--target", required=True, help="comma-separated target coherence vector")
    p.add_argument("--generators", help="bloch | local | full | comma-separated names")

    p = sub.add_parser("manifold-sample", parents=[common], help="random stabilizable states")
    p.add_argument("--generators")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--scale", type=float, default=2.0)

    p = sub.add_parser("ellipsoid", parents=[common, one_spin], help="one-spin stabilizable ellipsoid")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--scale", type=float, default=3.0)

    p = sub.add_parser("sweep-entanglement", parents=[common], help="two-spin entanglement vs J")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--j-min", type=float, default=1e-2)
    p.add_argument("--j-max", type=float, default=1e4)
    p.add_argument("--points", type=int, default=25)

    p = sub.add_parser("pulsed", parents=[common, controls, one_spin], help="stroboscopic steady state")
    p.add_argument("--dt", type=float, default=0.01)

    sub.add_parser("validate", parents=[common], help="check a model file")
    return parser


def _emit(text: str, output: str) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", newline="") as fh:
            fh.write(text)


def _fail(exc: Exception, code: int) -> int:
    doc = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, SchemaError) and exc.path:
        doc["path"] = exc.path
    if isinstance(exc, NotRelaxingError) and exc.spectrum is not None:
        doc["spectrum"] = [_complex_text(z) for z in exc.spectrum]
    sys.stderr.write(json.dumps(doc) + "\n")
    return code


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.model is None and args.command not in ("ellipsoid", "sweep-entanglement", "pulsed"):
        args.model = DEFAULT_MODEL
    try:
        if args.command == "validate":
            return cmd_validate(args)
        table = COMMANDS[args.command](args)
        _emit(render(table, args.format), args.output)
        return EXIT_OK
    except NumericalError as exc:
        return _fail(exc, EXIT_NUMERIC)
    except (QRelaxError, OSError) as exc:
        return _fail(exc, EXIT_USAGE)


def main(argv=None) -> None:
    level = getattr(logging, os.environ.get("RELAX_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

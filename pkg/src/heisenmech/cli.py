"""Command-line front end: simulate, reduce, check, kk-compare, mr-check.

Every subcommand reads a flat dotted-key config file, runs deterministically
from a seed, and writes a JSON invariant report (plus a trajectory CSV where
there is a flow to record). Exit codes: 0 when every reported check passed,
1 when at least one failed, 2 for config or usage problems, 3 for numerical
failures such as non-convergent steps, singular forms, or invariance and
level-set violations.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from . import magnetic as mag
from .checks import CHECKS, run_named_checks
from .config import ExperimentConfig
from .errors import (
    ConfigError,
    ControlSubsetMissing,
    IrregularLevel,
    MissingPotential,
    NonConvergence,
    NotInvariant,
    NotOnLevelSet,
    SingularForm,
)
from .group import CoAlgebraElement, GroupElement
from .reduction import (
    CheckRecord,
    DiffeoSpec,
    check_commutation,
    check_mr1,
    check_mr2_equivariance,
    check_mr3_matching,
    integrate_reduced,
    kaluza_klein_system,
    kk_alpha_form_check,
    kk_reduce_and_compare,
    reduce_system,
)
from .report import InvariantReport

__all__ = ["main"]

_NUMERICAL_ERRORS = (NonConvergence, SingularForm, NotInvariant,
                     IrregularLevel, NotOnLevelSet, MissingPotential,
                     ControlSubsetMissing, FloatingPointError,
                     np.linalg.LinAlgError)

_STATE_KEYS = ("state.q1", "state.q2", "state.q3",
               "state.p1", "state.p2", "state.p3")


def build_field(cfg: ExperimentConfig, charge_factor: float,
                prefix: str = "field") -> mag.MagneticField:
    """Magnetic field from a config block: zero, constant, linear, invariant."""
    kinds = ("zero", "constant", "linear", "invariant")
    if prefix != "field":
        kinds = ("zero", "constant", "invariant")
    kind = cfg.string(prefix + ".kind", default="zero", choices=kinds)
    if kind == "zero":
        return mag.MagneticField.zero(charge_factor)
    if kind == "constant":
        b = np.zeros((3, 3))
        b[0, 1] = cfg.real(prefix + ".b12", default=0.0)
        b[0, 2] = cfg.real(prefix + ".b13", default=0.0)
        b[1, 2] = cfg.real(prefix + ".b23", default=0.0)
        b -= b.T
        return mag.MagneticField.constant(b, charge_factor)
    if kind == "linear":
        coeff = np.array([[cfg.real(f"{prefix}.m{i}{j}", default=0.0)
                           for j in (1, 2, 3)] for i in (1, 2, 3)])
        return mag.MagneticField.linear_potential(coeff, charge_factor)
    a = tuple(cfg.real(f"{prefix}.a{i}", default=0.0) for i in (1, 2, 3))
    return mag.MagneticField.invariant_potential(a, charge_factor)


def potential_jacobian(cfg: ExperimentConfig, prefix: str = "field"):
    """Analytic derivative matrix of the configured vector potential, if any."""
    kind = cfg.string(prefix + ".kind", default="zero")
    if kind == "linear":
        coeff = np.array([[cfg.real(f"{prefix}.m{i}{j}", default=0.0)
                           for j in (1, 2, 3)] for i in (1, 2, 3)])
        return lambda q: coeff
    if kind == "invariant":
        a3 = cfg.real(prefix + ".a3", default=0.0)
        da = np.array([[0.0, 0.5 * a3, 0.0], [-0.5 * a3, 0.0, 0.0],
                       [0.0, 0.0, 0.0]])
        return lambda q: da
    if kind == "zero":
        zero = np.zeros((3, 3))
        return lambda q: zero
    return None


def _body_scaling_map(factor: float, lam_factor: float) -> dyn.FiberMap:
    """Fiber map scaling the planar body momentum; equivariant by design."""

    def apply(s):
        s = np.asarray(s, dtype=float)
        g, rho = mag.chart_to_body(s[:3], s[3:6])
        _, p = mag.body_to_chart(g, CoAlgebraElement(factor * rho.mu, rho.nu))
        out = s.copy()
        out[3:6] = p
        out[6 + (s.size - 6) // 2:] *= lam_factor
        return out

    return dyn.FiberMap(apply=apply)


def _constant_push_map(delta: np.ndarray) -> dyn.FiberMap:
    delta = np.asarray(delta, dtype=float)

    def apply(s):
        out = np.asarray(s, dtype=float).copy()
        out[3:6] += delta
        return out

    return dyn.FiberMap(apply=apply)


def build_force(cfg: ExperimentConfig,
                prefix: str = "force") -> dyn.FiberMap | None:
    kind = cfg.string(prefix + ".kind", default="none",
                      choices=("none", "body_scaling"))
    if kind == "none":
        return None
    return _body_scaling_map(cfg.real(prefix + ".factor", default=1.0),
                             cfg.real(prefix + ".lambda_factor", default=1.0))


def build_control(cfg: ExperimentConfig,
                  k: int) -> tuple[dyn.FiberMap | None, dyn.ControlSubset | None]:
    kind = cfg.string("control.kind", default="none",
                      choices=("none", "constant_push"))
    control = None
    if kind == "constant_push":
        if k != 0:
            raise ConfigError(
                f"{cfg.source}: field 'control.kind' supports system.k = 0 only")
        delta = [cfg.real(f"control.p{i}", default=0.0) for i in (1, 2, 3)]
        control = _constant_push_map(np.array(delta))
    subset_kind = cfg.string("control.subset", default="none",
                             choices=("none", "zero", "full"))
    subset = None
    if subset_kind == "zero":
        subset = dyn.ControlSubset(np.zeros(3 + k), np.zeros((0, 3 + k)))
    elif subset_kind == "full":
        subset = dyn.ControlSubset(np.zeros(3 + k), np.eye(3 + k))
    return control, subset


def build_system(cfg: ExperimentConfig, field_prefix: str = "field",
                 force_prefix: str = "force") -> dyn.RCHSystem:
    """Controlled system from the system/field/force/control config blocks."""
    m = cfg.real("system.mass", default=1.0, positive=True)
    e = cfg.real("system.charge", default=1.0)
    c = cfg.real("system.light_speed", default=1.0, positive=True)
    k = cfg.integer("system.k", default=0, minimum=0)
    metric = cfg.string("system.metric", default="euclidean",
                        choices=("euclidean", "invariant"))
    field = build_field(cfg, e / c, field_prefix)
    if metric == "euclidean":
        hamiltonian = dyn.euclidean_kinetic_hamiltonian(m, k)
    else:
        hamiltonian = dyn.invariant_kinetic_hamiltonian(m, k)
    control, subset = build_control(cfg, k)
    return dyn.RCHSystem(field, hamiltonian, force=build_force(cfg, force_prefix),
                         control=control, control_subset=subset,
                         m=m, e=e, c=c, k=k)


def build_state(cfg: ExperimentConfig) -> np.ndarray:
    return np.array([cfg.real(key, default=0.0) for key in _STATE_KEYS])


def build_level(cfg: ExperimentConfig,
                prefix: str = "level") -> CoAlgebraElement:
    return CoAlgebraElement((cfg.real(prefix + ".mu1"),
                             cfg.real(prefix + ".mu2")),
                            cfg.real(prefix + ".nu"))


def build_diffeo(cfg: ExperimentConfig) -> DiffeoSpec:
    kind = cfg.string("diffeo.kind", default="identity",
                      choices=("identity", "translation", "shear"))
    if kind == "identity":
        return DiffeoSpec.identity()
    if kind == "translation":
        h = GroupElement((cfg.real("diffeo.u1", default=0.0),
                          cfg.real("diffeo.u2", default=0.0)),
                         cfg.real("diffeo.alpha", default=0.0))
        return DiffeoSpec.group_translation(h)

    # A deliberately broken lift: identity base with a fiber shear. Useful as
    # a negative fixture because it fails the symplecticity check without
    # being rejected at construction time.
    def ident(q):
        return np.asarray(q, dtype=float).copy()

    def shear_lift(s):
        out = np.asarray(s, dtype=float).copy()
        out[3] += out[1]
        return out

    def shear_inverse(s):
        out = np.asarray(s, dtype=float).copy()
        out[3] -= out[1]
        return out

    return DiffeoSpec(ident, ident, lift=shear_lift,
                      lift_inverse=shear_inverse, verify_lift=False)


def _run_settings(cfg: ExperimentConfig) -> tuple[float, float, str]:
    return (cfg.real("run.t_end", default=1.0, positive=True),
            cfg.real("run.step", default=1e-3, positive=True),
            cfg.string("run.method", default="midpoint",
                       choices=("midpoint", "rk4")))


def _write_csv(path: Path, header: list[str], rows: np.ndarray) -> None:
    with open(path, "w") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(repr(float(value)) for value in row) + "\n")


def _drift_record(name: str, values: np.ndarray,
                  threshold: float = 1e-8) -> CheckRecord:
    """Worst deviation from the initial value, relative above unit scale."""
    start = values[0] if values.ndim == 1 else values[0, :]
    drift = float(np.max(np.abs(values - start)))
    scale = float(np.max(np.abs(np.atleast_1d(start))))
    return CheckRecord(name, int(values.shape[0]), drift / max(1.0, scale),
                       threshold)


def cmd_simulate(cfg: ExperimentConfig, out_dir: Path,
                 seed: int) -> InvariantReport:
    if cfg.integer("system.k", default=0, minimum=0) != 0:
        raise ConfigError(
            f"{cfg.source}: field 'system.k' must be 0 for simulate")
    sys_ = build_system(cfg)
    t_end, h, method = _run_settings(cfg)
    traj = dyn.integrate(sys_, build_state(cfg), t_end, h, method)
    name = cfg.string("output.trajectory", default="trajectory.csv")
    rows = np.column_stack([traj.times, traj.states, traj.energies,
                            traj.momenta])
    _write_csv(out_dir / name,
               ["t", "q1", "q2", "q3", "p1", "p2", "p3", "H", "J1", "J2", "J3"],
               rows)
    records = [_drift_record("simulate.energy_drift", traj.energies)]
    # The momentum columns are diagnostics for any system; the conservation
    # record only makes sense when the metric is the invariant one, since the
    # chart kinetic energy is not symmetric under the group action.
    invariant = cfg.string("system.metric", default="euclidean") == "invariant"
    if invariant and np.all(np.isfinite(traj.momenta)):
        records.append(_drift_record("simulate.momentum_drift", traj.momenta))
    return InvariantReport(seed, records, {"trajectory": name})


def cmd_reduce(cfg: ExperimentConfig, out_dir: Path,
               seed: int) -> InvariantReport:
    sys_ = build_system(cfg)
    level = build_level(cfg)
    red = reduce_system(sys_, level)
    if any(cfg.has(key) for key in _STATE_KEYS):
        if sys_.k != 0:
            raise ConfigError(f"{cfg.source}: explicit state.* start needs "
                              "system.k = 0")
        start = mag.extended_from_chart(build_state(cfg), 0)
        z0 = mag.reduce_point(start, level, sys_.field)
    else:
        rng = np.random.default_rng(seed)
        sample = mag.sample_level_point(level, sys_.field, sys_.k, rng)
        z0 = mag.reduce_point(sample, level, sys_.field)
    t_end, h, method = _run_settings(cfg)
    times, charts, energies = integrate_reduced(red, z0, t_end, h, method)
    k = sys_.k
    header = (["t", "rho1", "rho2", "nu"]
              + [f"theta{i + 1}" for i in range(k)]
              + [f"lambda{i + 1}" for i in range(k)] + ["h"])
    rows = np.column_stack([times, charts[:, :2],
                            np.full(times.size, level.nu),
                            charts[:, 2:], energies])
    name = cfg.string("output.trajectory", default="reduced.csv")
    _write_csv(out_dir / name, header, rows)
    samples = cfg.integer("check.samples", default=50, minimum=1)
    records = [_drift_record("reduce.energy_drift", energies),
               check_commutation(sys_, red, samples=samples, seed=seed)]
    return InvariantReport(seed, records, {"trajectory": name})


def cmd_check(cfg: ExperimentConfig, seed: int,
              run_all: bool) -> InvariantReport:
    names = list(CHECKS) if run_all else cfg.names("check.names")
    samples = (cfg.integer("check.samples", minimum=1)
               if cfg.has("check.samples") else None)
    return InvariantReport(seed, run_named_checks(names, seed, samples))


def cmd_kk_compare(cfg: ExperimentConfig, seed: int) -> InvariantReport:
    m = cfg.real("system.mass", default=1.0, positive=True)
    mu = cfg.real("kk.mu", default=1.0)
    kk = kaluza_klein_system(build_field(cfg, 1.0), m=m, mu=mu,
                             potential_jacobian=potential_jacobian(cfg))
    state = build_state(cfg)
    x0 = mag.PhasePoint(state[:3], state[3:6])
    samples = cfg.integer("check.samples", default=20, minimum=1)
    records = [kk_alpha_form_check(kk, samples=samples, seed=seed)]
    records.extend(kk_reduce_and_compare(
        kk, x0, t_end=cfg.real("kk.t_end", default=1.0, positive=True),
        h=cfg.real("kk.step", default=1e-3, positive=True)))
    return InvariantReport(seed, records)


def cmd_mr_check(cfg: ExperimentConfig, seed: int) -> InvariantReport:
    which = cfg.string("mr.check", choices=("mr1", "mr2", "mr3"))
    charge_factor = (cfg.real("system.charge", default=1.0)
                     / cfg.real("system.light_speed", default=1.0,
                                positive=True))
    field1 = build_field(cfg, charge_factor, "field")
    field2 = (build_field(cfg, charge_factor, "field2")
              if cfg.has("field2.kind") else field1)
    phi = build_diffeo(cfg)
    if which == "mr1":
        samples = cfg.integer("mr.samples", default=100, minimum=1)
        return InvariantReport(seed, [check_mr1(phi, field1, field2,
                                                samples=samples, seed=seed)])
    if which == "mr2":
        level1 = build_level(cfg)
        level2 = (build_level(cfg, "level2")
                  if cfg.has("level2.nu") else level1)
        samples = cfg.integer("mr.samples", default=50, minimum=1)
        return InvariantReport(seed, check_mr2_equivariance(
            phi, level1, level2, field1, field2, samples=samples, seed=seed))
    sys1 = build_system(cfg, "field", "force")
    if sys1.control_subset is None:
        raise ConfigError(f"{cfg.source}: mr3 needs field 'control.subset' "
                          "set to 'zero' or 'full'")
    sys2 = dyn.RCHSystem(field2, sys1.hamiltonian,
                         force=build_force(cfg, "force2"),
                         m=sys1.m, e=sys1.e, c=sys1.c, k=sys1.k)
    samples = cfg.integer("mr.samples", default=40, minimum=1)
    return InvariantReport(seed, check_mr3_matching(sys1, sys2, phi,
                                                    samples=samples,
                                                    seed=seed))


def _seed_value(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {raw!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit "
                                         "integer")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heisenmech",
        description="Heisenberg-group mechanics: flows, reduction, and "
                    "invariant checks")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "simulate": "integrate a controlled system and record the trajectory",
        "reduce": "drop an invariant system to its coadjoint orbit and flow it",
        "check": "run named invariant checks from the registry",
        "kk-compare": "compare the circle-bundle geodesic flow with the "
                      "magnetic flow",
        "mr-check": "evaluate one of the matching and equivalence conditions",
    }
    for name, help_text in commands.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True,
                         help="path to a dotted-key config file")
        cmd.add_argument("--out", default=".",
                         help="output directory (created if missing)")
        cmd.add_argument("--seed", type=_seed_value, default=None,
                         help="override run.seed from the config")
        if name == "check":
            cmd.add_argument("--all", action="store_true",
                             help="run the full check registry")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = ExperimentConfig.from_path(args.config)
        seed = (args.seed if args.seed is not None
                else cfg.integer("run.seed", default=0, minimum=0))
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            report = cmd_simulate(cfg, out_dir, seed)
        elif args.command == "reduce":
            report = cmd_reduce(cfg, out_dir, seed)
        elif args.command == "check":
            report = cmd_check(cfg, seed, args.all)
        elif args.command == "kk-compare":
            report = cmd_kk_compare(cfg, seed)
        else:
            report = cmd_mr_check(cfg, seed)
        report_path = out_dir / cfg.string("output.report",
                                           default="report.json")
        report_path.write_text(report.to_json())
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NonConvergence as exc:
        print(f"numerical failure: {exc} (step {exc.step_index})",
              file=sys.stderr)
        return 3
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3
    for record in report.checks:
        status = "PASS" if record.passed else "FAIL"
        print(f"{status} {record.name}: max residual {record.max_residual:.3e}"
              f" (threshold {record.threshold:.1e}, samples {record.samples})")
    print(f"report: {report_path}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())

"""Acceptance sweep: one test per shipped guarantee, at the advertised
tolerances. Each test prints a single pass/fail line so the suite output
doubles as a checklist."""

import dataclasses
import json

import numpy as np

from heisenmech import connection as C
from heisenmech import dynamics as D
from heisenmech import magnetic as M
from heisenmech import reduction as R
from heisenmech.checks import run_named_checks
from heisenmech.cli import main
from heisenmech.group import AlgebraElement, CoAlgebraElement, GroupElement
from heisenmech.orbit import MagneticCocycle, OrbitFunction

import heisenmech

from pathlib import Path

SEED = 20260814
CONFIGS = Path(heisenmech.__file__).parent / "configs"


def by_name(records):
    return {record.name: record for record in records}


def finish(number, detail, bounds, extra_ok=True):
    """Print one checklist line, then fail the test if any bound is broken."""
    ok = extra_ok and all(residual <= tol for residual, tol in bounds)
    worst = max((residual / tol for residual, tol in bounds), default=0.0)
    status = "PASS" if ok else "FAIL"
    print(f"criterion {number:02d} {status}: {detail} "
          f"(worst residual at {worst:.2e} of its bound)")
    assert ok, f"criterion {number:02d}: {detail}"


def test_criterion_01():
    recs = by_name(run_named_checks(["group_axioms"], SEED, samples=1000))
    names = ("group.associativity", "group.inverse", "group.identity",
             "group.matrix_homomorphism")
    assert all(recs[n].samples == 1000 for n in names)
    finish(1, "group axioms and the matrix model on 1000 samples, 1e-12",
           [(recs[n].max_residual, 1e-12) for n in names])


def test_criterion_02():
    recs = by_name(run_named_checks(["representations"], SEED, samples=1000))
    assert recs["representation.pairing"].samples == 1000
    finish(2, "adjoint and dual representations against finite differences",
           [(recs["representation.adjoint_fd"].max_residual, 1e-8),
            (recs["representation.coadjoint_fd"].max_residual, 1e-8),
            (recs["representation.pairing"].max_residual, 1e-12)])


def test_criterion_03():
    recs = by_name(run_named_checks(["bracket"], SEED))
    finish(3, "twisted bracket axioms and the plain-bracket oracle",
           [(recs["bracket.antisymmetry"].max_residual, 1e-12),
            (recs["bracket.leibniz"].max_residual, 1e-8),
            (recs["bracket.jacobi"].max_residual, 1e-9),
            (recs["bracket.plain_oracle"].max_residual, 1e-10)])


def test_criterion_04():
    recs = by_name(run_named_checks(["orbit_form"], SEED))
    classification_exact = recs["orbit.classification"].max_residual == 0.0
    finish(4, "orbit two-form values, determinant, and classification",
           [(recs["orbit.form_matches_bracket"].max_residual, 1e-10),
            (recs["orbit.determinant"].max_residual, 1e-10)],
           extra_ok=classification_exact)


def test_criterion_05():
    recs = by_name(run_named_checks(["connection"], SEED))
    rng = np.random.default_rng(SEED)
    basis = [AlgebraElement((1.0, 0.0), 0.0), AlgebraElement((0.0, 1.0), 0.0),
             AlgebraElement((0.0, 0.0), 1.0)]
    exact = True
    for _ in range(20):
        g = GroupElement(rng.normal(size=2), rng.normal())
        nu = rng.normal()
        form = MagneticCocycle.planar(nu).form
        for i, v in enumerate(basis):
            for j, w in enumerate(basis):
                exact &= C.nu_component(nu, g, v, w) == form[i, j]
    finish(5, "connection invariance, pairing, curvature, and the cocycle",
           [(recs["connection.right_invariance"].max_residual, 1e-12),
            (recs["connection.trivialized_pairing"].max_residual, 1e-12),
            (recs["connection.curvature_fd"].max_residual, 1e-6)],
           extra_ok=exact)


def test_criterion_06():
    recs = by_name(run_named_checks(["dynamics"], SEED, samples=1000))
    assert recs["dynamics.defining_equation"].samples == 1000
    finish(6, "field equation, analytic period, drift, and symplecticity",
           [(recs["dynamics.defining_equation"].max_residual, 1e-9),
            (recs["dynamics.period_return"].max_residual, 1e-5),
            (recs["dynamics.energy_drift"].max_residual, 1e-8),
            (recs["dynamics.symplectic_jacobian"].max_residual, 1e-6)])


def test_criterion_07():
    recs = by_name(run_named_checks(["momentum_shift"], SEED, samples=1000))
    finish(7, "momentum shift identity, form pullback, flow conjugation",
           [(recs["shift.hamiltonian_identity"].max_residual, 1e-12),
            (recs["shift.form_pullback"].max_residual, 1e-6),
            (recs["shift.flow_conjugation"].max_residual, 1e-8)])


def test_criterion_08():
    recs = by_name(run_named_checks(["noether_reduction"], SEED, samples=100))
    assert recs["reduction.commutation"].samples == 100

    field = M.MagneticField.invariant_potential((0.3, -0.2, 0.8), 1.0)
    sys = D.RCHSystem(field, D.invariant_kinetic_hamiltonian(1.0), m=1.0)
    red = R.reduce_system(sys, CoAlgebraElement((0.4, -0.7), 1.0))
    h = red.hamiltonian
    broken = dataclasses.replace(
        red, hamiltonian=OrbitFunction(evaluate=lambda z: 2.0 * h.evaluate(z)))
    negative = R.check_commutation(sys, broken, samples=50, seed=SEED)
    finish(8, "momentum conservation, reduced form, commutation + control",
           [(recs["noether.momentum_drift"].max_residual, 1e-8),
            (recs["reduction.form_pullback"].max_residual, 1e-5),
            (recs["reduction.commutation"].max_residual, 1e-5)],
           extra_ok=negative.max_residual >= 1e-2)


def test_criterion_09():
    recs = by_name(run_named_checks(["kaluza_klein"], SEED))
    finish(9, "circle-bundle detour: fiber momentum, coupled form, match",
           [(recs["kk.lambda_drift"].max_residual, 1e-8),
            (recs["kk.alpha_form"].max_residual, 1e-6),
            (recs["kk.trajectory_match"].max_residual, 1e-6)])


def test_criterion_10(tmp_path):
    recs = by_name(run_named_checks(["mr_identity"], SEED))
    names = ("mr1.symplectic", "mr2.level", "mr2.isotropy",
             "mr3.vertical", "mr3.horizontal")
    negatives_ok = True
    for fixture, failing in (("mr1_shear.cfg", "mr1.symplectic"),
                             ("mr2_level_mismatch.cfg", "mr2.level"),
                             ("mr3_zero_control.cfg", "mr3.vertical")):
        out = tmp_path / fixture.replace(".cfg", "")
        code = main(["mr-check", "--config", str(CONFIGS / fixture),
                     "--out", str(out)])
        payload = json.loads((out / "report.json").read_text())
        failed = {r["name"]: r for r in payload["checks"]}[failing]
        negatives_ok &= code != 0 and failed["max_residual"] >= 1e-2
    finish(10, "equivalence checkers: identity passes, spoilers all fail",
           [(recs[n].max_residual, 1e-10) for n in names],
           extra_ok=negatives_ok)


def test_criterion_11(tmp_path):
    cfg = tmp_path / "all.cfg"
    cfg.write_text("# default samples for every registered check\n")
    reports = []
    for run in ("first", "second"):
        out = tmp_path / run
        code = main(["check", "--all", "--config", str(cfg),
                     "--out", str(out), "--seed", str(SEED)])
        assert code == 0
        reports.append((out / "report.json").read_bytes())
    finish(11, "full check sweep is byte-identical across two runs",
           [], extra_ok=reports[0] == reports[1])

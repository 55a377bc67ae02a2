"""Bracket, orbit classification, and orbit-form tests with frozen values."""

import numpy as np
import pytest

from heisenmech import orbit as O
from heisenmech.errors import DegenerateForm, SingularForm
from heisenmech.group import AlgebraElement, CoAlgebraElement, GroupElement, bracket, coadjoint, pairing

MU1 = O.coordinate_function(0)
MU2 = O.coordinate_function(1)
NU = O.coordinate_function(2)


def rand_dual(rng, scale=2.0):
    return CoAlgebraElement(rng.uniform(-scale, scale, 2), rng.uniform(-scale, scale))


def quadratic_function(Q):
    Q = np.asarray(Q, dtype=float)
    Qs = 0.5 * (Q + Q.T)
    return O.DualFunction(
        evaluate=lambda p: 0.5 * float(p.as_array() @ Qs @ p.as_array()),
        gradient=lambda p: AlgebraElement((Qs @ p.as_array())[:2], (Qs @ p.as_array())[2]),
        hessian=lambda p: Qs,
    )


def test_bracket_frozen_value():
    rng = np.random.default_rng(20)
    for _ in range(20):
        p = rand_dual(rng)
        b = rng.normal()
        out = O.magnetic_lie_poisson(MU1, MU2, p, O.MagneticCocycle.planar(b), "minus")
        assert abs(out - (-p.nu - b)) <= 1e-12


def test_bracket_antisymmetry_and_self():
    rng = np.random.default_rng(21)
    fs = [MU1, MU2, NU, quadratic_function(np.diag([1.0, 2.0, 3.0]))]
    for _ in range(50):
        p = rand_dual(rng)
        B = O.MagneticCocycle.planar(rng.normal())
        for f in fs:
            for g in fs:
                fg = O.magnetic_lie_poisson(f, g, p, B)
                gf = O.magnetic_lie_poisson(g, f, p, B)
                assert abs(fg + gf) <= 1e-12
            assert abs(O.magnetic_lie_poisson(f, f, p, B)) <= 1e-12


def test_plain_bracket_oracle():
    # Independent formula for the unmagnetized bracket of the Heisenberg
    # coalgebra: {f,g}(p) = sign * nu * area(df_plane, dg_plane).
    rng = np.random.default_rng(22)
    fs = [MU1, MU2, NU,
          quadratic_function(rng.normal(size=(3, 3))),
          quadratic_function(rng.normal(size=(3, 3)))]
    B0 = O.MagneticCocycle.zero()
    for _ in range(100):
        p = rand_dual(rng)
        f, g = rng.choice(len(fs), 2)
        f, g = fs[f], fs[g]
        for sign, s in (("minus", -1.0), ("plus", 1.0)):
            df, dg = f.grad(p).as_array(), g.grad(p).as_array()
            expected = s * p.nu * (df[0] * dg[1] - df[1] * dg[0])
            got = O.magnetic_lie_poisson(f, g, p, B0, sign)
            assert abs(got - expected) <= 1e-10


def test_leibniz_rule():
    rng = np.random.default_rng(23)
    f = quadratic_function(np.diag([1.0, -1.0, 2.0]))
    g = O.linear_function(AlgebraElement((0.5, -2.0), 1.0))
    h = quadratic_function([[0, 1, 0], [1, 0, 0], [0, 0, 1.0]])
    for _ in range(50):
        p = rand_dual(rng)
        B = O.MagneticCocycle.planar(rng.normal())
        lhs = O.magnetic_lie_poisson(O.product_function(f, g), h, p, B)
        rhs = (f.evaluate(p) * O.magnetic_lie_poisson(g, h, p, B)
               + g.evaluate(p) * O.magnetic_lie_poisson(f, h, p, B))
        assert abs(lhs - rhs) <= 1e-8


def test_nu_is_casimir_of_plain_bracket():
    rng = np.random.default_rng(24)
    B0 = O.MagneticCocycle.zero()
    fs = [MU1, MU2, quadratic_function(np.eye(3))]
    for _ in range(50):
        p = rand_dual(rng)
        for f in fs:
            assert abs(O.magnetic_lie_poisson(f, NU, p, B0)) <= 1e-12


def test_jacobi_coordinate_and_quadratic():
    rng = np.random.default_rng(25)
    quads = [quadratic_function(rng.normal(size=(3, 3))) for _ in range(3)]
    for _ in range(100):
        p = rand_dual(rng)
        B = O.MagneticCocycle.planar(rng.normal())
        res = O.check_jacobi((MU1, MU2, NU), p, B)
        assert res.tolerance == 1e-9 and res.residual <= 1e-9
        res = O.check_jacobi(quads, p, B)
        assert res.residual <= 1e-9


def test_jacobi_repeated_function_is_exact_zero():
    p = CoAlgebraElement((0.3, -1.2), 0.7)
    res = O.check_jacobi((MU1, MU1, NU), p, O.MagneticCocycle.planar(0.4))
    assert res.residual <= 1e-12


def test_jacobi_degraded_tolerance_for_fd_gradients():
    fd_fun = O.DualFunction(evaluate=lambda p: float(np.sin(p.mu[0]) + p.nu ** 2))
    p = CoAlgebraElement((0.2, 0.1), 0.5)
    res = O.check_jacobi((fd_fun, MU2, NU), p, O.MagneticCocycle.zero())
    assert res.tolerance == 1e-4
    assert res.residual <= 1e-4


def test_classify_orbit():
    d = O.classify_orbit(CoAlgebraElement((3, 4), 0.0))
    assert d.kind == "point" and np.allclose(d.mu, [3, 4], atol=0)
    d = O.classify_orbit(CoAlgebraElement((0, 0), 1.0))
    assert d.kind == "plane" and d.nu == 1.0
    rng = np.random.default_rng(26)
    fixed = CoAlgebraElement((3, 4), 0.0)
    for _ in range(200):
        g = GroupElement(rng.uniform(-3, 3, 2), rng.uniform(-3, 3))
        moved = coadjoint(g, fixed)
        assert np.array_equal(moved.as_array(), fixed.as_array())


def test_orbit_form_frozen_value_and_antisymmetry():
    p = O.OrbitPoint((0, 0), 1.0)
    e1 = AlgebraElement((1, 0), 0.0)
    e2 = AlgebraElement((0, 1), 0.0)
    B0 = O.MagneticCocycle.zero()
    assert O.orbit_symplectic_form(p, e1, e2, B0, "minus") == -1.0
    assert O.orbit_symplectic_form(p, e1, e1, B0, "minus") == 0.0
    rng = np.random.default_rng(27)
    for _ in range(50):
        xi = AlgebraElement(rng.normal(size=2), rng.normal())
        eta = AlgebraElement(rng.normal(size=2), rng.normal())
        B = O.MagneticCocycle.planar(rng.normal())
        pp = O.OrbitPoint(rng.normal(size=2), rng.normal() + 2.0)
        lhs = O.orbit_symplectic_form(pp, xi, eta, B)
        rhs = -O.orbit_symplectic_form(pp, eta, xi, B)
        assert abs(lhs - rhs) <= 1e-12


def test_orbit_form_matches_bracket_of_linear_functions():
    rng = np.random.default_rng(28)
    for _ in range(100):
        xi = AlgebraElement(rng.normal(size=2), rng.normal())
        eta = AlgebraElement(rng.normal(size=2), rng.normal())
        B = O.MagneticCocycle.planar(rng.normal())
        p = O.OrbitPoint(rng.normal(size=2), rng.normal() + 1.5)
        p_dual = CoAlgebraElement(p.rho, p.nu)
        for sign in ("minus", "plus"):
            form = O.orbit_symplectic_form(p, xi, eta, B, sign)
            br = O.magnetic_lie_poisson(O.linear_function(xi), O.linear_function(eta),
                                        p_dual, B, sign)
            assert abs(form - br) <= 1e-10


def test_orbit_form_degenerate_warning():
    p = O.OrbitPoint((1, 2), 0.0)
    e1 = AlgebraElement((1, 0), 0.0)
    e2 = AlgebraElement((0, 1), 0.0)
    with pytest.warns(DegenerateForm):
        value = O.orbit_symplectic_form(p, e1, e2, O.MagneticCocycle.zero())
    assert value == 0.0


def test_orbit_form_matrix_determinant():
    rng = np.random.default_rng(29)
    B0 = O.MagneticCocycle.zero()
    for _ in range(100):
        nu = rng.normal()
        if abs(nu) < 1e-3:
            continue
        p = O.OrbitPoint(rng.normal(size=2), nu)
        for sign in ("minus", "plus"):
            det = np.linalg.det(O.orbit_form_matrix(p, B0, sign))
            assert abs(det - nu ** 2) <= 1e-10


def test_orbit_field_frozen_cases():
    B0 = O.MagneticCocycle.zero()
    h = O.OrbitFunction(evaluate=lambda p: float(p.rho[0]),
                        gradient=lambda p: np.array([1.0, 0.0]))
    p = O.OrbitPoint((0.3, -0.8), 1.0)
    out = O.orbit_hamiltonian_vector_field(h, p, B0)
    assert np.allclose(out, [0.0, 1.0], atol=1e-14)

    const = O.OrbitFunction(evaluate=lambda p: 4.2, gradient=lambda p: np.zeros(2))
    assert np.allclose(O.orbit_hamiltonian_vector_field(const, p, B0), 0.0, atol=0)


def test_orbit_field_canonical_v_block():
    B0 = O.MagneticCocycle.zero()
    h = O.OrbitFunction(evaluate=lambda p: 0.5 * float(p.lam @ p.lam))
    p = O.OrbitPoint((0.0, 0.0), 1.0, theta=[0.4], lam=[2.5])
    out = O.orbit_hamiltonian_vector_field(h, p, B0)
    assert np.allclose(out[:2], 0.0, atol=1e-9)
    assert abs(out[2] - 2.5) <= 1e-9  # thetadot = lam
    assert abs(out[3]) <= 1e-9        # lamdot = 0


def test_orbit_field_residual_oracle():
    rng = np.random.default_rng(30)
    for _ in range(25):
        k = int(rng.integers(0, 3))
        p = O.OrbitPoint(rng.normal(size=2), rng.normal() + 2.0,
                         theta=rng.normal(size=k), lam=rng.normal(size=k))
        B = O.MagneticCocycle.planar(rng.normal())
        Q = rng.normal(size=(2 + 2 * k, 2 + 2 * k))
        Q = Q + Q.T

        def ev(pt, Q=Q):
            x = pt.as_array()
            return 0.5 * float(x @ Q @ x)

        def gr(pt, Q=Q):
            return Q @ pt.as_array()

        h = O.OrbitFunction(evaluate=ev, gradient=gr)
        X = O.orbit_hamiltonian_vector_field(h, p, B)
        grad = h.grad(p)
        for _ in range(10):
            w = rng.normal(size=2 + 2 * k)
            lhs = O.orbit_form_on_chart_vectors(p, X, w, B)
            assert abs(lhs - grad @ w) <= 1e-10


def test_orbit_field_singular_form():
    # minus sign: the generator scale is -nu - B12, so B12 = -nu cancels it.
    p = O.OrbitPoint((0.1, 0.2), 1.0)
    B = O.MagneticCocycle.planar(-1.0)
    h = O.OrbitFunction(evaluate=lambda p: float(p.rho[0]),
                        gradient=lambda p: np.array([1.0, 0.0]))
    with pytest.raises(SingularForm) as exc:
        O.orbit_hamiltonian_vector_field(h, p, B)
    assert exc.value.matrix is not None


def test_dual_function_fd_gradient_direction_agreement():
    rng = np.random.default_rng(31)
    f = O.DualFunction(evaluate=lambda p: float(np.sin(p.mu[0]) * p.mu[1] + p.nu ** 3))
    assert not f.gradient_is_analytic
    for _ in range(20):
        p = rand_dual(rng)
        grad = f.grad(p).as_array()
        w = rng.normal(size=3)
        eps = 1e-6
        fd = (f.evaluate(CoAlgebraElement(p.mu + eps * w[:2], p.nu + eps * w[2]))
              - f.evaluate(CoAlgebraElement(p.mu - eps * w[:2], p.nu - eps * w[2]))) / (2 * eps)
        assert abs(grad @ w - fd) <= 1e-6


def test_cocycle_validation():
    with pytest.raises(ValueError):
        O.MagneticCocycle(np.eye(3))
    B = O.MagneticCocycle.planar(2.0)
    xi = AlgebraElement((1, 0), 0.0)
    eta = AlgebraElement((0, 1), 0.0)
    assert B.pair(xi, eta) == 2.0
    assert B.planar_component == 2.0

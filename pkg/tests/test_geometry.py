"""Plane-wave geometry engine tests against independent oracles: Koszul
formula for Christoffel symbols, interpolation-based derivatives for nabla R,
and a Runge-Kutta integrator for geodesics."""

import random
from fractions import Fraction

import pytest

from jtcurv.expr import FnExpr
from jtcurv.linalg import BilinearForm
from jtcurv.planewave import (CoordTensor, PlaneWaveMetric, christoffel,
                              contract, covariant_derivative_R, curvature_at,
                              curvature_generic, exp_inverse, geodesic,
                              geodesic_path, geodesic_residual, metric_at,
                              nabla_R_component)
from jtcurv.poly import Poly

from conftest import rational_point


# ---------------------------------------------------------------------------
# random polynomial metrics


def random_poly_fn(rng, nvars, degree=3):
    terms = FnExpr.const(Fraction(rng.randint(-2, 2)))
    for _ in range(rng.randint(1, 3)):
        t = FnExpr.const(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
        for _ in range(rng.randint(1, degree)):
            t = t * FnExpr.var(rng.randint(1, nvars))
        terms = terms + t
    return terms


def random_metric(rng, a=None, b=None, degree=3):
    a = a or rng.randint(2, 3)
    b = b or rng.randint(2, 4)
    # block form on the y part: hyperbolic pairs plus a diagonal tail
    C = [[Fraction(0)] * b for _ in range(b)]
    for mu in range(0, b - 1, 2):
        C[mu][mu + 1] = C[mu + 1][mu] = Fraction(1)
    if b % 2:
        C[b - 1][b - 1] = Fraction(rng.choice([-2, -1, 1, 2]))
    psi = {}
    for i in range(a):
        for j in range(i, a):
            psi[(i, j)] = tuple(
                random_poly_fn(rng, a, degree) if rng.random() < 0.6
                else FnExpr.const(0) for _ in range(b))
    return PlaneWaveMetric(a, b, C, psi)


# ---------------------------------------------------------------------------
# metric assembly and serialization


def metric_entry_exprs(M):
    """All g_{uv} as expressions over the full coordinate list (1-based)."""
    n, a, b = M.n, M.a, M.b
    zero = FnExpr.const(0)
    G = [[zero] * n for _ in range(n)]
    for i in range(a):
        G[i][M.xsi(i)] = G[M.xsi(i)][i] = FnExpr.const(1)
        for j in range(i, a):
            s = zero
            for mu in range(b):
                f = M.psi_fn(i, j, mu)
                if f is not None and not f.is_zero_const():
                    s = s + 2 * FnExpr.var(M.yi(mu) + 1) * f
            G[i][j] = G[j][i] = s
    for mu in range(b):
        for nu in range(b):
            G[M.yi(mu)][M.yi(nu)] = FnExpr.const(M.C.entries[mu][nu])
    return G


def test_metric_at_matches_symbolic_assembly(rng):
    for _ in range(5):
        M = random_metric(rng)
        P = rational_point(rng, M.n)
        G = metric_at(M, P).entries
        Ge = metric_entry_exprs(M)
        for u in range(M.n):
            for v in range(M.n):
                assert G[u][v] == Ge[u][v].eval(P)


def test_metric_json_roundtrip(rng):
    M = random_metric(rng)
    M2 = PlaneWaveMetric.from_json(M.to_json())
    P = rational_point(rng, M.n)
    assert metric_at(M, P).entries == metric_at(M2, P).entries
    assert curvature_at(M, P).comps == curvature_at(M2, P).comps


def test_metric_is_nondegenerate(rng):
    M = random_metric(rng)
    P = rational_point(rng, M.n)
    p, q = metric_at(M, P).signature()
    assert p + q == M.n


# ---------------------------------------------------------------------------
# Christoffel symbols against the Koszul formula


def koszul_first_kind(M, P):
    Ge = metric_entry_exprs(M)
    n = M.n
    vals = {}
    for u in range(n):
        for v in range(n):
            for w in range(n):
                s = (Ge[v][w].diff(u + 1).eval(P) + Ge[u][w].diff(v + 1).eval(P)
                     - Ge[u][v].diff(w + 1).eval(P))
                if s != 0:
                    vals[(u, v, w)] = s / 2
    return vals


def test_christoffel_first_kind_matches_koszul(rng):
    for _ in range(4):
        M = random_metric(rng)
        P = rational_point(rng, M.n)
        want = koszul_first_kind(M, P)
        got = christoffel(M, P, kind="first")
        for key in set(want) | set(got.comps):
            assert got.value(*key) == want.get(key, 0), key


def test_christoffel_second_kind_raises_with_inverse_metric(rng):
    M = random_metric(rng)
    P = rational_point(rng, M.n)
    ginv = metric_at(M, P).inverse().entries
    first = christoffel(M, P, kind="first")
    second = christoffel(M, P, kind="second")
    n = M.n
    for u in range(n):
        for v in range(n):
            for f in range(n):
                want = sum(ginv[f][w] * first.value(u, v, w) for w in range(n)
                           if first.value(u, v, w) != 0)
                assert second.value(u, v, f) == want, (u, v, f)


# ---------------------------------------------------------------------------
# curvature: closed form vs generic assembly, symmetries


def test_curvature_closed_form_equals_generic(rng):
    for _ in range(10):
        M = random_metric(rng)
        P = rational_point(rng, M.n)
        T1 = curvature_at(M, P)
        T2 = curvature_generic(M, P)
        keys = set(T1.comps) | set(T2.comps)
        for key in keys:
            assert T1.value(*key) == T2.value(*key), key


def test_curvature_pointwise_symmetries(rng):
    M = random_metric(rng)
    P = rational_point(rng, M.n)
    T = curvature_at(M, P)
    for (i, j, k, l), v in list(T.comps.items())[:200]:
        assert T.value(j, i, k, l) == -v
        assert T.value(i, j, l, k) == -v
        assert T.value(k, l, i, j) == v
        assert T.value(i, j, k, l) + T.value(j, k, i, l) + T.value(k, i, j, l) == 0


def test_contract_agrees_with_components(rng):
    M = random_metric(rng)
    P = rational_point(rng, M.n)
    T = curvature_at(M, P)
    e = [tuple(Fraction(int(i == t)) for t in range(M.n)) for i in range(M.n)]
    some = list(T.comps.items())[:10]
    for idx, v in some:
        assert contract(T, [e[i] for i in idx]) == v


# ---------------------------------------------------------------------------
# covariant derivatives of R


def poly_derivative_along(samples):
    """p'(0) from exact samples p(0), p(1), ..., via Newton interpolation."""
    pts = [Fraction(k) for k in range(len(samples))]
    # divided differences
    coef = list(samples)
    for lvl in range(1, len(samples)):
        for k in range(len(samples) - 1, lvl - 1, -1):
            coef[k] = (coef[k] - coef[k - 1]) / (pts[k] - pts[k - lvl])
    p = Poly.const(coef[-1])
    for k in range(len(samples) - 2, -1, -1):
        p = p * (Poly.t() - pts[k]) + Poly.const(coef[k])
    return p.deriv().eval(Fraction(0))


def nabla_r_oracle(M, P, idx4, e):
    """First covariant derivative by the textbook formula, with the partial
    of R obtained from exact polynomial interpolation along coordinate e."""
    samples = []
    for k in range(9):
        Q = list(P)
        Q[e] += k
        samples.append(curvature_at(M, tuple(Q)).value(*idx4))
    total = poly_derivative_along(samples)
    gam = christoffel(M, P, kind="second")
    R = curvature_at(M, P)
    for slot in range(4):
        for f in range(M.n):
            c = gam.value(e, idx4[slot], f)
            if c != 0:
                sub = idx4[:slot] + (f,) + idx4[slot + 1:]
                total -= c * R.value(*sub)
    return total


def test_nabla_r_matches_interpolation_oracle(rng):
    for _ in range(3):
        M = random_metric(rng, a=2, b=2, degree=2)
        P = rational_point(rng, M.n)
        T = covariant_derivative_R(M, P, 1)
        hits = 0
        for idx in list(T.comps)[:6]:
            want = nabla_r_oracle(M, P, idx[:4], idx[4])
            assert T.value(*idx) == want, idx
            hits += 1
        # and a few structurally zero positions
        for e in range(M.n):
            assert T.value(0, 1, 1, 0, e) == nabla_r_oracle(M, P, (0, 1, 1, 0), e)
        assert hits > 0


def test_nabla_r_support_rules(rng):
    M = random_metric(rng, a=3, b=2)
    P = rational_point(rng, M.n)
    # any x* tensor index kills the component
    assert nabla_R_component(M, P, (M.xsi(0), 0, 1, M.yi(0)), (0,)) == 0
    assert nabla_R_component(M, P, (0, 1, 1, 0), (M.xsi(1),)) == 0
    # two y entries among indices and directions kill it too
    assert nabla_R_component(M, P, (0, 1, 1, M.yi(0)), (M.yi(1),)) == 0
    assert nabla_R_component(M, P, (M.yi(0), 1, 1, M.yi(1)), (0,)) == 0


def test_second_bianchi_identity(rng):
    for _ in range(2):
        M = random_metric(rng, a=3, b=2, degree=2)
        P = rational_point(rng, M.n)
        for (aa, bb) in ((0, 1), (1, 2)):
            for (c, d, e) in ((0, 1, 2), (0, 2, M.yi(0)), (1, 2, M.yi(1))):
                s = (nabla_R_component(M, P, (aa, bb, c, d), (e,))
                     + nabla_R_component(M, P, (aa, bb, d, e), (c,))
                     + nabla_R_component(M, P, (aa, bb, e, c), (d,)))
                assert s == 0, (aa, bb, c, d, e)


def test_higher_order_tensor_collects_components(rng):
    M = random_metric(rng, a=2, b=2, degree=2)
    P = rational_point(rng, M.n)
    T2 = covariant_derivative_R(M, P, 2)
    assert T2.valence == (4, 2)
    for idx, v in list(T2.comps.items())[:5]:
        assert nabla_R_component(M, P, idx[:4], idx[4:]) == v


# ---------------------------------------------------------------------------
# geodesics


def rk4_geodesic(M, P, v, t1, steps=400):
    """Fixed-step classical Runge-Kutta on the second-order geodesic system."""
    n = M.n
    pos = [float(c) for c in P]
    vel = [float(c) for c in v]

    def acc(state_pos, state_vel):
        gam = christoffel(M, tuple(state_pos), kind="second")
        out = [0.0] * n
        for (u, w, f), val in gam.comps.items():
            c = state_vel[u] * state_vel[w]
            if c != 0.0:
                out[f] -= float(val) * c
        return out

    h = t1 / steps
    for _ in range(steps):
        k1p, k1v = vel, acc(pos, vel)
        p2 = [p + h / 2 * q for p, q in zip(pos, k1p)]
        v2 = [p + h / 2 * q for p, q in zip(vel, k1v)]
        k2p, k2v = v2, acc(p2, v2)
        p3 = [p + h / 2 * q for p, q in zip(pos, k2p)]
        v3 = [p + h / 2 * q for p, q in zip(vel, k2v)]
        k3p, k3v = v3, acc(p3, v3)
        p4 = [p + h * q for p, q in zip(pos, k3p)]
        v4 = [p + h * q for p, q in zip(vel, k3v)]
        k4p, k4v = v4, acc(p4, v4)
        pos = [p + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
               for p, a1, a2, a3, a4 in zip(pos, k1p, k2p, k3p, k4p)]
        vel = [p + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
               for p, a1, a2, a3, a4 in zip(vel, k1v, k2v, k3v, k4v)]
    return pos


def test_geodesic_x_components_affine(rng):
    M = random_metric(rng, a=3, b=2, degree=2)
    P = rational_point(rng, M.n)
    v = rational_point(rng, M.n)
    for t in (Fraction(1, 3), Fraction(1), Fraction(5, 2)):
        Q = geodesic(M, P, v, t, quadrature="exact-poly")
        for i in range(M.a):
            assert Q[i] == P[i] + t * v[i]


def test_geodesic_residual_vanishes_exactly(rng):
    M = random_metric(rng, a=2, b=2, degree=2)
    P = rational_point(rng, M.n)
    v = rational_point(rng, M.n)
    for t in (Fraction(0), Fraction(1, 2), Fraction(2)):
        res = geodesic_residual(M, P, v, t, quadrature="exact-poly")
        assert res == 0


def test_geodesic_matches_rk4(rng):
    M = random_metric(rng, a=2, b=2, degree=2)
    P = rational_point(rng, M.n, num=2, den=2)
    v = rational_point(rng, M.n, num=2, den=2)
    exact = geodesic(M, P, v, Fraction(1), quadrature="exact-poly")
    approx = rk4_geodesic(M, P, v, 1.0)
    for c_exact, c_rk in zip(exact, approx):
        assert abs(float(c_exact) - c_rk) < 1e-8


def test_geodesic_path_consistency(rng):
    M = random_metric(rng, a=2, b=2, degree=2)
    P = rational_point(rng, M.n)
    v = rational_point(rng, M.n)
    ts = [Fraction(k, 4) for k in range(5)]
    path = geodesic_path(M, P, v, ts, quadrature="exact-poly")
    assert len(path) == 5
    assert tuple(path[0]) == tuple(P)
    for t, point in zip(ts, path):
        assert tuple(point) == tuple(geodesic(M, P, v, t, quadrature="exact-poly"))


def test_exp_inverse_roundtrip_exact(rng):
    M = random_metric(rng, a=2, b=2, degree=2)
    P = rational_point(rng, M.n)
    Q = rational_point(rng, M.n)
    v = exp_inverse(M, P, Q, quadrature="exact-poly")
    reached = geodesic(M, P, v, Fraction(1), quadrature="exact-poly")
    assert tuple(reached) == tuple(Q)


def test_adaptive_quadrature_agrees_with_exact(rng):
    M = random_metric(rng, a=2, b=2, degree=2)
    P = rational_point(rng, M.n, num=2, den=2)
    v = rational_point(rng, M.n, num=2, den=2)
    exact = geodesic(M, P, v, Fraction(1), quadrature="exact-poly")
    approx = geodesic(M, tuple(float(c) for c in P), tuple(float(c) for c in v),
                      1.0, quadrature="adaptive")
    for c_exact, c_adapt in zip(exact, approx):
        assert abs(float(c_exact) - c_adapt) < 1e-9

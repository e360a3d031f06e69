"""Hand-transcribed component fixtures for the constant-coefficient
plane-wave family, shared between the unit suite and the acceptance suite."""

from fractions import Fraction

from jtcurv.models import riemann_orbit
from jtcurv.realizations import Y_PAIRS

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)

YIDX = {p: 6 + m for m, p in enumerate(Y_PAIRS)}


def curvature_unit_fixtures():
    """R components involving one y index: constants independent of A."""
    out = {
        (1, 0, 0, YIDX[(2, 1)]): Fraction(1),
        (2, 0, 0, YIDX[(3, 1)]): Fraction(1),
        (2, 1, 1, YIDX[(3, 2)]): Fraction(1),
        (0, 1, 1, YIDX[(1, 2)]): Fraction(1),
        (0, 2, 2, YIDX[(1, 1)]): Fraction(1),
        (1, 2, 2, YIDX[(2, 2)]): Fraction(1),
        (0, 1, 2, YIDX[(4, 1)]): -HALF,
        (0, 2, 1, YIDX[(4, 1)]): -HALF,
        (1, 2, 0, YIDX[(4, 2)]): -HALF,
        (1, 0, 2, YIDX[(4, 2)]): -HALF,
    }
    return out


def curvature_xxxx_fixtures(A, P):
    """The six independent 4-x curvature components as functions of A, P."""
    a = A.a
    x1, x2, x3 = P[0], P[1], P[2]
    return {
        (0, 1, 1, 0): -a[(3, 1)] * a[(3, 2)] * x3 * x3,
        (0, 2, 2, 0): -THIRD * (2 + 3 * a[(2, 1)] * a[(2, 2)]) * x2 * x2,
        (2, 1, 1, 2): -THIRD * (2 + 3 * a[(1, 1)] * a[(1, 2)]) * x1 * x1,
        (1, 0, 0, 2): (1 - a[(1, 1)] - a[(1, 2)] + a[(1, 1)] * a[(1, 2)]
                       + a[(2, 1)] - a[(2, 1)] * a[(2, 2)]
                       + a[(3, 1)] - a[(3, 1)] * a[(3, 2)]) * x2 * x3,
        (0, 1, 1, 2): (1 + a[(1, 2)] - a[(2, 1)] - a[(1, 1)] * a[(1, 2)]
                       - a[(2, 2)] + a[(2, 1)] * a[(2, 2)]
                       + a[(3, 2)] - a[(3, 1)] * a[(3, 2)]) * x1 * x3,
        (0, 2, 2, 1): (Fraction(2, 3) + a[(1, 1)] - a[(1, 1)] * a[(1, 2)]
                       + a[(2, 2)] - a[(2, 1)] * a[(2, 2)]
                       - a[(3, 1)] - a[(3, 2)] + a[(3, 1)] * a[(3, 2)]) * x1 * x2,
    }


def _nabla_coefficients(A):
    a = A.a
    e1 = -2 * (-2 + a[(1, 1)] + a[(2, 2)] + a[(3, 1)] * a[(3, 2)])
    e2 = -Fraction(2, 3) * (-4 + 3 * a[(1, 2)] + 3 * a[(3, 2)]
                            + 3 * a[(2, 1)] * a[(2, 2)])
    e3 = -Fraction(2, 3) * (-4 + 3 * a[(2, 1)] + 3 * a[(3, 1)]
                            + 3 * a[(1, 1)] * a[(1, 2)])
    e4 = (2 - a[(1, 1)] - a[(1, 2)] + a[(2, 1)] - a[(2, 2)]
          + a[(3, 1)] - a[(3, 2)] + a[(1, 1)] * a[(1, 2)]
          - a[(2, 1)] * a[(2, 2)] - a[(3, 1)] * a[(3, 2)])
    e5 = (2 - a[(1, 1)] + a[(1, 2)] - a[(2, 1)] - a[(2, 2)]
          - a[(3, 1)] + a[(3, 2)] - a[(1, 1)] * a[(1, 2)]
          + a[(2, 1)] * a[(2, 2)] - a[(3, 1)] * a[(3, 2)])
    e6 = (Fraction(2, 3) + a[(1, 1)] - a[(1, 2)] - a[(2, 1)] + a[(2, 2)]
          - a[(3, 1)] - a[(3, 2)] - a[(1, 1)] * a[(1, 2)]
          - a[(2, 1)] * a[(2, 2)] + a[(3, 1)] * a[(3, 2)])
    return e1, e2, e3, e4, e5, e6


def nabla_r_fixtures(A, P):
    """The nine published first-derivative components: (idx4, dir) -> value."""
    e1, e2, e3, e4, e5, e6 = _nabla_coefficients(A)
    x1, x2, x3 = P[0], P[1], P[2]
    return {
        ((0, 1, 1, 0), 2): e1 * x3,
        ((0, 2, 2, 0), 1): e2 * x2,
        ((1, 2, 2, 1), 0): e3 * x1,
        ((1, 0, 0, 2), 1): e4 * x3,
        ((1, 0, 0, 2), 2): e4 * x2,
        ((0, 1, 1, 2), 0): e5 * x3,
        ((0, 1, 1, 2), 2): e5 * x1,
        ((0, 2, 2, 1), 0): e6 * x2,
        ((0, 2, 2, 1), 1): e6 * x1,
    }


def nabla_r_expected_full(A, P):
    """Every nonzero nabla R component at P, expanded over symmetry orbits."""
    out = {}
    for (idx4, e), val in nabla_r_fixtures(A, P).items():
        if val == 0:
            continue
        for tup, s in riemann_orbit(idx4):
            out[tup + (e,)] = s * val
    return out

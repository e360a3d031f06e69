"""The two concrete 14-dimensional plane-wave families realizing the model:
a warped family driven by function pairs phi_{i,j} with phi'_{i,1} phi'_{i,2}
= 1, and a constant-coefficient family driven by scalars a_{i,j}.  Includes
the normalized-frame construction, the 0-model verification, the Xi isometry
invariant, and the local-symmetry criterion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .expr import FnExpr
from .jets import jet_univariate
from .linalg import solve
from .models import M14_LABELS, CheckReport, Model0, build_m14
from .planewave import PlaneWaveMetric, _CovREngine, metric_at, nabla_R_frame
from .scalars import REL_TOL, close, is_exact, iszero

#: y-coordinate order: the (i,j) pair labels of the eight y's
Y_PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (4, 2))
_YIDX = {p: m for m, p in enumerate(Y_PAIRS)}


def _c_block():
    """The 8x8 inner-product block of the y coordinates (model beta block)."""
    G = build_m14().form.entries
    return [[G[6 + i][6 + j] for j in range(8)] for i in range(8)]


class PhiFamily:
    """Warping functions phi_{i,j} (i in 1..3, j in 1..2), each univariate in
    x_i, subject to phi'_{i,1} phi'_{i,2} = 1."""

    SAMPLES = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(-1), Fraction(2))

    def __init__(self, phi, check=True):
        self.phi = {}
        for i in (1, 2, 3):
            for j in (1, 2):
                f = phi.get((i, j))
                if f is None:
                    raise ValueError(f"missing phi[{i},{j}]")
                self.phi[(i, j)] = f
        if check:
            self._check_reciprocal()

    def __getitem__(self, ij):
        return self.phi[ij]

    def _check_reciprocal(self):
        from .expr import EvalError
        for i in (1, 2, 3):
            d1 = self.phi[(i, 1)].diff(i)
            d2 = self.phi[(i, 2)].diff(i)
            exact = not (self.phi[(i, 1)].has_transcendental()
                         or self.phi[(i, 2)].has_transcendental())
            checked = 0
            for t in self.SAMPLES:
                pt = [t if exact else float(t)] * i
                try:
                    prod = d1.eval(pt) * d2.eval(pt)
                except EvalError:
                    continue
                if not close(prod, 1):
                    raise ValueError(
                        f"phi'_{i},1 * phi'_{i},2 = {prod} != 1 at x_{i}={t}")
                checked += 1
            if checked == 0:
                raise ValueError(f"could not sample phi pair {i} anywhere")

    @staticmethod
    def from_json(obj):
        phi = {}
        for key, fn in obj["phi"].items():
            i, j = (int(t) for t in key.split(","))
            phi[(i, j)] = FnExpr.from_json(fn)
        return PhiFamily(phi)

    def to_json(self):
        return {"phi": {f"{i},{j}": f.to_json() for (i, j), f in sorted(self.phi.items())}}


@dataclass
class AFamily:
    """Constant coefficients a_{i,j}, i in 1..3, j in 1..2."""

    a: dict

    def __getitem__(self, ij):
        return self.a[ij]

    @staticmethod
    def from_json(obj):
        a = {}
        for key, v in obj["a"].items():
            i, j = (int(t) for t in key.split(","))
            from .scalars import scalar_from_json
            a[(i, j)] = scalar_from_json(v)
        for i in (1, 2, 3):
            for j in (1, 2):
                a.setdefault((i, j), Fraction(0))
        return AFamily(a)

    def to_json(self):
        from .scalars import scalar_to_json
        return {"a": {f"{i},{j}": scalar_to_json(v) for (i, j), v in sorted(self.a.items())}}


def build_M_Phi(phi: PhiFamily) -> PlaneWaveMetric:
    """The a=3, b=8 metric whose diagonal x-terms carry -2 phi_{i,j} y_{i,j}
    and whose only cross terms are the two fixed y_4 couplings."""
    half = FnExpr.const(Fraction(1, 2))
    x1, x2 = FnExpr.var(1), FnExpr.var(2)
    zero8 = [FnExpr.const(0)] * 8

    def row(entries):
        fns = list(zero8)
        for mu, f in entries:
            fns[mu] = f
        return fns

    psi = {
        (0, 0): row([(_YIDX[(2, 1)], -phi[(2, 1)]), (_YIDX[(3, 1)], -phi[(3, 1)])]),
        (1, 1): row([(_YIDX[(3, 2)], -phi[(3, 2)]), (_YIDX[(1, 2)], -phi[(1, 2)])]),
        (2, 2): row([(_YIDX[(1, 1)], -phi[(1, 1)]), (_YIDX[(2, 2)], -phi[(2, 2)])]),
        (1, 2): row([(_YIDX[(4, 1)], half * x1)]),
        (0, 2): row([(_YIDX[(4, 2)], half * x2)]),
    }
    M = PlaneWaveMetric(3, 8, _c_block(), psi)
    M.phi = phi
    M.family = "phi"
    return M


def build_M_A(A: AFamily) -> PlaneWaveMetric:
    """The constant-coefficient family; beyond the diagonal terms it carries
    the (1-a_{i,j})-weighted cross couplings."""
    half = FnExpr.const(Fraction(1, 2))
    x = [FnExpr.var(i) for i in (1, 2, 3)]
    zero8 = [FnExpr.const(0)] * 8

    def c(v):
        return FnExpr.const(v)

    def row(entries):
        fns = list(zero8)
        for mu, f in entries:
            fns[mu] = f
        return fns

    psi = {
        (0, 0): row([(_YIDX[(2, 1)], c(-A[(2, 1)]) * x[1]),
                     (_YIDX[(3, 1)], c(-A[(3, 1)]) * x[2])]),
        (1, 1): row([(_YIDX[(3, 2)], c(-A[(3, 2)]) * x[2]),
                     (_YIDX[(1, 2)], c(-A[(1, 2)]) * x[0])]),
        (2, 2): row([(_YIDX[(1, 1)], c(-A[(1, 1)]) * x[0]),
                     (_YIDX[(2, 2)], c(-A[(2, 2)]) * x[1])]),
        (0, 1): row([(_YIDX[(2, 1)], c(1 - A[(2, 1)]) * x[0]),
                     (_YIDX[(1, 2)], c(1 - A[(1, 2)]) * x[1])]),
        (1, 2): row([(_YIDX[(4, 1)], half * x[0]),
                     (_YIDX[(3, 2)], c(1 - A[(3, 2)]) * x[1]),
                     (_YIDX[(2, 2)], c(1 - A[(2, 2)]) * x[2])]),
        (0, 2): row([(_YIDX[(4, 2)], half * x[1]),
                     (_YIDX[(3, 1)], c(1 - A[(3, 1)]) * x[0]),
                     (_YIDX[(1, 1)], c(1 - A[(1, 1)]) * x[2])]),
    }
    M = PlaneWaveMetric(3, 8, _c_block(), psi)
    M.afamily = A
    M.family = "a"
    return M


def phi_family_specialized(phi11, phi12) -> PhiFamily:
    """phi_{2,j} = x_2 and phi_{3,j} = x_3 with a free reciprocal first pair."""
    return PhiFamily({(1, 1): phi11, (1, 2): phi12,
                      (2, 1): FnExpr.var(2), (2, 2): FnExpr.var(2),
                      (3, 1): FnExpr.var(3), (3, 2): FnExpr.var(3)})


# ---------------------------------------------------------------------------
# normalized frames


@dataclass
class Frame:
    """14 labeled tangent vectors at a point, ordered as the model basis."""

    point: tuple
    vectors: dict

    def vector(self, label):
        return self.vectors[label]

    def ordered(self):
        return [self.vectors[lab] for lab in M14_LABELS]


#: model unit patterns A(alpha_i, alpha_j, alpha_j, beta) = 1 fixing the
#: y rescalings of the first stage; entries (beta pair, (i, j, j))
_LAMBDA_PATTERNS = [
    ((2, 1), (1, 0, 0)), ((3, 1), (2, 0, 0)), ((3, 2), (2, 1, 1)),
    ((1, 2), (0, 1, 1)), ((1, 1), (0, 2, 2)), ((2, 2), (1, 2, 2)),
]

#: a spanning set of the independent 4-alpha curvature components
_XXXX_BASIS = [(0, 1, 0, 1), (0, 2, 0, 2), (1, 2, 1, 2),
               (0, 1, 0, 2), (0, 1, 1, 2), (0, 2, 1, 2)]


def normalize_basis_0(M: PlaneWaveMetric, P) -> Frame:
    """Frame at P reproducing the 14-dimensional model exactly.

    Three stages: rescale the y directions so the unit curvature patterns
    hold; shift the x directions by y-directions to kill the residual
    4-alpha curvature (a linear solve, since curvature terms with two or
    more y entries vanish); shift by x* directions to restore the inner
    products.  Each later stage leaves the earlier normalizations intact.
    """
    if M.a != 3 or M.b != 8:
        raise ValueError("frame normalization requires the a=3, b=8 family")
    P = tuple(P)
    eng = _CovREngine(M, P)
    exact = all(is_exact(c) for c in P) and not M.has_transcendental()
    one = Fraction(1) if exact else 1.0

    def e(idx):
        return tuple((one if t == idx else (Fraction(0) if exact else 0.0))
                     for t in range(14))

    lam = [one] * 8
    for pair, (i, j, _) in _LAMBDA_PATTERNS:
        mu = _YIDX[pair]
        r = eng.value((i, j, j, M.yi(mu)))
        if iszero(r):
            raise ValueError(f"degenerate point: unit curvature pattern for "
                             f"y{pair} vanishes")
        lam[mu] = one / r

    # stage two: t[i][mu] coefficients from a linear solve
    rows = []
    rhs = []
    for (p, q, r, s) in _XXXX_BASIS:
        row = [Fraction(0) if exact else 0.0] * 24
        for slot, m in enumerate((p, q, r, s)):
            for mu in range(8):
                idx = [p, q, r, s]
                idx[slot] = M.yi(mu)
                v = eng.value(tuple(idx))
                if v != 0:
                    row[8 * m + mu] += lam[mu] * v
        rows.append(row)
        rhs.append(-eng.value((p, q, r, s)))
    tflat = solve(rows, rhs)
    t = [tflat[8 * i:8 * (i + 1)] for i in range(3)]

    beta_bar = []
    for mu in range(8):
        v = [Fraction(0) if exact else 0.0] * 14
        v[M.yi(mu)] = lam[mu]
        beta_bar.append(tuple(v))
    alpha_tilde = []
    for i in range(3):
        v = list(e(i))
        for mu in range(8):
            if t[i][mu] != 0:
                v[M.yi(mu)] += t[i][mu] * lam[mu]
        alpha_tilde.append(tuple(v))

    g = metric_at(M, P)
    gbb = [[g.apply(beta_bar[mu], beta_bar[nu]) for nu in range(8)] for mu in range(8)]
    beta = []
    for nu in range(8):
        v = list(beta_bar[nu])
        for i in range(3):
            d = -sum(gbb[mu][nu] * t[i][mu] for mu in range(8))
            v[M.xsi(i)] += d
        beta.append(tuple(v))

    alpha = []
    for i in range(3):
        v = list(alpha_tilde[i])
        for j in range(3):
            gij = g.apply(alpha_tilde[i], alpha_tilde[j])
            if gij != 0:
                v[M.xsi(j)] -= gij / 2
        alpha.append(tuple(v))

    vectors = {}
    for i in range(3):
        vectors[f"a{i + 1}"] = alpha[i]
        vectors[f"a{i + 1}*"] = e(M.xsi(i))
    for (bi, bj), mu in _YIDX.items():
        vectors[f"b{bi},{bj}"] = beta[mu]
    return Frame(P, vectors)


def verify_0_model(M: PlaneWaveMetric, P, rel: float = REL_TOL) -> CheckReport:
    """Does the normalized frame at P reproduce the model's inner products
    and curvature components, all of them, to the requested precision?"""
    model = build_m14()
    try:
        frame = normalize_basis_0(M, P)
    except (ValueError, ZeroDivisionError) as err:
        return CheckReport("0-model", False, witness={"error": str(err)})
    g = metric_at(M, P)
    vecs = frame.ordered()
    for u in range(14):
        for v in range(u, 14):
            got = g.apply(vecs[u], vecs[v])
            want = model.form.entries[u][v]
            if not close(got, want, rel=rel):
                return CheckReport("0-model", False, witness={
                    "part": "form", "index": (M14_LABELS[u], M14_LABELS[v]),
                    "expected": want, "got": got})
    eng = _CovREngine(M, P)

    def rval(u, v, w, z):
        total = 0
        sup = []
        for vec in (vecs[u], vecs[v], vecs[w], vecs[z]):
            sup.append([i for i, c in enumerate(vec)
                        if c != 0 and M.coord_kind(i) != "x*"])
        for combo in itertools.product(*sup):
            if sum(1 for i in combo if M.coord_kind(i) == "y") >= 2:
                continue
            coeff = vecs[u][combo[0]] * vecs[v][combo[1]] \
                * vecs[w][combo[2]] * vecs[z][combo[3]]
            rv = eng.value(combo)
            if rv != 0:
                total += coeff * rv
        return total

    checked = 0
    for u in range(14):
        for v in range(u + 1, 14):
            for w in range(u, 14):
                for z in range(w + 1, 14):
                    if (w, z) < (u, v):
                        continue
                    got = rval(u, v, w, z)
                    want = model.tensor.value(u, v, w, z)
                    checked += 1
                    if not close(got, want, rel=rel):
                        return CheckReport("0-model", False, witness={
                            "part": "tensor",
                            "index": tuple(M14_LABELS[i] for i in (u, v, w, z)),
                            "expected": want, "got": got})
    return CheckReport("0-model", True, stats={"components_checked": checked})


# ---------------------------------------------------------------------------
# the derivative-level normalization and the Xi invariant

#: the two nonvanishing first-derivative patterns (labels, beta label)
_NABLA_PATTERNS = [(("a1", "a3", "a3", "b1,1"), "a1"),
                   (("a1", "a2", "a2", "b1,2"), "a1")]


def _nabla_pattern_table(M, P, frame: Frame):
    """All nabla R(alpha_i, alpha_j, alpha_k, beta_nu; alpha_l) values."""
    out = {}
    eng = _CovREngine(M, P)
    alphas = [frame.vector(f"a{i}") for i in (1, 2, 3)]
    betas = {f"b{i},{j}": frame.vector(f"b{i},{j}") for (i, j) in Y_PAIRS}
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for bl, bv in betas.items():
                    for l in range(3):
                        key = (f"a{i + 1}", f"a{j + 1}", f"a{k + 1}", bl, f"a{l + 1}")
                        out[key] = nabla_R_frame(
                            M, P, [alphas[i], alphas[j], alphas[k], bv],
                            [alphas[l]], engine=eng)
    return out


def normalize_basis_1(M: PlaneWaveMetric, P, rel: float = REL_TOL) -> Frame:
    """0-normalized frame additionally matching the first-derivative pattern:
    exactly the two canonical nabla R contractions survive."""
    frame = normalize_basis_0(M, P)
    table = _nabla_pattern_table(M, P, frame)
    required = set()
    for (labels, dlab) in _NABLA_PATTERNS:
        key = labels + (dlab,)
        swapped = (labels[1], labels[0]) + labels[2:] + (dlab,)
        if iszero(table[key]):
            raise ValueError(f"derivative pattern {key} vanishes; "
                             "the point violates the normalization hypotheses")
        required.add(key)
        required.add(swapped)
    for key, val in table.items():
        if key in required:
            continue
        if not close(val, 0, rel=rel):
            raise ValueError(f"unexpected nonzero derivative component {key}: {val}")
    return frame


@dataclass
class XiValue:
    value: object
    mode: str
    quotients: tuple | None = None
    frame: Frame | None = None


def xi_from_frame(M: PlaneWaveMetric, P, vectors) -> XiValue:
    """Xi from any frame supplying a1, a2, a3, b1,1 and b1,2 vectors."""
    a1, a2, a3 = (vectors[f"a{i}"] for i in (1, 2, 3))
    b11, b12 = vectors["b1,1"], vectors["b1,2"]
    eng = _CovREngine(M, P)
    n2_12 = nabla_R_frame(M, P, [a1, a2, a2, b12], [a1, a1], engine=eng)
    n1_12 = nabla_R_frame(M, P, [a1, a2, a2, b12], [a1], engine=eng)
    n2_11 = nabla_R_frame(M, P, [a1, a3, a3, b11], [a1, a1], engine=eng)
    n1_11 = nabla_R_frame(M, P, [a1, a3, a3, b11], [a1], engine=eng)
    if iszero(n1_12) or iszero(n1_11):
        raise ZeroDivisionError("first-derivative contraction vanishes; "
                                "Xi is undefined at this point")
    q12 = n2_12 / (n1_12 * n1_12)
    q11 = n2_11 / (n1_11 * n1_11)
    diff = q12 - q11
    return XiValue(value=diff * diff / 4, mode="frame", quotients=(q12, q11))


def xi_invariant(M: PlaneWaveMetric, P, mode: str = "frame") -> XiValue:
    """The local isometry invariant of the specialized warped family.

    frame mode evaluates the quotient formula in a 1-normalized frame;
    direct mode evaluates {1 - phi' phi''' / (phi'')^2}^2 from the first
    warping function.  The two agree wherever both are defined.
    """
    if mode == "direct":
        phi = getattr(M, "phi", None)
        if phi is None:
            raise ValueError("direct mode needs a metric built from a phi family")
        x1 = P[0]
        f0, f1, f2, f3 = jet_univariate(phi[(1, 1)], x1, 3, var_index=1)
        if iszero(f1) or iszero(f2):
            raise ZeroDivisionError("phi' or phi'' vanishes; Xi is undefined")
        q = 1 - f1 * f3 / (f2 * f2)
        return XiValue(value=q * q, mode="direct")
    if mode != "frame":
        raise ValueError(f"unknown Xi mode {mode!r}")
    frame = normalize_basis_1(M, P)
    xi = xi_from_frame(M, P, frame.vectors)
    xi.frame = frame
    return xi


# ---------------------------------------------------------------------------
# local symmetry of the constant-coefficient family


def symmetric_space_residuals(A: AFamily):
    """The three local-symmetry equations, as residuals (zero iff satisfied)."""
    a = A.a
    return (a[(1, 1)] + a[(2, 2)] + a[(3, 1)] * a[(3, 2)] - 2,
            3 * a[(2, 1)] + 3 * a[(3, 1)] + 3 * a[(1, 2)] * a[(1, 1)] - 4,
            3 * a[(1, 2)] + 3 * a[(3, 2)] + 3 * a[(2, 1)] * a[(2, 2)] - 4)


def symmetric_space_check(A: AFamily, rng=None, points: int = 20) -> CheckReport:
    """Equation residuals plus an independent nabla R sampling on the metric.

    The sampling scans components lazily and stops at the first nonzero, so
    non-symmetric instances are cheap to reject.
    """
    import random
    rng = rng or random.Random(0)
    res = symmetric_space_residuals(A)
    M = build_M_A(A)
    max_comp = Fraction(0)
    worst = None
    sampled = 0
    for _ in range(points):
        P = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(14)]
        sampled += 1
        eng = _CovREngine(M, P)
        for idx in _nabla_support_indices(M, 1):
            v = eng.value(idx[:4], idx[4:])
            if not iszero(v):
                max_comp = v
                worst = idx
                break
        if worst is not None:
            break
    eq_hold = all(iszero(r) for r in res)
    nr_hold = worst is None
    report = CheckReport("locally-symmetric", eq_hold and nr_hold,
                         stats={"equation_residuals": list(res),
                                "max_nabla_R_component": max_comp,
                                "points_sampled": sampled})
    if not report.holds:
        report.witness = {"equation_residuals": list(res),
                          "max_nabla_R_component": max_comp,
                          "nabla_R_index": worst}
    return report


def _nabla_support_indices(M, k):
    """All index tuples of nabla^k R that can be nonzero.  Pure-x tuples come
    first: those carry the quadratic terms that survive differentiation, so
    any nonzero shows up early in a lazy scan."""
    xs = list(range(M.a))
    ys = [M.yi(m) for m in range(M.b)]
    total = 4 + k
    for xtup in itertools.product(xs, repeat=total):
        yield xtup
    for pos in range(total):
        for yidx in ys:
            for xtup in itertools.product(xs, repeat=total - 1):
                yield xtup[:pos] + (yidx,) + xtup[pos:]

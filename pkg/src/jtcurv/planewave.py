"""Generalized plane-wave metrics on R^(2a+b).

Coordinates are ordered (x_1..x_a, x_1*..x_a*, y_1..y_b); the metric is
    g(dx_i, dx_j)   = 2 sum_mu y_mu psi_{ij,mu}(x),
    g(dx_i, dx_i*)  = 1,
    g(dy_mu, dy_nu) = C_{mu nu},
with the warping functions psi depending on the x block only.  That support
structure gives the Christoffel cascade x -> y -> x*: geodesics integrate by
iterated quadrature and every curvature component with an x* index or more
than one y index vanishes, which is what keeps the iterated covariant
derivatives of R tractable.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .expr import FnExpr
from .linalg import BilinearForm, mat_inv
from .models import canonicalize_riemann, riemann_orbit
from .poly import Poly
from .scalars import is_exact, iszero, scalar_to_json


class PlaneWaveMetric:
    """Metric data (a, b, C, psi); psi maps an x index pair to b functions."""

    def __init__(self, a, b, C, psi):
        self.a = a
        self.b = b
        self.C = C if isinstance(C, BilinearForm) else BilinearForm(C)
        if self.C.n != b:
            raise ValueError("C must be b x b")
        self.psi = {}
        for (i, j), fns in psi.items():
            key = (min(i, j), max(i, j))
            fns = tuple(fns)
            if len(fns) != b:
                raise ValueError("each psi entry must have one function per y")
            if key in self.psi and self.psi[key] is not fns:
                raise ValueError(f"duplicate psi entry for {key}")
            self.psi[key] = fns
        self._cinv = None
        self._dcache = {}

    @property
    def n(self):
        return 2 * self.a + self.b

    @property
    def cinv(self):
        if self._cinv is None:
            self._cinv = mat_inv(self.C.entries)
        return self._cinv

    # coordinate index helpers (0-based block layout)
    def xi(self, i):
        return i

    def xsi(self, i):
        return self.a + i

    def yi(self, mu):
        return 2 * self.a + mu

    def coord_kind(self, idx):
        if idx < self.a:
            return "x"
        if idx < 2 * self.a:
            return "x*"
        return "y"

    def labels(self):
        return [f"x{i + 1}" for i in range(self.a)] \
            + [f"x{i + 1}*" for i in range(self.a)] \
            + [f"y{m + 1}" for m in range(self.b)]

    def has_transcendental(self):
        return any(f.has_transcendental() for fns in self.psi.values() for f in fns)

    # -- psi access -----------------------------------------------------
    def psi_fn(self, i, j, mu):
        fns = self.psi.get((min(i, j), max(i, j)))
        return fns[mu] if fns else None

    def dpsi(self, i, j, mu, derivs=()):
        """psi_{ij,mu} differentiated by the x indices in derivs (0-based)."""
        key = (min(i, j), max(i, j), mu, tuple(sorted(derivs)))
        f = self._dcache.get(key)
        if f is None:
            f = self.psi_fn(i, j, mu)
            if f is None:
                return None
            for d in sorted(derivs):
                f = f.diff(d + 1)
            self._dcache[key] = f
        return f

    def dpsi_val(self, i, j, mu, derivs, x):
        f = self.dpsi(i, j, mu, derivs)
        if f is None or f.is_zero_const():
            return Fraction(0) if not any(isinstance(c, float) for c in x) else 0.0
        return f.eval(x)

    # -- serialization --------------------------------------------------
    def to_json(self):
        psi = {}
        for (i, j), fns in sorted(self.psi.items()):
            if all(f.is_zero_const() for f in fns):
                continue
            psi[f"{i + 1},{j + 1}"] = [f.to_json() for f in fns]
        return {"a": self.a, "b": self.b,
                "C": [[scalar_to_json(x) for x in row] for row in self.C.entries],
                "psi": psi}

    @staticmethod
    def from_json(obj):
        from .scalars import scalar_from_json
        C = [[scalar_from_json(x) for x in row] for row in obj["C"]]
        psi = {}
        for key, fns in obj.get("psi", {}).items():
            i, j = (int(t) - 1 for t in key.split(","))
            psi[(i, j)] = [FnExpr.from_json(f) for f in fns]
        return PlaneWaveMetric(int(obj["a"]), int(obj["b"]), C, psi)


class CoordTensor:
    """Sparse tensor of coordinate components at a point.

    valence (r, s): r tensor slots plus s covariant-derivative slots; comps
    maps full index tuples of length r+s to values, zeros omitted.
    """

    def __init__(self, n, valence, comps=None):
        self.n = n
        self.valence = valence
        self.comps = dict(comps or {})

    def value(self, *idx):
        if len(idx) != sum(self.valence):
            raise ValueError("index arity does not match valence")
        return self.comps.get(tuple(idx), Fraction(0))

    def items(self):
        return self.comps.items()

    def is_zero(self, rel=None):
        from .scalars import close
        return all(close(v, 0) if rel is None else close(v, 0, rel=rel)
                   for v in self.comps.values())

    def max_abs(self):
        return max((abs(v) for v in self.comps.values()), default=Fraction(0))


def contract(T: CoordTensor, vectors):
    """Multilinear contraction of T against one vector per slot."""
    if len(vectors) != sum(T.valence):
        raise ValueError("slot count does not match valence")
    s = 0
    for idx, v in T.comps.items():
        term = v
        for slot, i in enumerate(idx):
            c = vectors[slot][i]
            if c == 0:
                term = 0
                break
            term = term * c
        s += term
    return s


# ---------------------------------------------------------------------------
# metric and Christoffel symbols


def metric_at(M: PlaneWaveMetric, P) -> BilinearForm:
    a, b, n = M.a, M.b, M.n
    x = tuple(P[:a])
    y = P[2 * a:]
    G = [[Fraction(0)] * n for _ in range(n)]
    exact = all(is_exact(c) for c in P)
    zero = Fraction(0) if exact else 0.0
    for i in range(a):
        G[i][M.xsi(i)] = G[M.xsi(i)][i] = Fraction(1) if exact else 1.0
        for j in range(i, a):
            s = zero
            for mu in range(b):
                if y[mu] != 0:
                    f = M.psi_fn(i, j, mu)
                    if f is not None:
                        s = s + 2 * y[mu] * f.eval(x)
            G[i][j] = G[j][i] = s
    for mu in range(b):
        for nu in range(b):
            G[M.yi(mu)][M.yi(nu)] = M.C.entries[mu][nu]
    return BilinearForm(G)


def _w_val(M, i, j, k, x, extra=()):
    """W_{ijk} = d_i psi_jk + d_j psi_ik - d_k psi_ij, per y index mu."""
    out = []
    for mu in range(M.b):
        v = M.dpsi_val(j, k, mu, (i,) + tuple(extra), x) \
            + M.dpsi_val(i, k, mu, (j,) + tuple(extra), x) \
            - M.dpsi_val(i, j, mu, (k,) + tuple(extra), x)
        out.append(v)
    return out


def christoffel(M: PlaneWaveMetric, P, kind="second") -> CoordTensor:
    """Christoffel symbols at P.

    kind="first": comps[(u,v,w)] = Gamma_{uv,w} = g(nabla_u dv, dw).
    kind="second": comps[(u,v,f)] = Gamma^f_{uv}.  All symbols with an x*
    index among u, v vanish; outputs f are x* or y only.
    """
    a, b = M.a, M.b
    x = tuple(P[:a])
    y = P[2 * a:]
    comps = {}

    def put(u, v, w, val):
        if not iszero(val):
            comps[(u, v, w)] = val
            if u != v:
                comps[(v, u, w)] = val

    for i in range(a):
        for j in range(i, a):
            if kind == "first":
                for k in range(a):
                    W = _w_val(M, i, j, k, x)
                    s = sum(y[mu] * W[mu] for mu in range(b) if y[mu] != 0 and W[mu] != 0)
                    put(M.xi(i), M.xi(j), M.xi(k), s)
                for nu in range(b):
                    put(M.xi(i), M.xi(j), M.yi(nu), -M.dpsi_val(i, j, nu, (), x))
            else:
                for k in range(a):
                    W = _w_val(M, i, j, k, x)
                    s = sum(y[mu] * W[mu] for mu in range(b) if y[mu] != 0 and W[mu] != 0)
                    put(M.xi(i), M.xi(j), M.xsi(k), s)
                for mu in range(b):
                    s = -sum(M.cinv[mu][nu] * M.dpsi_val(i, j, nu, (), x)
                             for nu in range(b) if M.cinv[mu][nu] != 0)
                    put(M.xi(i), M.xi(j), M.yi(mu), s)
    for i in range(a):
        for nu in range(b):
            for k in range(a):
                v = M.dpsi_val(i, k, nu, (), x)
                if kind == "first":
                    put(M.xi(i), M.yi(nu), M.xi(k), v)
                else:
                    put(M.xi(i), M.yi(nu), M.xsi(k), v)
    return CoordTensor(M.n, (2, 1) if kind == "second" else (3, 0), comps)


# ---------------------------------------------------------------------------
# curvature: closed form and the generic oracle


def curvature_at(M: PlaneWaveMetric, P) -> CoordTensor:
    """R at P by the closed-form component list; full symmetric expansion."""
    a, b = M.a, M.b
    x = tuple(P[:a])
    y = P[2 * a:]
    canon = {}

    def put(idx, val):
        c, s = canonicalize_riemann(idx)
        if c is not None and not iszero(val):
            canon.setdefault(c, s * val)

    for i in range(a):
        for j in range(a):
            if i == j:
                continue
            for k in range(a):
                for nu in range(b):
                    v = -M.dpsi_val(j, k, nu, (i,), x) + M.dpsi_val(i, k, nu, (j,), x)
                    put((M.xi(i), M.xi(j), M.xi(k), M.yi(nu)), v)
    for i in range(a):
        for j in range(a):
            for k in range(a):
                for l in range(a):
                    if i == j or k == l:
                        continue
                    quad = 0
                    for nu in range(b):
                        for mu in range(b):
                            c = M.cinv[nu][mu]
                            if c == 0:
                                continue
                            quad += c * (M.dpsi_val(i, k, mu, (), x)
                                         * M.dpsi_val(j, l, nu, (), x)
                                         - M.dpsi_val(i, l, mu, (), x)
                                         * M.dpsi_val(j, k, nu, (), x))
                    lin = 0
                    for nu in range(b):
                        if y[nu] == 0:
                            continue
                        B = M.dpsi_val(j, l, nu, (i, k), x) \
                            + M.dpsi_val(i, k, nu, (j, l), x) \
                            - M.dpsi_val(j, k, nu, (i, l), x) \
                            - M.dpsi_val(i, l, nu, (j, k), x)
                        lin += y[nu] * B
                    put((M.xi(i), M.xi(j), M.xi(k), M.xi(l)), quad + lin)

    comps = {}
    for c, v in canon.items():
        for tup, s in riemann_orbit(c):
            comps[tup] = s * v
    return CoordTensor(M.n, (4, 0), comps)


def _gamma2_sparse(M, P):
    """Second-kind symbols and their coordinate partials, sparsely.

    Returns (gam, dgam): gam[(u,v)] = {f: value}; dgam[w][(u,v)] = {f: value}
    for the partial with respect to coordinate w.
    """
    a, b = M.a, M.b
    x = tuple(P[:a])
    y = P[2 * a:]
    gam = {}
    dgam = {}

    def add(tbl, u, v, f, val):
        if iszero(val):
            return
        tbl.setdefault((u, v), {}).setdefault(f, Fraction(0))
        tbl[(u, v)][f] += val
        if u != v:
            tbl.setdefault((v, u), {})[f] = tbl[(u, v)][f]

    for i in range(a):
        for j in range(i, a):
            for k in range(a):
                W = _w_val(M, i, j, k, x)
                s = sum(y[mu] * W[mu] for mu in range(b) if y[mu] != 0 and W[mu] != 0)
                add(gam, M.xi(i), M.xi(j), M.xsi(k), s)
                for lam in range(b):
                    dg = dgam.setdefault(M.yi(lam), {})
                    add(dg, M.xi(i), M.xi(j), M.xsi(k), W[lam])
                for l in range(a):
                    dW = _w_val(M, i, j, k, x, extra=(l,))
                    sv = sum(y[mu] * dW[mu] for mu in range(b)
                             if y[mu] != 0 and dW[mu] != 0)
                    add(dgam.setdefault(M.xi(l), {}), M.xi(i), M.xi(j), M.xsi(k), sv)
            for mu in range(b):
                s = -sum(M.cinv[mu][nu] * M.dpsi_val(i, j, nu, (), x)
                         for nu in range(b) if M.cinv[mu][nu] != 0)
                add(gam, M.xi(i), M.xi(j), M.yi(mu), s)
                for l in range(a):
                    sv = -sum(M.cinv[mu][nu] * M.dpsi_val(i, j, nu, (l,), x)
                              for nu in range(b) if M.cinv[mu][nu] != 0)
                    add(dgam.setdefault(M.xi(l), {}), M.xi(i), M.xi(j), M.yi(mu), sv)
    for i in range(a):
        for nu in range(b):
            for k in range(a):
                add(gam, M.xi(i), M.yi(nu), M.xsi(k), M.dpsi_val(i, k, nu, (), x))
                for l in range(a):
                    add(dgam.setdefault(M.xi(l), {}), M.xi(i), M.yi(nu), M.xsi(k),
                        M.dpsi_val(i, k, nu, (l,), x))
    return gam, dgam


def curvature_generic(M: PlaneWaveMetric, P) -> CoordTensor:
    """Curvature assembled from the Christoffel symbols and their exact
    partials: R(a,b,c,d) = sum_f g_{fd} (d_a G^f_bc - d_b G^f_ac
    + sum_e (G^e_bc G^f_ae - G^e_ac G^f_be)).  Independent of curvature_at.
    """
    gam, dgam = _gamma2_sparse(M, P)
    g = metric_at(M, P).entries
    n = M.n
    comps = {}
    for aa in range(n):
        for bb in range(n):
            if aa == bb:
                continue
            for cc in range(n):
                acc = {}
                for f, v in dgam.get(aa, {}).get((bb, cc), {}).items():
                    acc[f] = acc.get(f, 0) + v
                for f, v in dgam.get(bb, {}).get((aa, cc), {}).items():
                    acc[f] = acc.get(f, 0) - v
                for e, ve in gam.get((bb, cc), {}).items():
                    for f, vf in gam.get((aa, e), {}).items():
                        acc[f] = acc.get(f, 0) + ve * vf
                for e, ve in gam.get((aa, cc), {}).items():
                    for f, vf in gam.get((bb, e), {}).items():
                        acc[f] = acc.get(f, 0) - ve * vf
                for f, v in acc.items():
                    if v == 0:
                        continue
                    for dd in range(n):
                        w = g[f][dd]
                        if w != 0:
                            key = (aa, bb, cc, dd)
                            comps[key] = comps.get(key, Fraction(0)) + v * w
    return CoordTensor(n, (4, 0), {k: v for k, v in comps.items() if not iszero(v)})


# ---------------------------------------------------------------------------
# iterated covariant derivatives of R


class _CovREngine:
    """Memoized evaluator of partials of (nabla^k R) components at a point.

    Support rule (provable by induction on k): a component, or any of its
    ordinary partial derivatives, vanishes unless every tensor index is of
    x type or exactly one is of y type, counting y partials as well.
    """

    def __init__(self, M: PlaneWaveMetric, P):
        self.M = M
        self.x = tuple(P[:M.a])
        self.y = tuple(P[2 * M.a:])
        self.memo = {}
        self._texpr = {}

    def _kind(self, idx):
        return self.M.coord_kind(idx)

    def value(self, idx4, dirs=(), partials=()):
        """partial^(partials) of (nabla^(len(dirs)) R)(idx4; dirs) at P.

        dirs are applied innermost first; partials is a multiset of
        coordinate indices of ordinary derivatives applied on top.
        """
        M = self.M
        idx4 = tuple(idx4)
        dirs = tuple(dirs)
        partials = tuple(sorted(partials))
        all_idx = idx4 + dirs
        if any(self._kind(i) == "x*" for i in all_idx):
            return Fraction(0)
        ycount = sum(1 for i in all_idx + partials if self._kind(i) == "y")
        if ycount >= 2:
            return Fraction(0)
        key = (idx4, dirs, partials)
        v = self.memo.get(key)
        if v is None:
            v = self._compute(idx4, dirs, partials)
            self.memo[key] = v
        return v

    def _compute(self, idx4, dirs, partials):
        M = self.M
        if not dirs:
            return self._r_partial(idx4, partials)
        e, rest = dirs[-1], dirs[:-1]
        total = self.value(idx4, rest, partials + (e,))
        if self._kind(e) != "x":
            return total
        # Christoffel corrections: only f of y type can contribute, and the
        # symbol Gamma^{y_mu}_{e, s} is nonzero only for s of x type
        slots = idx4 + rest
        xpartials = [p for p in partials if self._kind(p) == "x"]
        ypartials = [p for p in partials if self._kind(p) == "y"]
        for s_pos, s in enumerate(slots):
            if self._kind(s) != "x":
                continue
            for mu in range(M.b):
                f = M.yi(mu)
                # split the x partials between the symbol and the tensor
                for r in range(len(xpartials) + 1):
                    for sub in set(itertools.combinations(range(len(xpartials)), r)):
                        p1 = tuple(xpartials[t] for t in sub)
                        p2 = tuple(xpartials[t] for t in range(len(xpartials))
                                   if t not in sub) + tuple(ypartials)
                        gval = -sum(M.cinv[mu][nu]
                                    * M.dpsi_val(e, s, nu, tuple(p1), self.x)
                                    for nu in range(M.b) if M.cinv[mu][nu] != 0)
                        if gval == 0:
                            continue
                        if s_pos < 4:
                            nidx = idx4[:s_pos] + (f,) + idx4[s_pos + 1:]
                            tval = self.value(nidx, rest, tuple(p2))
                        else:
                            ndirs = rest[:s_pos - 4] + (f,) + rest[s_pos - 3:]
                            tval = self.value(idx4, ndirs, tuple(p2))
                        if tval != 0:
                            total -= gval * tval
        return total

    def _r_xxxx_exprs(self, i, j, k, l):
        """(T1, [B_nu]) as FnExpr for R(x_i,x_j,x_k,x_l) = T1 + sum y_nu B_nu."""
        key = (i, j, k, l)
        got = self._texpr.get(key)
        if got is not None:
            return got
        M = self.M
        zero = FnExpr.const(0)
        # build T1 symbolically so x partials come from exact diff
        t1 = zero
        for nu in range(M.b):
            for mu in range(M.b):
                c = M.cinv[nu][mu]
                if c == 0:
                    continue
                fik, fjl = M.psi_fn(i, k, mu), M.psi_fn(j, l, nu)
                fil, fjk = M.psi_fn(i, l, mu), M.psi_fn(j, k, nu)
                if fik is not None and fjl is not None:
                    t1 = t1 + FnExpr.const(c) * fik * fjl
                if fil is not None and fjk is not None:
                    t1 = t1 - FnExpr.const(c) * fil * fjk
        bs = []
        for nu in range(M.b):
            B = zero
            for (p, q, d) in [(j, l, (i, k)), (i, k, (j, l))]:
                f = M.dpsi(p, q, nu, d)
                if f is not None:
                    B = B + f
            for (p, q, d) in [(j, k, (i, l)), (i, l, (j, k))]:
                f = M.dpsi(p, q, nu, d)
                if f is not None:
                    B = B - f
            bs.append(B)
        self._texpr[key] = (t1, bs)
        return t1, bs

    def _r_partial(self, idx4, partials):
        M = self.M
        ytype = [t for t in idx4 if self._kind(t) == "y"]
        if len(ytype) == 1:
            if any(self._kind(p) == "y" for p in partials):
                return Fraction(0)
            rep = next(((tup, s) for tup, s in riemann_orbit(idx4)
                        if self._kind(tup[3]) == "y"
                        and all(self._kind(t) == "x" for t in tup[:3])), None)
            if rep is None:
                return Fraction(0)
            (i, j, k, ynu), sign = rep
            if i == j:
                return Fraction(0)
            nu = ynu - 2 * M.a
            px = tuple(partials)
            v = -M.dpsi_val(j, k, nu, (i,) + px, self.x) \
                + M.dpsi_val(i, k, nu, (j,) + px, self.x)
            return sign * v
        # pure x indices
        i, j, k, l = idx4
        if i == j or k == l:
            return Fraction(0)
        ypart = [p for p in partials if self._kind(p) == "y"]
        xpart = tuple(p for p in partials if self._kind(p) == "x")
        t1, bs = self._r_xxxx_exprs(i, j, k, l)

        def ev(f):
            for d in xpart:
                f = f.diff(d + 1)
            if f.is_zero_const():
                return Fraction(0)
            return f.eval(self.x)

        if ypart:
            return ev(bs[ypart[0] - 2 * M.a])
        total = ev(t1)
        for nu in range(M.b):
            if self.y[nu] != 0:
                bv = ev(bs[nu])
                if bv != 0:
                    total += self.y[nu] * bv
        return total


def covariant_derivative_R(M: PlaneWaveMetric, P, k: int) -> CoordTensor:
    """nabla^k R at P as a sparse CoordTensor of valence (4, k).

    Components with an x* index, or with more than one y index, are omitted
    (they vanish identically for this metric family).
    """
    if k < 0:
        raise ValueError("order must be nonnegative")
    eng = _CovREngine(M, P)
    xs = list(range(M.a))
    ys = [M.yi(m) for m in range(M.b)]
    total_slots = 4 + k
    comps = {}

    def record(idx):
        v = eng.value(idx[:4], idx[4:])
        if not iszero(v):
            comps[idx] = v

    for xtup in itertools.product(xs, repeat=total_slots):
        record(xtup)
    for pos in range(total_slots):
        for yidx in ys:
            for xtup in itertools.product(xs, repeat=total_slots - 1):
                idx = xtup[:pos] + (yidx,) + xtup[pos:]
                record(idx)
    return CoordTensor(M.n, (4, k), comps)


def nabla_R_component(M: PlaneWaveMetric, P, idx4, dirs):
    """Single component of nabla^k R with coordinate indices."""
    return _CovREngine(M, P).value(tuple(idx4), tuple(dirs))


def nabla_R_frame(M: PlaneWaveMetric, P, vecs4, dvecs, engine=None):
    """nabla^k R evaluated on arbitrary tangent vectors at P."""
    eng = engine if engine is not None else _CovREngine(M, P)
    a = M.a
    supports = []
    for v in list(vecs4) + list(dvecs):
        sup = [i for i, c in enumerate(v) if c != 0 and M.coord_kind(i) != "x*"]
        supports.append(sup)
    total = 0
    vecs = list(vecs4) + list(dvecs)
    for combo in itertools.product(*supports):
        if sum(1 for i in combo if M.coord_kind(i) == "y") >= 2:
            continue
        coeff = 1
        for slot, i in enumerate(combo):
            coeff = coeff * vecs[slot][i]
        val = eng.value(combo[:4], combo[4:])
        if val != 0:
            total += coeff * val
    return total


# ---------------------------------------------------------------------------
# geodesics and the exponential map


class _Geodesic:
    """Cascade-integrated geodesic through P with initial velocity v."""

    def __init__(self, M: PlaneWaveMetric, P, v, quadrature="auto"):
        a, b = M.a, M.b
        self.M = M
        self.P = tuple(P)
        self.v = tuple(v)
        exact = all(is_exact(c) for c in tuple(P) + tuple(v)) \
            and not M.has_transcendental()
        if quadrature == "exact-poly" and not exact:
            raise ValueError("exact-poly quadrature needs rational data and "
                             "polynomial warping functions")
        if quadrature == "auto":
            quadrature = "exact-poly" if exact else "adaptive"
        self.quadrature = quadrature
        if quadrature == "exact-poly":
            self._build_exact()
        else:
            self._prepare_float()

    # ---- exact polynomial mode ----
    def _build_exact(self):
        M, P, v = self.M, self.P, self.v
        a, b = M.a, M.b
        t = Poly.t()
        xpol = [Poly([P[i], v[i]]) for i in range(a)]
        vx = [Fraction(v[i]) for i in range(a)]

        def psi_poly(i, j, mu, derivs=()):
            f = M.dpsi(i, j, mu, derivs)
            if f is None or f.is_zero_const():
                return Poly()
            r = f.eval(xpol)
            return r if isinstance(r, Poly) else Poly.const(r)

        fpol = []
        for mu in range(b):
            s = Poly()
            for nu in range(b):
                c = M.cinv[mu][nu]
                if c == 0:
                    continue
                inner = Poly()
                for i in range(a):
                    for j in range(a):
                        if vx[i] != 0 and vx[j] != 0:
                            inner = inner + vx[i] * vx[j] * psi_poly(i, j, nu)
                s = s + c * inner
            fpol.append(s)
        ypol = [Poly([P[M.yi(mu)], v[M.yi(mu)]]) + fpol[mu].integrate().integrate()
                for mu in range(b)]
        ydot = [p.deriv() for p in ypol]
        xspol = []
        for k in range(a):
            G = Poly()
            for i in range(a):
                for j in range(a):
                    if vx[i] == 0 or vx[j] == 0:
                        continue
                    for mu in range(b):
                        w = psi_poly(j, k, mu, (i,)) + psi_poly(i, k, mu, (j,)) \
                            - psi_poly(i, j, mu, (k,))
                        if not w.is_zero():
                            G = G + vx[i] * vx[j] * (ypol[mu] * w)
            for i in range(a):
                if vx[i] == 0:
                    continue
                for nu in range(b):
                    p = psi_poly(i, k, nu)
                    if not p.is_zero():
                        G = G + 2 * vx[i] * (p * ydot[nu])
            G = -G
            xspol.append(Poly([P[M.xsi(k)], v[M.xsi(k)]]) + G.integrate().integrate())
        self.polys = xpol + xspol + ypol

    # ---- adaptive float mode ----
    def _prepare_float(self):
        M = self.M
        self.Pf = tuple(float(c) for c in self.P)
        self.vf = tuple(float(c) for c in self.v)
        from scipy.integrate import quad
        self._quad = quad

    def _x_at(self, t):
        a = self.M.a
        return tuple(self.Pf[i] + t * self.vf[i] for i in range(a))

    def _F(self, mu, s):
        M = self.M
        a, b = M.a, M.b
        x = self._x_at(s)
        tot = 0.0
        for nu in range(b):
            c = M.cinv[mu][nu]
            if c == 0:
                continue
            inner = 0.0
            for i in range(a):
                for j in range(a):
                    if self.vf[i] != 0.0 and self.vf[j] != 0.0:
                        f = M.psi_fn(i, j, nu)
                        if f is not None:
                            inner += self.vf[i] * self.vf[j] * float(f.eval(x))
            tot += float(c) * inner
        return tot

    def _y_at(self, mu, t):
        M = self.M
        base = self.Pf[M.yi(mu)] + t * self.vf[M.yi(mu)]
        if t == 0.0:
            return base
        val, _ = self._quad(lambda s: (t - s) * self._F(mu, s), 0.0, t,
                            epsabs=1e-12, epsrel=1e-12, limit=200)
        return base + val

    def _ydot_at(self, mu, t):
        M = self.M
        base = self.vf[M.yi(mu)]
        if t == 0.0:
            return base
        val, _ = self._quad(lambda s: self._F(mu, s), 0.0, t,
                            epsabs=1e-12, epsrel=1e-12, limit=200)
        return base + val

    def _G(self, k, s):
        M = self.M
        a, b = M.a, M.b
        x = self._x_at(s)
        yv = [self._y_at(mu, s) for mu in range(b)]
        ydv = [self._ydot_at(nu, s) for nu in range(b)]
        tot = 0.0
        for i in range(a):
            if self.vf[i] == 0.0:
                continue
            for j in range(a):
                if self.vf[j] == 0.0:
                    continue
                for mu in range(b):
                    if yv[mu] == 0.0:
                        continue
                    w = float(M.dpsi_val(j, k, mu, (i,), x)) \
                        + float(M.dpsi_val(i, k, mu, (j,), x)) \
                        - float(M.dpsi_val(i, j, mu, (k,), x))
                    tot += self.vf[i] * self.vf[j] * yv[mu] * w
            for nu in range(b):
                f = M.psi_fn(i, k, nu)
                if f is not None and ydv[nu] != 0.0:
                    tot += 2.0 * self.vf[i] * float(f.eval(x)) * ydv[nu]
        return -tot

    def at(self, t):
        M = self.M
        a, b = M.a, M.b
        if self.quadrature == "exact-poly":
            return tuple(p.eval(t if is_exact(t) else float(t)) for p in self.polys)
        t = float(t)
        out = [0.0] * M.n
        for i in range(a):
            out[i] = self.Pf[i] + t * self.vf[i]
        for mu in range(b):
            out[M.yi(mu)] = self._y_at(mu, t)
        for k in range(a):
            base = self.Pf[M.xsi(k)] + t * self.vf[M.xsi(k)]
            if t != 0.0:
                val, _ = self._quad(lambda s: (t - s) * self._G(k, s), 0.0, t,
                                    epsabs=1e-10, epsrel=1e-10, limit=100)
                base += val
            out[M.xsi(k)] = base
        return tuple(out)

    def velocity(self, t):
        M = self.M
        a, b = M.a, M.b
        if self.quadrature == "exact-poly":
            return tuple(p.deriv().eval(t if is_exact(t) else float(t))
                         for p in self.polys)
        t = float(t)
        out = [0.0] * M.n
        for i in range(a):
            out[i] = self.vf[i]
        for mu in range(b):
            out[M.yi(mu)] = self._ydot_at(mu, t)
        for k in range(a):
            base = self.vf[M.xsi(k)]
            if t != 0.0:
                val, _ = self._quad(lambda s: self._G(k, s), 0.0, t,
                                    epsabs=1e-10, epsrel=1e-10, limit=100)
                base += val
            out[M.xsi(k)] = base
        return tuple(out)

    def acceleration(self, t):
        M = self.M
        a, b = M.a, M.b
        if self.quadrature == "exact-poly":
            return tuple(p.deriv().deriv().eval(t if is_exact(t) else float(t))
                         for p in self.polys)
        t = float(t)
        out = [0.0] * M.n
        for mu in range(b):
            out[M.yi(mu)] = self._F(mu, t)
        for k in range(a):
            out[M.xsi(k)] = self._G(k, t)
        return tuple(out)


def geodesic(M: PlaneWaveMetric, P, v, t, quadrature="auto"):
    """Point reached at parameter t along the geodesic from P with velocity v."""
    return _Geodesic(M, P, v, quadrature).at(t)


def geodesic_path(M: PlaneWaveMetric, P, v, ts, quadrature="auto"):
    g = _Geodesic(M, P, v, quadrature)
    return [g.at(t) for t in ts]


def geodesic_residual(M: PlaneWaveMetric, P, v, t, quadrature="auto"):
    """Max abs component of gamma'' + Gamma(gamma', gamma') at parameter t."""
    g = _Geodesic(M, P, v, quadrature)
    pt = g.at(t)
    vel = g.velocity(t)
    acc = list(g.acceleration(t))
    gam = christoffel(M, pt, "second")
    for (u, w, f), val in gam.items():
        if vel[u] != 0 and vel[w] != 0:
            acc[f] += val * vel[u] * vel[w]
    return max(abs(c) for c in acc)


def exp_inverse(M: PlaneWaveMetric, P, Q, quadrature="auto"):
    """Initial velocity v with geodesic(M, P, v, 1) = Q, by back-substitution."""
    a, b = M.a, M.b
    P = tuple(P)
    Q = tuple(Q)
    exact = all(is_exact(c) for c in P + Q) and not M.has_transcendental()
    if quadrature == "exact-poly" and not exact:
        raise ValueError("exact-poly quadrature needs rational data and "
                         "polynomial warping functions")
    if quadrature == "auto":
        quadrature = "exact-poly" if exact else "adaptive"
    zero = Fraction(0) if quadrature == "exact-poly" else 0.0
    v = [zero] * M.n
    for i in range(a):
        v[i] = Q[i] - P[i]
    # y displacement depends on v_x only, x* displacement on (v_x, v_y) only
    probe = _Geodesic(M, P, v, quadrature)
    reached = probe.at(Fraction(1) if quadrature == "exact-poly" else 1.0)
    for mu in range(b):
        v[M.yi(mu)] = Q[M.yi(mu)] - reached[M.yi(mu)]
    probe = _Geodesic(M, P, v, quadrature)
    reached = probe.at(Fraction(1) if quadrature == "exact-poly" else 1.0)
    for k in range(a):
        v[M.xsi(k)] = Q[M.xsi(k)] - reached[M.xsi(k)]
    return tuple(v)


def geodesic_trace_csv(M: PlaneWaveMetric, P, v, ts, stream, quadrature="auto"):
    """Write the sampled geodesic as CSV with header t,<coordinate labels>."""
    import csv
    writer = csv.writer(stream)
    writer.writerow(["t"] + M.labels())
    g = _Geodesic(M, P, v, quadrature)
    for t in ts:
        writer.writerow([float(t)] + [float(c) for c in g.at(t)])

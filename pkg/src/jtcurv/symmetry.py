"""Symmetry group of a 0-model, specialized helpers for the 14-dimensional
model: explicit generators covering SL_pm(3) on the alpha* block, the
restriction homomorphism tau, and the 21-parameter kernel of tau.

Matrices act on column vectors; column j of T holds the image of basis
vector e_j.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import mat_mul, nullspace_basis, transpose
from .models import M14_LABELS, CheckReport, Model0
from .scalars import REL_TOL, close

_LAB = {name: i for i, name in enumerate(M14_LABELS)}

#: column order of the b-coefficient variables (the nu index of beta_nu)
BETA_LABELS = ("b1,1", "b1,2", "b2,1", "b2,2", "b3,1", "b3,2", "b4,1", "b4,2")
_BETA_IDX = [_LAB[b] for b in BETA_LABELS]


def _matrix_from_map(mapping):
    """14x14 matrix from a dict label -> list of (coeff, label) image terms."""
    n = len(M14_LABELS)
    T = [[Fraction(0)] * n for _ in range(n)]
    for src, terms in mapping.items():
        j = _LAB[src]
        for coeff, dst in terms:
            T[_LAB[dst]][j] += Fraction(coeff) if not isinstance(coeff, float) else coeff
    for name in M14_LABELS:
        if name not in mapping:
            T[_LAB[name]][_LAB[name]] = Fraction(1)
    return T


def swap_first_second():
    """Symmetry exchanging the first two alpha coordinates."""
    pairs = [("a1", "a2"), ("a1*", "a2*"), ("b1,1", "b2,2"),
             ("b1,2", "b2,1"), ("b3,1", "b3,2"), ("b4,1", "b4,2")]
    mp = {}
    for u, v in pairs:
        mp[u] = [(1, v)]
        mp[v] = [(1, u)]
    return _matrix_from_map(mp)


def swap_first_third():
    """Symmetry exchanging the first and third alpha coordinates."""
    mp = {}
    for u, v in [("a1", "a3"), ("a1*", "a3*"), ("b1,1", "b3,1"),
                 ("b1,2", "b3,2"), ("b2,1", "b2,2")]:
        mp[u] = [(1, v)]
        mp[v] = [(1, u)]
    # b4,1 <-> -b4,1 - b4,2 with b4,2 fixed
    mp["b4,1"] = [(-1, "b4,1"), (-1, "b4,2")]
    mp["b4,2"] = [(1, "b4,2")]
    return _matrix_from_map(mp)


def rotation(c, s):
    """Rotation by angle theta in the first two coordinates, given
    c = cos(theta), s = sin(theta) with c^2 + s^2 = 1 (exact rational
    pythagorean pairs keep the check exact)."""
    if not close(c * c + s * s, 1):
        raise ValueError("rotation parameters must satisfy c^2 + s^2 = 1")
    c2, s2, cs = c * c, s * s, c * s
    half = Fraction(1, 2) if not isinstance(cs, float) else 0.5
    mp = {
        "a1": [(c, "a1"), (s, "a2")],
        "a2": [(-s, "a1"), (c, "a2")],
        "a1*": [(c, "a1*"), (s, "a2*")],
        "a2*": [(-s, "a1*"), (c, "a2*")],
        "b1,1": [(c, "b1,1"), (s, "b2,2")],
        "b1,2": [(c, "b1,2"), (s, "b2,1")],
        "b2,1": [(-s, "b1,2"), (c, "b2,1")],
        "b2,2": [(-s, "b1,1"), (c, "b2,2")],
        # -2cs * b4,3 with b4,3 = -b4,1 - b4,2
        "b3,1": [(c2, "b3,1"), (s2, "b3,2"), (2 * cs, "b4,1"), (2 * cs, "b4,2")],
        "b3,2": [(s2, "b3,1"), (c2, "b3,2"), (-2 * cs, "b4,1"), (-2 * cs, "b4,2")],
        "b4,1": [(-half * cs, "b3,1"), (half * cs, "b3,2"),
                 (c2, "b4,1"), (-s2, "b4,2")],
        "b4,2": [(-half * cs, "b3,1"), (half * cs, "b3,2"),
                 (-s2, "b4,1"), (c2, "b4,2")],
    }
    return _matrix_from_map(mp)


def _div(x, y):
    if isinstance(x, float) or isinstance(y, float):
        return float(x) / float(y)
    return Fraction(x) / Fraction(y)


def dilatation(a1, a2, a3):
    """Diagonal symmetry scaling alpha_i by a_i; requires a1 a2 a3 = 1."""
    if not close(a1 * a2 * a3, 1):
        raise ValueError("dilatation requires a1*a2*a3 = 1")
    mp = {
        "a1": [(a1, "a1")], "a2": [(a2, "a2")], "a3": [(a3, "a3")],
        "a1*": [(_div(1, a1), "a1*")],
        "a2*": [(_div(1, a2), "a2*")],
        "a3*": [(_div(1, a3), "a3*")],
        "b1,1": [(_div(a2, a3), "b1,1")], "b1,2": [(_div(a3, a2), "b1,2")],
        "b2,1": [(_div(a3, a1), "b2,1")], "b2,2": [(_div(a1, a3), "b2,2")],
        "b3,1": [(_div(a2, a1), "b3,1")], "b3,2": [(_div(a1, a2), "b3,2")],
    }
    return _matrix_from_map(mp)


# ---------------------------------------------------------------------------
# pullbacks and the symmetry test


def pullback_form(m: Model0, T):
    """Gram matrix of T^* <.,.>, i.e. T^t G T."""
    return mat_mul(transpose(T), mat_mul(m.form.entries, T))


def pullback_tensor(m: Model0, T):
    """Full component dict of T^* A, contracted one slot at a time."""
    cur = dict(m.full_entries)
    for slot in range(4):
        nxt = {}
        for idx, v in cur.items():
            p = idx[slot]
            for i in range(m.n):
                t = T[p][i]
                if t == 0:
                    continue
                nidx = idx[:slot] + (i,) + idx[slot + 1:]
                nxt[nidx] = nxt.get(nidx, 0) + v * t
        cur = {k: v for k, v in nxt.items() if v != 0}
    return cur


def is_symmetry(m: Model0, T, rel: float = REL_TOL) -> CheckReport:
    """Does T preserve both the inner product and the curvature tensor?"""
    G = m.form.entries
    Gp = pullback_form(m, T)
    for i in range(m.n):
        for j in range(m.n):
            if not close(Gp[i][j], G[i][j], rel=rel):
                return CheckReport("symmetry", False, witness={
                    "part": "form", "index": (m.label(i), m.label(j)),
                    "expected": G[i][j], "got": Gp[i][j]})
    Ap = pullback_tensor(m, T)
    A = dict(m.full_entries)
    for idx in set(A) | set(Ap):
        if not close(Ap.get(idx, 0), A.get(idx, 0), rel=rel):
            return CheckReport("symmetry", False, witness={
                "part": "tensor", "index": [m.label(i) for i in idx],
                "expected": A.get(idx, 0), "got": Ap.get(idx, 0)})
    return CheckReport("symmetry", True)


def tau(T):
    """Restriction of a symmetry of the 14-dimensional model to the invariant
    alpha* block, as a 3x3 matrix."""
    star = [_LAB["a1*"], _LAB["a2*"], _LAB["a3*"]]
    for j in star:
        for i in range(len(T)):
            if i not in star and T[i][j] != 0:
                raise ValueError("matrix does not preserve the alpha* subspace")
    return [[T[i][j] for j in star] for i in star]


# ---------------------------------------------------------------------------
# kernel of tau

#: the alpha 4-tuples (0-based) whose vanishing pins down the b coefficients
_KERNEL_TUPLES = [(1, 0, 0, 1), (2, 0, 0, 2), (2, 1, 1, 2),
                  (1, 0, 0, 2), (0, 1, 1, 2), (0, 2, 2, 1)]


def kernel_constraint_matrix(m: Model0):
    """6x24 matrix of the linear conditions on b = (b_i^nu) for a unipotent
    T alpha_i = alpha_i + sum_nu b_i^nu beta_nu + ... to preserve A.

    Derived by expanding A(T alpha_., ...) multilinearly: terms with two or
    more beta slots vanish identically, so the conditions are linear in b.
    """
    rows = []
    for tup in _KERNEL_TUPLES:
        row = [Fraction(0)] * 24
        for slot in range(4):
            others = list(tup)
            for nu, bidx in enumerate(_BETA_IDX):
                idx = tuple(bidx if s == slot else others[s] for s in range(4))
                v = m.tensor.value(*idx)
                if v != 0:
                    row[8 * tup[slot] + nu] += v
        rows.append(row)
    return rows


def kernel_basis_b(m: Model0):
    """Basis (as flat length-24 vectors) of admissible b coefficient arrays."""
    return nullspace_basis(kernel_constraint_matrix(m))


def kernel_element(m: Model0, b, c_skew=None):
    """Symmetry in ker(tau) from admissible b (3x8) and a skew 3x3 c part.

    The symmetric part of c and all of d are forced by <.,.>-preservation:
    d_nu^i = -sum_mu <beta_nu, beta_mu> b_i^mu and
    c_(ij) = -1/2 sum <beta_nu, beta_mu> b_i^nu b_j^mu.
    """
    b = [[Fraction(x) for x in row] for row in b]
    flat = [x for row in b for x in row]
    for row in kernel_constraint_matrix(m):
        if sum(r * x for r, x in zip(row, flat)) != 0:
            raise ValueError("b coefficients violate the curvature constraints")
    if c_skew is None:
        c_skew = [[Fraction(0)] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            if c_skew[i][j] != -c_skew[j][i]:
                raise ValueError("c_skew must be antisymmetric")

    G = m.form.entries
    n = m.n
    T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    star = [_LAB["a1*"], _LAB["a2*"], _LAB["a3*"]]

    def gbb(nu, mu):
        return G[_BETA_IDX[nu]][_BETA_IDX[mu]]

    for i in range(3):
        col = _LAB[f"a{i + 1}"]
        for nu in range(8):
            T[_BETA_IDX[nu]][col] += b[i][nu]
        for j in range(3):
            c_sym = -Fraction(1, 2) * sum(gbb(nu, mu) * b[i][nu] * b[j][mu]
                                          for nu in range(8) for mu in range(8))
            T[star[j]][col] += c_sym + Fraction(c_skew[i][j])
    for nu in range(8):
        col = _BETA_IDX[nu]
        for i in range(3):
            d = -sum(gbb(nu, mu) * b[i][mu] for mu in range(8))
            T[star[i]][col] += d
    return T


def random_kernel_element(m: Model0, rng):
    """A random element of ker(tau) with small integer parameters."""
    basis = kernel_basis_b(m)
    flat = [Fraction(0)] * 24
    for v in basis:
        c = Fraction(rng.randint(-3, 3))
        flat = [x + c * y for x, y in zip(flat, v)]
    b = [flat[8 * i:8 * (i + 1)] for i in range(3)]
    s01, s02, s12 = (Fraction(rng.randint(-3, 3)) for _ in range(3))
    c_skew = [[0, s01, s02], [-s01, 0, s12], [-s02, -s12, 0]]
    return kernel_element(m, b, c_skew)

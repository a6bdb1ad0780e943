"""Matrices over O/lambda^n: determinants, unitary-group membership,
su^(n) bases, congruence-filtration orders, the constructive SU lift,
the Weil Gram model with its sign, and the permutation embedding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb

from .ring import (
    CycloElt,
    ContextMismatch,
    DomainError,
    RingCtx,
    RingError,
    zeta_poly_mul,
    zeta_poly_add,
)


class MembershipError(RingError):
    """Matrix fails a group-membership precondition."""


# ---------------------------------------------------------------------------
# Small helpers over F_ell (plain integer matrices taken mod ell).


def mat_mod(rows, ell):
    return [[x % ell for x in row] for row in rows]


def mat_mul_mod(a, b, ell):
    d, m, k = len(a), len(b), len(b[0])
    return [
        [sum(a[i][t] * b[t][j] for t in range(m)) % ell for j in range(k)]
        for i in range(d)
    ]


def mat_add_mod(a, b, ell):
    return [[(x + y) % ell for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale_mod(c, a, ell):
    return [[(c * x) % ell for x in row] for row in a]


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def mat_eye(d):
    return [[1 if i == j else 0 for j in range(d)] for i in range(d)]


def mat_zero(d):
    return [[0] * d for _ in range(d)]


def int_det_mod(rows, p: int) -> int:
    """Determinant of an integer matrix modulo a prime p."""
    a = [[x % p for x in row] for row in rows]
    d = len(a)
    det = 1
    for col in range(d):
        piv = next((r for r in range(col, d) if a[r][col] % p), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col] % p
        inv = pow(a[col][col], -1, p)
        for r in range(col + 1, d):
            factor = a[r][col] * inv % p
            if factor:
                a[r] = [(x - factor * y) % p for x, y in zip(a[r], a[col])]
    return det % p


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatLocal:
    """A d x d matrix over O/lambda^n."""

    ctx: RingCtx
    entries: tuple  # tuple of tuples of CycloElt

    def __post_init__(self):
        d = len(self.entries)
        for row in self.entries:
            if len(row) != d:
                raise ValueError("matrix must be square")
            for e in row:
                if e.ctx != self.ctx:
                    raise ContextMismatch("entry context differs from matrix context")

    @property
    def dim(self) -> int:
        return len(self.entries)

    @staticmethod
    def from_rows(rows) -> "MatLocal":
        ctx = rows[0][0].ctx
        return MatLocal(ctx, tuple(tuple(row) for row in rows))

    @staticmethod
    def identity(ctx: RingCtx, d: int) -> "MatLocal":
        one, zero = CycloElt.one(ctx), CycloElt.zero(ctx)
        return MatLocal(
            ctx, tuple(tuple(one if i == j else zero for j in range(d)) for i in range(d))
        )

    @staticmethod
    def from_digit_matrices(ctx: RingCtx, d: int, digit_mats) -> "MatLocal":
        """Build sum_k lambda^k * D_k from matrices over F_ell."""
        rows = []
        for i in range(d):
            row = []
            for j in range(d):
                digits = [0] * ctx.precision
                for k, mat in enumerate(digit_mats):
                    if k < ctx.precision:
                        digits[k] = mat[i][j] % ctx.ell
                row.append(CycloElt.from_poly(
                    _poly_from_digit_seq(digits, ctx.ell), ctx))
            rows.append(tuple(row))
        return MatLocal(ctx, tuple(rows))

    def digit(self, k: int):
        """The k-th digit matrix over F_ell (Eq.-style expansion is entrywise)."""
        return [[e.digits[k] for e in row] for row in self.entries]

    def digit_matrices(self):
        return [self.digit(k) for k in range(self.ctx.precision)]

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "MatLocal") -> "MatLocal":
        return MatLocal.from_rows(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]
        )

    def __sub__(self, other: "MatLocal") -> "MatLocal":
        return MatLocal.from_rows(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]
        )

    def __mul__(self, other: "MatLocal") -> "MatLocal":
        if self.ctx != other.ctx:
            raise ContextMismatch("matrix contexts differ")
        d = self.dim
        ell = self.ctx.ell
        lifts_a = [[e.lift_poly() for e in row] for row in self.entries]
        lifts_b = [[e.lift_poly() for e in row] for row in other.entries]
        rows = []
        for i in range(d):
            row = []
            for j in range(d):
                acc = [0] * (ell - 1)
                for t in range(d):
                    prod = zeta_poly_mul(lifts_a[i][t], lifts_b[t][j], ell)
                    for s, c in enumerate(prod):
                        acc[s] += c
                row.append(CycloElt.from_poly(tuple(acc), self.ctx))
            rows.append(tuple(row))
        return MatLocal(self.ctx, tuple(rows))

    def scale(self, c: CycloElt) -> "MatLocal":
        return MatLocal.from_rows([[c * e for e in row] for row in self.entries])

    def dagger(self) -> "MatLocal":
        """Conjugate transpose for the involution zeta -> zeta^(-1)."""
        d = self.dim
        return MatLocal.from_rows(
            [[self.entries[j][i].conjugate() for j in range(d)] for i in range(d)]
        )

    def transpose(self) -> "MatLocal":
        d = self.dim
        return MatLocal.from_rows(
            [[self.entries[j][i] for j in range(d)] for i in range(d)]
        )

    def truncate(self, n: int) -> "MatLocal":
        return MatLocal.from_rows([[e.truncate(n) for e in row] for row in self.entries])

    def pad_zero(self, n: int) -> "MatLocal":
        return MatLocal.from_rows([[e.pad_zero(n) for e in row] for row in self.entries])

    def filtration_level(self) -> int:
        """Largest k with A congruent to I mod lambda^k (0 if A_0 != I)."""
        d = self.dim
        delta = self - MatLocal.identity(self.ctx, d)
        return min(delta.entries[i][j].ord_lambda for i in range(d) for j in range(d))

    def inverse(self) -> "MatLocal":
        """Gauss-Jordan inverse; pivots must be units after row swaps."""
        d = self.dim
        ctx = self.ctx
        a = [list(row) for row in self.entries]
        inv = [list(row) for row in MatLocal.identity(ctx, d).entries]
        for col in range(d):
            piv = next((r for r in range(col, d) if a[r][col].is_unit), None)
            if piv is None:
                raise MembershipError("matrix is not invertible over the local ring")
            a[col], a[piv] = a[piv], a[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            pinv = a[col][col].inverse()
            a[col] = [pinv * x for x in a[col]]
            inv[col] = [pinv * x for x in inv[col]]
            for r in range(d):
                if r != col and not a[r][col].is_zero():
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                    inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
        return MatLocal.from_rows(inv)

    def inverse_neumann(self) -> "MatLocal":
        """(I + M)^(-1) = sum (-M)^k for A = I + M with M = 0 mod lambda."""
        d = self.dim
        ident = MatLocal.identity(self.ctx, d)
        m = self - ident
        if m.filtration_level() == 0 and min(
            e.ord_lambda for row in m.entries for e in row
        ) < 1:
            raise MembershipError("Neumann inverse needs A = I mod lambda")
        total = ident
        power = ident
        for _ in range(self.ctx.precision):
            power = power.scale(CycloElt.from_int(-1, self.ctx)) * m
            total = total + power
        return total

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "ell": self.ctx.ell,
            "precision": self.ctx.precision,
            "dim": self.dim,
            "entries": [list(e.digits) for row in self.entries for e in row],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "MatLocal":
        ctx = RingCtx(d["ell"], d["precision"])
        dim = d["dim"]
        flat = [CycloElt(ctx, tuple(digs)) for digs in d["entries"]]
        rows = [tuple(flat[i * dim : (i + 1) * dim]) for i in range(dim)]
        return MatLocal(ctx, tuple(rows))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _poly_from_digit_seq(digits, ell):
    from .ring import poly_from_digits

    return poly_from_digits(digits, ell)


# ---------------------------------------------------------------------------
# Determinants.


def det_local(a: MatLocal) -> CycloElt:
    """O-linear determinant, computed exactly on integer lifts.

    Cofactor expansion with memoization over column subsets keeps the
    computation exact for non-invertible matrices as well.
    """
    d = a.dim
    ell = a.ctx.ell
    lifts = [[e.lift_poly() for e in row] for row in a.entries]
    zero = (0,) * (ell - 1)
    memo = {}

    def minor(row: int, colmask: int) -> tuple:
        if row == d:
            return (1,) + (0,) * (ell - 2)
        key = colmask
        if key in memo:
            return memo[key]
        total = zero
        sign = 1
        for j in range(d):
            if colmask & (1 << j):
                entry = lifts[row][j]
                if any(entry):
                    sub = minor(row + 1, colmask & ~(1 << j))
                    term = zeta_poly_mul(entry, sub, ell)
                    if sign < 0:
                        term = tuple(-c for c in term)
                    total = zeta_poly_add(total, term)
                sign = -sign
        memo[key] = total
        return total

    return CycloElt.from_poly(minor(0, (1 << d) - 1), a.ctx)


def det_base(a: MatLocal) -> CycloElt:
    """Z_ell-linear determinant: the norm of the O-linear determinant."""
    dl = det_local(a)
    acc = dl
    for j in range(2, a.ctx.ell):
        acc = acc * dl.galois(j)
    return acc


# ---------------------------------------------------------------------------
# Hermitian forms and membership.


@dataclass(frozen=True)
class HermitianForm:
    """Diagonal Gram data Gamma = diag(alpha_1, ..., alpha_d), rational units."""

    ctx: RingCtx
    gamma: tuple  # integers, units mod ell
    sign: int  # Legendre square class of prod(gamma)

    def __post_init__(self):
        for g in self.gamma:
            if g % self.ctx.ell == 0:
                raise ValueError("Gram entries must be units")
        if self.sign != legendre(_prod(self.gamma), self.ctx.ell):
            raise ValueError("sign must match the square class of prod(gamma)")

    @property
    def dim(self) -> int:
        return len(self.gamma)

    @staticmethod
    def standard(ctx: RingCtx, d: int, sign: int = 1) -> "HermitianForm":
        """e^+ = I_d, or e^- = diag(1, ..., 1, alpha) with alpha a non-square."""
        if sign == 1:
            return HermitianForm(ctx, (1,) * d, 1)
        alpha = next(a for a in range(2, ctx.ell) if legendre(a, ctx.ell) == -1)
        return HermitianForm(ctx, (1,) * (d - 1) + (alpha,), -1)

    def gamma_matrix(self) -> MatLocal:
        rows = []
        for i in range(self.dim):
            rows.append(
                [
                    CycloElt.from_int(self.gamma[i] if i == j else 0, self.ctx)
                    for j in range(self.dim)
                ]
            )
        return MatLocal.from_rows(rows)

    def gamma_inv_mod(self):
        return [pow(g, -1, self.ctx.ell) for g in self.gamma]

    def to_json_dict(self) -> dict:
        return {
            "ell": self.ctx.ell,
            "dim": self.dim,
            "gamma": list(self.gamma),
            "sign": self.sign,
        }


def _prod(xs):
    p = 1
    for x in xs:
        p *= x
    return p


@dataclass(frozen=True)
class MembershipVerdict:
    kind: str  # "GU" | "U" | "SU" | "none"
    multiplier: CycloElt | None
    det: CycloElt | None
    failing_entry: tuple | None = None

    def __bool__(self):
        return self.kind != "none"


def classify_membership(a: MatLocal, form: HermitianForm) -> MembershipVerdict:
    """Test A^dagger Gamma A = mu Gamma; refine GU -> U -> SU.

    mu is read off the (1,1) position and then checked everywhere.  For
    members, the identity conj(det) * det = mu^d is asserted as well.
    """
    if a.dim != form.dim:
        raise ValueError("dimension mismatch")
    gam = form.gamma_matrix()
    h = a.dagger() * gam * a
    mu = h.entries[0][0] * CycloElt.from_int(form.gamma[0], a.ctx).inverse()
    for i in range(a.dim):
        for j in range(a.dim):
            expected = mu * gam.entries[i][j]
            if h.entries[i][j] != expected:
                return MembershipVerdict("none", None, None, (i, j))
    if not mu.is_unit:
        return MembershipVerdict("none", None, None, (0, 0))
    dl = det_local(a)
    assert dl.conjugate() * dl == mu ** a.dim, "conj(det)*det != mu^d"
    if mu == CycloElt.one(a.ctx):
        kind = "SU" if dl == CycloElt.one(a.ctx) else "U"
    else:
        kind = "GU"
    return MembershipVerdict(kind, mu, dl)


# ---------------------------------------------------------------------------
# The Weil-pairing Gram model and the sign epsilon.


def weil_gram_and_epsilon(ell: int, r: int, c: int = 1):
    """Gram matrix c*(E - r*I_(r-1)) over F_ell, its square class, and epsilon.

    epsilon is the Legendre symbol (r | ell).  For odd r the determinant's
    square class provably equals the class of r; for even r it depends on
    the unknown unit c (the two forms are then similitude-equivalent), so
    the class is reported without the cross-assertion.
    """
    if r % ell == 0:
        raise ValueError("requires ell not dividing r")
    if c % ell == 0:
        raise ValueError("c must be a unit mod ell")
    d = r - 1
    gram = [[c * ((1 if i != j else 1 - r)) % ell for j in range(d)] for i in range(d)]
    det = int_det_mod(gram, ell)
    square_class = legendre(det, ell)
    eps = legendre(r, ell)
    if r % 2 == 1:
        assert square_class == eps, "Gram determinant class must match class of r"
    return gram, square_class, eps


# ---------------------------------------------------------------------------
# su^(n) slices and filtration orders.


def su_dimension(d: int, parity_n: int, group: str = "SU") -> int:
    """dim of the level slice at parity of n: C(d,2) odd, C(d+1,2)-1 even.

    The U variant drops the trace condition: C(d+1,2) at even levels.
    """
    if parity_n % 2 == 1:
        return comb(d, 2)
    return comb(d + 1, 2) - (1 if group == "SU" else 0)


def su_basis(form: HermitianForm, parity_n: int, group: str = "SU"):
    """Basis of {A : Gamma A = (-1)^n A^T Gamma (, tr A = 0)} over F_ell."""
    ell = form.ctx.ell
    d = form.dim
    ginv = form.gamma_inv_mod()
    sign = (-1) ** parity_n
    basis = []
    for i in range(d):
        for j in range(i + 1, d):
            m = mat_zero(d)
            m[i][j] = ginv[i]
            m[j][i] = (sign * ginv[j]) % ell
            basis.append(mat_mod(m, ell))
    if parity_n % 2 == 0:
        if group == "SU":
            for i in range(d - 1):
                m = mat_zero(d)
                m[i][i] = 1
                m[d - 1][d - 1] = -1 % ell
                basis.append(m)
        else:
            for i in range(d):
                m = mat_zero(d)
                m[i][i] = ginv[i]
                basis.append(m)
    return basis


def su_dimension_and_basis(form: HermitianForm, parity_n: int, group: str = "SU"):
    basis = su_basis(form, parity_n, group)
    dim = su_dimension(form.dim, parity_n, group)
    assert len(basis) == dim
    return dim, basis


def check_su_slice_predicate(m, form: HermitianForm, parity_n: int, group: str = "SU") -> bool:
    """The defining predicate Gamma A = (-1)^n A^T Gamma (and tr A = 0 for SU)."""
    ell = form.ctx.ell
    gam = [[form.gamma[i] if i == j else 0 for j in range(form.dim)] for i in range(form.dim)]
    left = mat_mul_mod(gam, m, ell)
    right = mat_scale_mod((-1) ** parity_n, mat_mul_mod(mat_transpose(m), gam, ell), ell)
    if left != right:
        return False
    if group == "SU" and sum(m[i][i] for i in range(form.dim)) % ell != 0:
        return False
    return True


def filtration_order_exponent(ell: int, d: int, n: int, k: int, group: str = "SU") -> int:
    """Exponent e with |G(V/lambda^n)_k| = ell^e for G in {SU, U}."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return sum(su_dimension(d, i + 1, group) for i in range(k, n))


# ---------------------------------------------------------------------------
# The constructive lift SU(V/lambda^(n-1))_1 -> SU(V/lambda^n)_1.


def lift_su(a: MatLocal, form: HermitianForm) -> MatLocal:
    """Lift a member of SU(V/lambda^(n-1))_1 to SU(V/lambda^n)_1.

    Measures the defect X of an arbitrary lift via A'^dagger Gamma A' =
    Gamma + lambda^(n-1) X, solves X = Gamma Y + (-1)^(n-1) Y^T Gamma with
    Y = (1/2) Gamma^(-1) X, fixes the trace with a multiple of E_11, and
    returns A' - lambda^(n-1) Y.
    """
    ell = a.ctx.ell
    n = a.ctx.precision + 1
    if a.filtration_level() < 1:
        raise MembershipError("lift_su needs A = I mod lambda")
    verdict = classify_membership(a, form)
    if verdict.kind != "SU":
        raise MembershipError(f"lift_su needs an SU member, got {verdict.kind}")
    form_n = HermitianForm(form.ctx.at_precision(n), form.gamma, form.sign)
    a_prime = a.pad_zero(n)
    gam = form_n.gamma_matrix()
    h = a_prime.dagger() * gam * a_prime
    delta = h - gam
    x = delta.digit(n - 1)
    assert all(
        all(e.digits[i] == 0 for i in range(n - 1)) for row in delta.entries for e in row
    ), "defect must vanish below the top digit"
    c = det_local(a_prime).digits[n - 1]
    inv2 = pow(2, -1, ell)
    ginv = form_n.gamma_inv_mod()
    y = [[inv2 * ginv[i] * x[i][j] % ell for j in range(a.dim)] for i in range(a.dim)]
    if n % 2 == 0:
        tr_y = sum(y[i][i] for i in range(a.dim)) % ell
        y[0][0] = (y[0][0] + (c - tr_y)) % ell
    correction = MatLocal.from_digit_matrices(
        form_n.ctx, a.dim, [mat_zero(a.dim)] * (n - 1) + [y]
    )
    return a_prime - correction


def random_su_element(form: HermitianForm, precision: int, rng) -> MatLocal:
    """Random member of SU(V/lambda^n)_1, built by lifting with random
    twists by level slices I + lambda^m * S, S in su^(m+1)."""
    ell = form.ctx.ell
    d = form.dim
    a = MatLocal.identity(form.ctx.at_precision(1), d)
    for m in range(1, precision):
        form_m = HermitianForm(form.ctx.at_precision(m), form.gamma, form.sign)
        a = lift_su(a, form_m)
        basis = su_basis(HermitianForm(form.ctx.at_precision(m + 1), form.gamma, form.sign), m + 1)
        s = mat_zero(d)
        for b in basis:
            coef = rng.randrange(ell)
            if coef:
                s = mat_add_mod(s, mat_scale_mod(coef, b, ell), ell)
        twist = MatLocal.from_digit_matrices(
            form.ctx.at_precision(m + 1), d, [mat_eye(d)] + [mat_zero(d)] * (m - 1) + [s]
        )
        a = a * twist
    return a


# ---------------------------------------------------------------------------
# The permutation embedding S_r -> Gl_(r-1)(F_ell).


def perm_embed(sigma, ell: int):
    """Matrix of a permutation of {1..r} on F_ell^r / diag(F_ell).

    sigma is given in one-line notation as a tuple of images of 1..r
    (1-based).  Basis: classes of e_1, ..., e_(r-1); the class of e_r is
    -(e_1 + ... + e_(r-1)).
    """
    r = len(sigma)
    if sorted(sigma) != list(range(1, r + 1)):
        raise ValueError("sigma must be a permutation of 1..r in one-line notation")
    cols = []
    for i in range(1, r):
        image = sigma[i - 1]
        if image < r:
            col = [1 if k == image else 0 for k in range(1, r)]
        else:
            col = [-1 % ell] * (r - 1)
        cols.append(col)
    return [[cols[j][i] for j in range(r - 1)] for i in range(r - 1)]

"""Noncommutative truncated power series over free symbols, used to verify
the group-commutator expansion ABA^(-1)B^(-1) for congruence-filtration
elements symbolically, plus the matching numeric checks on matrices and
the E_ij bracket table.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .ring import CycloElt, RingCtx, DomainError
from .matrices import (
    HermitianForm,
    MatLocal,
    MembershipError,
    lift_su,
    mat_add_mod,
    mat_mul_mod,
    mat_scale_mod,
    mat_zero,
    su_dimension,
)


class AlphabetMismatch(ValueError):
    pass


class FreeSeries:
    """Truncated series sum c * t^deg * word with word over a fixed alphabet.

    Coefficients are exact rationals; terms of t-degree >= truncation are
    discarded.  Words concatenate without commuting.
    """

    __slots__ = ("alphabet", "truncation", "terms")

    def __init__(self, alphabet, truncation: int, terms=None):
        self.alphabet = tuple(alphabet)
        self.truncation = truncation
        clean = {}
        for (deg, word), coef in (terms or {}).items():
            coef = Fraction(coef)
            if coef and deg < truncation:
                for sym in word:
                    if sym not in self.alphabet:
                        raise AlphabetMismatch(f"unknown symbol {sym!r}")
                clean[(deg, tuple(word))] = coef
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def one(cls, alphabet, truncation: int) -> "FreeSeries":
        return cls(alphabet, truncation, {(0, ()): Fraction(1)})

    @classmethod
    def symbol(cls, alphabet, truncation: int, name: str, tdeg: int = 0) -> "FreeSeries":
        return cls(alphabet, truncation, {(tdeg, (name,)): Fraction(1)})

    # -- ring structure ----------------------------------------------------

    def _check(self, other: "FreeSeries"):
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch("series over different alphabets")
        if self.truncation != other.truncation:
            raise AlphabetMismatch("series with different truncations")

    def __add__(self, other: "FreeSeries") -> "FreeSeries":
        self._check(other)
        terms = dict(self.terms)
        for key, coef in other.terms.items():
            terms[key] = terms.get(key, Fraction(0)) + coef
        return FreeSeries(self.alphabet, self.truncation, terms)

    def __neg__(self) -> "FreeSeries":
        return FreeSeries(
            self.alphabet, self.truncation, {k: -c for k, c in self.terms.items()}
        )

    def __sub__(self, other: "FreeSeries") -> "FreeSeries":
        return self + (-other)

    def __mul__(self, other: "FreeSeries") -> "FreeSeries":
        self._check(other)
        terms = {}
        for (d1, w1), c1 in self.terms.items():
            for (d2, w2), c2 in other.terms.items():
                d = d1 + d2
                if d < self.truncation:
                    key = (d, w1 + w2)
                    terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return FreeSeries(self.alphabet, self.truncation, terms)

    def scale(self, c) -> "FreeSeries":
        c = Fraction(c)
        return FreeSeries(
            self.alphabet, self.truncation, {k: c * v for k, v in self.terms.items()}
        )

    def shift_t(self, k: int) -> "FreeSeries":
        """Multiply by t^k."""
        return FreeSeries(
            self.alphabet,
            self.truncation,
            {(deg + k, word): c for (deg, word), c in self.terms.items()},
        )

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1]))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeSeries)
            and self.alphabet == other.alphabet
            and self.truncation == other.truncation
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        if not self.terms:
            return "FreeSeries(0)"
        bits = []
        for (deg, word), coef in self.sorted_terms():
            w = "*".join(word) if word else "1"
            bits.append(f"{coef}*t^{deg}*{w}")
        return "FreeSeries(" + " + ".join(bits) + ")"


def series_mul(p: FreeSeries, q: FreeSeries) -> FreeSeries:
    return p * q


# ---------------------------------------------------------------------------
# The symbolic commutator identity.


def _bracket(p: FreeSeries, q: FreeSeries) -> FreeSeries:
    return p * q - q * p


def commutator_alphabet(n: int):
    big_n = (n - 1) // 2
    return tuple(f"A{i}" for i in range(big_n, n)) + tuple(
        f"B{i}" for i in range(big_n, n)
    )


@lru_cache(maxsize=None)
def commutator_case_expression(n: int, alphabet=None) -> FreeSeries:
    """The case-split closed form for ABA^(-1)B^(-1) with A, B = I + higher
    terms starting at t-degree floor((n-1)/2)."""
    big_n = (n - 1) // 2
    alphabet = alphabet or commutator_alphabet(n)
    sym = lambda name, deg=0: FreeSeries.symbol(alphabet, n, name, deg)
    one = FreeSeries.one(alphabet, n)
    a = {i: sym(f"A{i}") for i in range(big_n, n)}
    b = {i: sym(f"B{i}") for i in range(big_n, n)}
    if n % 2 == 1:
        return one + _bracket(a[big_n], b[big_n]).shift_t(n - 1)
    if n >= 6:
        return (
            one
            + _bracket(a[big_n], b[big_n]).shift_t(n - 2)
            + (_bracket(a[big_n], b[big_n + 1]) + _bracket(a[big_n + 1], b[big_n])).shift_t(n - 1)
        )
    # n = 4: the quadratic correction does not vanish at this depth
    extra = _bracket(b[1], a[1]) * (a[1] + b[1])
    return (
        one
        + _bracket(a[1], b[1]).shift_t(2)
        + (_bracket(a[1], b[2]) + _bracket(a[2], b[1]) + extra).shift_t(3)
    )


def commutator_residual(n: int) -> FreeSeries:
    """A*B - (case formula)*B*A, truncated at t^n; zero iff the identity holds."""
    if n < 3:
        raise ValueError("need n >= 3")
    big_n = (n - 1) // 2
    alphabet = commutator_alphabet(n)
    one = FreeSeries.one(alphabet, n)
    aa = one
    bb = one
    for i in range(big_n, n):
        aa = aa + FreeSeries.symbol(alphabet, n, f"A{i}", i)
        bb = bb + FreeSeries.symbol(alphabet, n, f"B{i}", i)
    comm = commutator_case_expression(n, alphabet)
    return aa * bb - comm * bb * aa


def verify_commutator_identity(n: int):
    """Returns (holds, residual_terms) for the case-split commutator formula."""
    residual = commutator_residual(n)
    return residual.is_zero(), residual.sorted_terms()


# ---------------------------------------------------------------------------
# Evaluation of a series at t = lambda with matrices for the symbols.


def series_evaluate(p: FreeSeries, assignment, ctx: RingCtx, dim: int) -> MatLocal:
    """Substitute integer matrices (mod ell) for the symbols, t -> lambda.

    Rational coefficients must have denominator prime to ell.
    """
    # Words are products of integer matrices; accumulate them exactly over Q
    # per t-degree, and convert to ring elements once at the end.
    by_deg = {}
    for (deg, word), coef in p.terms.items():
        if coef.denominator % ctx.ell == 0:
            raise DomainError("coefficient denominator not invertible")
        m = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
        for sym in word:
            sm = assignment[sym]
            m = [
                [sum(m[i][k] * sm[k][j] for k in range(dim)) for j in range(dim)]
                for i in range(dim)
            ]
        acc = by_deg.setdefault(
            deg, [[Fraction(0)] * dim for _ in range(dim)]
        )
        for i in range(dim):
            for j in range(dim):
                acc[i][j] += coef * m[i][j]
    inv_cache = {}

    def ring_fraction(q: Fraction) -> CycloElt:
        num = CycloElt.from_int(q.numerator, ctx)
        if q.denominator == 1:
            return num
        if q.denominator not in inv_cache:
            inv_cache[q.denominator] = CycloElt.from_int(
                q.denominator, ctx
            ).inverse()
        return num * inv_cache[q.denominator]

    total = MatLocal.from_rows(
        [[CycloElt.zero(ctx) for _ in range(dim)] for _ in range(dim)]
    )
    for deg, acc in by_deg.items():
        lam_pow = CycloElt.lam(ctx, 1) ** deg if deg else CycloElt.one(ctx)
        block = MatLocal.from_rows(
            [[ring_fraction(acc[i][j]) * lam_pow for j in range(dim)] for i in range(dim)]
        )
        total = total + block
    return total


def _int_matrix(rows, ctx: RingCtx) -> MatLocal:
    return MatLocal.from_rows(
        [[CycloElt.from_int(x, ctx) for x in row] for row in rows]
    )


# ---------------------------------------------------------------------------
# Numeric commutator checks on actual matrices.


def group_commutator(a: MatLocal, b: MatLocal) -> MatLocal:
    # The Neumann series converges (and is cheaper) for level >= 1 members;
    # the two inversion routes are cross-checked in the test suite.
    inv_a = a.inverse_neumann() if a.filtration_level() >= 1 else a.inverse()
    inv_b = b.inverse_neumann() if b.filtration_level() >= 1 else b.inverse()
    return a * b * inv_a * inv_b


def matrix_commutator_check(a: MatLocal, b: MatLocal) -> bool:
    """Check ABA^(-1)B^(-1) against the case formula for level-N members.

    Separately, elements at levels i, j with i + j >= n must commute.
    """
    if a.ctx != b.ctx or a.dim != b.dim:
        raise ValueError("matrix mismatch")
    ctx = a.ctx
    n = ctx.precision
    big_n = (n - 1) // 2
    if a.filtration_level() < big_n or b.filtration_level() < big_n:
        raise MembershipError(f"both matrices must be trivial mod lambda^{big_n}")
    comm = group_commutator(a, b)
    alphabet = commutator_alphabet(n)
    assignment = {}
    for i in range(big_n, n):
        assignment[f"A{i}"] = a.digit(i)
        assignment[f"B{i}"] = b.digit(i)
    expected = series_evaluate(
        commutator_case_expression(n, alphabet), assignment, ctx, a.dim
    )
    if comm != expected:
        return False
    if a.filtration_level() + b.filtration_level() >= n:
        if comm != MatLocal.identity(ctx, a.dim):
            return False
    return True


def central_commutator_check(a: MatLocal, b: MatLocal) -> bool:
    """Elements of levels i, j with i + j >= n commute exactly."""
    n = a.ctx.precision
    if a.filtration_level() + b.filtration_level() < n:
        raise MembershipError("levels do not add up to the precision")
    return group_commutator(a, b) == MatLocal.identity(a.ctx, a.dim)


# ---------------------------------------------------------------------------
# The bracket table for the slice generators.


def _gamma_inv_eij(form: HermitianForm, i: int, j: int, parity: int):
    """Gamma^(-1) (E_ij + (-1)^parity E_ji) over F_ell, 0-based indices."""
    ell = form.ctx.ell
    ginv = form.gamma_inv_mod()
    m = mat_zero(form.dim)
    m[i][j] = (m[i][j] + ginv[i]) % ell
    m[j][i] = (m[j][i] + (-1) ** parity * ginv[j]) % ell
    return m


def eij_bracket_table(form: HermitianForm, i: int, j: int, l: int, m: int, n: int):
    """[Gamma^(-1)E_ij^(m), Gamma^(-1)E_jl^(n)] over F_ell (1-based indices).

    Asserts the closed form: alpha_j^(-1) Gamma^(-1) E_il^(m+n+1) for i != l,
    and (1 + (-1)^(m+n+1)) alpha_i^(-1) alpha_j^(-1) (E_ii - E_jj) for i = l.
    """
    if j == i or j == l:
        raise ValueError("need j distinct from i and l")
    d = form.dim
    if not all(1 <= t <= d for t in (i, j, l)):
        raise ValueError("indices out of range")
    ell = form.ctx.ell
    i0, j0, l0 = i - 1, j - 1, l - 1
    x = _gamma_inv_eij(form, i0, j0, m)
    y = _gamma_inv_eij(form, j0, l0, n)
    bracket = mat_add_mod(
        mat_mul_mod(x, y, ell), mat_scale_mod(-1, mat_mul_mod(y, x, ell), ell), ell
    )
    ginv = form.gamma_inv_mod()
    if i != l:
        expected = mat_scale_mod(ginv[j0], _gamma_inv_eij(form, i0, l0, m + n + 1), ell)
    else:
        coef = (1 + (-1) ** (m + n + 1)) * ginv[i0] * ginv[j0]
        e = mat_zero(d)
        e[i0][i0] = 1
        e[j0][j0] = -1 % ell
        expected = mat_scale_mod(coef, e, ell)
    assert bracket == expected, "bracket table mismatch"
    return bracket


# ---------------------------------------------------------------------------
# Span of top-level commutators of lifted slice generators.


def int_mat_rank_mod(vectors, p: int) -> int:
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    col = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                f = rows[r][col]
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _lift_slice_generator(form: HermitianForm, level: int, gen, precision: int) -> MatLocal:
    """Lift I + lambda^level * gen from precision level+1 up to the target."""
    ctx = form.ctx.at_precision(level + 1)
    a = MatLocal.from_digit_matrices(
        ctx, form.dim, [ [ [1 if p == q else 0 for q in range(form.dim)] for p in range(form.dim)] ]
        + [mat_zero(form.dim)] * (level - 1) + [gen],
    )
    for mprec in range(level + 1, precision):
        a = lift_su(a, HermitianForm(form.ctx.at_precision(mprec), form.gamma, form.sign))
    return a


def su_commutator_span_check(ell: int, d: int, n: int, sign: int = 1) -> bool:
    """Top digits of commutators of lifted slice generators span the level-n
    slice: collect digit n-1 of [[A, B]] over the prescribed generator pairs
    and compare the F_ell-rank with the slice dimension."""
    if n < 3 or d < 3:
        raise ValueError("need n >= 3 and d >= 3")
    ctx1 = RingCtx(ell, 1)
    form = HermitianForm.standard(ctx1, d, sign)
    big_n = (n - 1) // 2
    big_m = n - 1 - big_n
    vectors = []
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            if j == i:
                continue
            for l in range(1, d + 1):
                if l == j:
                    continue
                gen_a = _gamma_inv_eij(form, i - 1, j - 1, big_n + 1)
                gen_b = _gamma_inv_eij(form, j - 1, l - 1, big_m + 1)
                a = _lift_slice_generator(form, big_n, gen_a, n)
                b = _lift_slice_generator(form, big_m, gen_b, n)
                comm = group_commutator(a, b)
                top = comm.digit(n - 1)
                vectors.append([top[p][q] for p in range(d) for q in range(d)])
    return int_mat_rank_mod(vectors, ell) == su_dimension(d, n)

"""Exact arithmetic in O/lambda^n, where O = Z[zeta_ell] and lambda = 1 - zeta_ell.

Elements are stored by their canonical lambda-adic digits: residues in
{0, ..., ell-1} giving the coefficients of lambda^0, ..., lambda^(n-1).
All arithmetic routes through exact integer polynomials in the power basis
1, zeta, ..., zeta^(ell-2), so no rounding ever occurs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache


class RingError(Exception):
    """Base class for errors raised by the local-ring layer."""


class ContextMismatch(RingError):
    """Operands built over different (ell, precision) contexts."""


class NotAUnit(RingError):
    """Inversion of an element with nonzero lambda-valuation."""

    def __init__(self, ord_lambda: int):
        super().__init__(f"element is not a unit (ord_lambda = {ord_lambda})")
        self.ord_lambda = ord_lambda


class DomainError(RingError):
    """Operand outside the domain of a partial operation (log/exp, shifts)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class RingCtx:
    """Ambient ring O/lambda^n: an odd prime ell and a truncation level."""

    ell: int
    precision: int

    def __post_init__(self):
        if self.ell < 3 or not is_prime(self.ell):
            raise ValueError(f"ell must be an odd prime, got {self.ell}")
        if self.precision < 1:
            raise ValueError(f"precision must be >= 1, got {self.precision}")

    def at_precision(self, n: int) -> "RingCtx":
        return RingCtx(self.ell, n)


# ---------------------------------------------------------------------------
# Integer polynomials in zeta, reduced to the basis 1, zeta, ..., zeta^(ell-2).
# Represented as tuples of ell-1 exact integers.

def reduce_zeta_poly(coeffs, ell: int) -> tuple:
    """Reduce an integer polynomial in zeta to the canonical power basis."""
    folded = [0] * ell
    for e, c in enumerate(coeffs):
        folded[e % ell] += c
    top = folded[ell - 1]
    # zeta^(ell-1) = -(1 + zeta + ... + zeta^(ell-2))
    return tuple(folded[i] - top for i in range(ell - 1))


def zeta_poly_mul(a: tuple, b: tuple, ell: int) -> tuple:
    prod = [0] * (2 * ell - 3)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    return reduce_zeta_poly(prod, ell)


def zeta_poly_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def zeta_poly_galois(a: tuple, j: int, ell: int) -> tuple:
    """Apply sigma_j: zeta -> zeta^j to a reduced polynomial."""
    out = [0] * (ell + 1)
    for e, c in enumerate(a):
        out[(e * j) % ell] += c
    return reduce_zeta_poly(out, ell)


@lru_cache(maxsize=None)
def _nu_poly(ell: int) -> tuple:
    """The integral element ell / lambda = prod_{j=2}^{ell-1} (1 - zeta^j)."""
    nu = reduce_zeta_poly((1,), ell)
    for j in range(2, ell):
        factor = [0] * (j + 1)
        factor[0] = 1
        factor[j] = -1
        nu = zeta_poly_mul(nu, reduce_zeta_poly(factor, ell), ell)
    return nu


_LAMBDA = {}


def _lambda_poly(ell: int) -> tuple:
    if ell not in _LAMBDA:
        _LAMBDA[ell] = reduce_zeta_poly((1, -1), ell)
    return _LAMBDA[ell]


def digits_from_poly(poly, ell: int, n: int) -> tuple:
    """Extract the n leading lambda-adic digits of an integer zeta-polynomial.

    Step i: the residue mod lambda is p(1) mod ell; subtracting it leaves an
    exact multiple of lambda.  Division by lambda = 1 - zeta is performed by
    lifting to a representative with a root at 1 (adding a multiple of the
    minimal polynomial of zeta) and synthetic division by x - 1.
    """
    p = list(reduce_zeta_poly(poly, ell))
    digits = []
    for _ in range(n):
        total = sum(p)
        d = total % ell
        digits.append(d)
        p[0] -= d
        k = (total - d) // ell
        # q = p - k * Phi_ell has q(1) = 0; compute s = q / (x - 1), then
        # p / lambda = -s since lambda = -(x - 1) at x = zeta.
        s = [0] * (ell - 1)
        s[ell - 2] = -k
        for j in range(ell - 2, 0, -1):
            s[j - 1] = (p[j] - k) + s[j]
        assert p[0] - k + s[0] == 0, "inexact division by lambda"
        p = [-c for c in s]
    return tuple(digits)


@lru_cache(maxsize=None)
def _lambda_power_table(ell: int, n: int) -> tuple:
    lam = _lambda_poly(ell)
    powers = [(1,) + (0,) * (ell - 2)]
    for _ in range(1, n):
        powers.append(zeta_poly_mul(powers[-1], lam, ell))
    return tuple(powers)


def poly_from_digits(digits, ell: int) -> tuple:
    """Exact integer lift sum_i digits[i] * lambda^i."""
    powers = _lambda_power_table(ell, len(digits))
    acc = [0] * (ell - 1)
    for d, p in zip(digits, powers):
        if d:
            for s, c in enumerate(p):
                acc[s] += d * c
    return tuple(acc)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CycloElt:
    """An element of O/lambda^n in canonical digit form."""

    ctx: RingCtx
    digits: tuple

    def __post_init__(self):
        if len(self.digits) != self.ctx.precision:
            raise ValueError("digit count must equal the context precision")
        if any(not (0 <= d < self.ctx.ell) for d in self.digits):
            raise ValueError("digits must lie in {0, ..., ell-1}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_poly(coeffs, ctx: RingCtx) -> "CycloElt":
        return CycloElt(ctx, digits_from_poly(tuple(coeffs), ctx.ell, ctx.precision))

    @staticmethod
    def from_int(k: int, ctx: RingCtx) -> "CycloElt":
        return CycloElt.from_poly((k,), ctx)

    @staticmethod
    def zero(ctx: RingCtx) -> "CycloElt":
        return CycloElt(ctx, (0,) * ctx.precision)

    @staticmethod
    def one(ctx: RingCtx) -> "CycloElt":
        return CycloElt.from_int(1, ctx)

    @staticmethod
    def zeta(ctx: RingCtx, power: int = 1) -> "CycloElt":
        coeffs = [0] * (power % ctx.ell) + [1]
        return CycloElt.from_poly(coeffs, ctx)

    @staticmethod
    def lam(ctx: RingCtx, power: int = 1) -> "CycloElt":
        digits = [0] * ctx.precision
        if power < ctx.precision:
            digits[power] = 1
        return CycloElt(ctx, tuple(digits))

    # -- basic queries -----------------------------------------------------

    @property
    def ord_lambda(self) -> int:
        for i, d in enumerate(self.digits):
            if d:
                return i
        return self.ctx.precision

    @property
    def is_unit(self) -> bool:
        return self.digits[0] != 0

    def is_zero(self) -> bool:
        return all(d == 0 for d in self.digits)

    def lift_poly(self) -> tuple:
        """Exact integer representative in the zeta power basis (memoized)."""
        cached = getattr(self, "_lift", None)
        if cached is None:
            cached = poly_from_digits(self.digits, self.ctx.ell)
            object.__setattr__(self, "_lift", cached)
        return cached

    # -- ring structure ----------------------------------------------------

    def _check(self, other: "CycloElt"):
        if self.ctx != other.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def __add__(self, other: "CycloElt") -> "CycloElt":
        self._check(other)
        return CycloElt.from_poly(
            zeta_poly_add(self.lift_poly(), other.lift_poly()), self.ctx
        )

    def __neg__(self) -> "CycloElt":
        return CycloElt.from_poly(tuple(-c for c in self.lift_poly()), self.ctx)

    def __sub__(self, other: "CycloElt") -> "CycloElt":
        return self + (-other)

    def __mul__(self, other) -> "CycloElt":
        if isinstance(other, int):
            other = CycloElt.from_int(other, self.ctx)
        self._check(other)
        return CycloElt.from_poly(
            zeta_poly_mul(self.lift_poly(), other.lift_poly(), self.ctx.ell), self.ctx
        )

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "CycloElt":
        if k < 0:
            return self.inverse() ** (-k)
        result = CycloElt.one(self.ctx)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "CycloElt":
        """Multiplicative inverse; Newton iteration doubles lambda-precision."""
        if not self.is_unit:
            raise NotAUnit(self.ord_lambda)
        x = CycloElt.from_int(pow(self.digits[0], -1, self.ctx.ell), self.ctx)
        prec = 1
        while prec < self.ctx.precision:
            x = x * (CycloElt.from_int(2, self.ctx) - self * x)
            prec *= 2
        return x

    def conjugate(self) -> "CycloElt":
        """The involution zeta -> zeta^(-1)."""
        return self.galois(self.ctx.ell - 1)

    def galois(self, j: int) -> "CycloElt":
        """Apply sigma_j: zeta -> zeta^j.  Requires gcd(j, ell) = 1."""
        if j % self.ctx.ell == 0:
            raise DomainError(f"sigma_j needs j invertible mod ell, got j = {j}")
        return CycloElt.from_poly(
            zeta_poly_galois(self.lift_poly(), j % self.ctx.ell, self.ctx.ell), self.ctx
        )

    # -- precision management ---------------------------------------------

    def truncate(self, n: int) -> "CycloElt":
        if n > self.ctx.precision:
            raise DomainError("cannot truncate upward")
        return CycloElt(self.ctx.at_precision(n), self.digits[:n])

    def pad_zero(self, n: int) -> "CycloElt":
        """Choose the representative with zero high digits at precision n."""
        if n < self.ctx.precision:
            raise DomainError("pad_zero only extends precision")
        return CycloElt(
            self.ctx.at_precision(n), self.digits + (0,) * (n - self.ctx.precision)
        )

    def shift_down(self, k: int) -> "CycloElt":
        """Exact division by lambda^k; the leading k digits must vanish."""
        if k == 0:
            return self
        if any(self.digits[:k]):
            raise DomainError(f"not divisible by lambda^{k}")
        return CycloElt(self.ctx.at_precision(self.ctx.precision - k), self.digits[k:])

    def shift_up(self, k: int) -> "CycloElt":
        """Multiplication by lambda^k, raising the precision accordingly."""
        return CycloElt(self.ctx.at_precision(self.ctx.precision + k), (0,) * k + self.digits)

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "ell": self.ctx.ell,
            "precision": self.ctx.precision,
            "digits": list(self.digits),
        }

    @staticmethod
    def from_json_dict(d: dict) -> "CycloElt":
        return CycloElt(RingCtx(d["ell"], d["precision"]), tuple(d["digits"]))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def from_json(s: str) -> "CycloElt":
        return CycloElt.from_json_dict(json.loads(s))

    def __repr__(self):
        return f"CycloElt(ell={self.ctx.ell}, digits={list(self.digits)})"


def canonicalize(coeffs, ctx: RingCtx) -> CycloElt:
    """Canonical digits of an integer-coefficient polynomial in zeta."""
    return CycloElt.from_poly(coeffs, ctx)


# ---------------------------------------------------------------------------
# Division by rational integers and the truncated log / exp.


def unit_part_of_ell(ctx: RingCtx) -> CycloElt:
    """The unit u with ell = lambda^(ell-1) * u, at the context precision."""
    ell = ctx.ell
    wide = CycloElt.from_int(ell, ctx.at_precision(ctx.precision + ell - 1))
    return wide.shift_down(ell - 1)


def div_by_int(a: CycloElt, k: int) -> CycloElt:
    """Exact division by a nonzero integer k.

    The prime-to-ell part of k is a unit; each factor of ell costs ell-1
    digits of precision, so the result lives at precision n - (ell-1)*s.
    """
    if k == 0:
        raise ZeroDivisionError
    ell = a.ctx.ell
    sign = -1 if k < 0 else 1
    k = abs(k)
    s = 0
    while k % ell == 0:
        k //= ell
        s += 1
    out = a
    if k != 1:
        out = out * CycloElt.from_int(k, out.ctx).inverse()
    if s:
        loss = s * (ell - 1)
        if out.ord_lambda < loss:
            raise DomainError(f"element not divisible by ell^{s}")
        u_inv = unit_part_of_ell(out.ctx).inverse()
        for _ in range(s):
            out = out * u_inv
        out = out.shift_down(loss)
    if sign < 0:
        out = -out
    return out


def _ord_ell_factorial(k: int, ell: int) -> int:
    s, p = 0, ell
    while p <= k:
        s += k // p
        p *= ell
    return s


def log1p(x: CycloElt) -> CycloElt:
    """Truncated ell-adic logarithm on 1 + lambda^2 * O."""
    ctx = x.ctx
    ell, n = ctx.ell, ctx.precision
    w = x - CycloElt.one(ctx)
    if not w.is_zero() and w.ord_lambda < 2:
        raise DomainError("log1p requires ord_lambda(x - 1) >= 2")
    # Terms with k > n have valuation >= 2k - (ell-1)*log_ell(k) > n.
    kmax = n
    smax = 0
    p = ell
    while p <= kmax:
        smax += 1
        p *= ell
    n_ext = n + (ell - 1) * smax
    w_ext = w.pad_zero(n_ext)
    total = CycloElt.zero(ctx.at_precision(n))
    power = CycloElt.one(ctx.at_precision(n_ext))
    for k in range(1, kmax + 1):
        power = power * w_ext
        term = div_by_int(power, k)
        term = term.truncate(n)
        total = total + term if k % 2 == 1 else total - term
    return total


def exp(x: CycloElt) -> CycloElt:
    """Truncated ell-adic exponential on lambda^2 * O."""
    ctx = x.ctx
    ell, n = ctx.ell, ctx.precision
    if not x.is_zero() and x.ord_lambda < 2:
        raise DomainError("exp requires ord_lambda(x) >= 2")
    kmax = n  # term k has valuation >= k + 1
    n_ext = n + (ell - 1) * _ord_ell_factorial(kmax, ell)
    x_ext = x.pad_zero(n_ext)
    total = CycloElt.one(ctx.at_precision(n))
    power = CycloElt.one(ctx.at_precision(n_ext))
    fact = 1
    for k in range(1, kmax + 1):
        power = power * x_ext
        fact *= k
        total = total + div_by_int(power, fact).truncate(n)
    return total

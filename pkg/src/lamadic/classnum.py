"""Exact arithmetic of the class-number invariants: the weights n(j) and
n'(j), the half-system determinant matrix [n'(i j^{-1})], the constant
c_{l,r} attached to the multiplicative order of r, the relative class
number h_l^- via generalized Bernoulli numbers, and the exponents
(kappa bound, t).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .ring import DomainError, is_prime


def _check_ell(ell: int):
    if ell < 3 or not is_prime(ell):
        raise DomainError(f"ell = {ell} must be an odd prime")


def _check_r(ell: int, r: int):
    _check_ell(ell)
    if r % ell == 0:
        raise DomainError(f"ell = {ell} must not divide r = {r}")


def n_of(ell: int, r: int, j: int) -> int:
    """The weight n(j) = floor(r*(ell - j)/ell) for j in 1..ell-1."""
    _check_r(ell, r)
    if not 1 <= j % ell <= ell - 1:
        raise DomainError("j must be a unit mod ell")
    j %= ell
    return (r * (ell - j)) // ell


def n_prime(ell: int, r: int, j: int) -> Fraction:
    """n'(j) = n(j) - (r-1)/2, half-integral exactly when r is even."""
    return Fraction(n_of(ell, r, j)) - Fraction(r - 1, 2)


def c_lr(ell: int, r: int):
    """(r_ell, c) with r_ell the multiplicative order of r mod ell and
    c = (r^r_ell - 1)^((ell-1)/(2 r_ell)) for odd r_ell,
    c = (r^(r_ell/2) + 1)^((ell-1)/r_ell) for even r_ell."""
    _check_r(ell, r)
    if r < 2:
        raise DomainError("need r >= 2")
    r_ell = 1
    acc = r % ell
    while acc != 1:
        acc = acc * r % ell
        r_ell += 1
    if r_ell % 2 == 1:
        c = (r**r_ell - 1) ** ((ell - 1) // (2 * r_ell))
    else:
        c = (r ** (r_ell // 2) + 1) ** ((ell - 1) // r_ell)
    return r_ell, c


# ---------------------------------------------------------------------------
# Relative class number via the product of generalized Bernoulli numbers.


def _cyclotomic_coeffs(n: int):
    from sympy import Poly, symbols
    from sympy.polys.specialpolys import cyclotomic_poly

    x = symbols("x")
    return [int(c) for c in Poly(cyclotomic_poly(n, x), x).all_coeffs()[::-1]]


def _polymod_mul(a, b, phi):
    """Multiply in Q[x]/phi(x), phi monic with integer coefficients."""
    deg = len(phi) - 1
    prod = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    prod[i + j] += ca * cb
    for k in range(len(prod) - 1, deg - 1, -1):
        c = prod[k]
        if c:
            for t in range(deg + 1):
                prod[k - deg + t] -= c * phi[t]
    return prod[:deg] + [Fraction(0)] * (deg - len(prod[:deg]))


def _primitive_root(ell: int) -> int:
    for g in range(2, ell):
        seen, acc = 0, 1
        for _ in range(ell - 1):
            acc = acc * g % ell
            seen += 1
            if acc == 1:
                break
        if seen == ell - 1:
            return g
    raise DomainError("no primitive root found")


@lru_cache(maxsize=None)
def h_minus(ell: int, bound: int = 67) -> int:
    """h^- = 2*ell * prod over odd characters chi of (-1/2) B_{1,chi},
    with B_{1,chi} = (1/ell) sum_a a*chi(a), evaluated exactly in the
    cyclotomic field of conductor ell - 1 and asserted integral."""
    _check_ell(ell)
    if ell > bound:
        raise DomainError(f"ell = {ell} exceeds the configured bound {bound}")
    m = ell - 1
    phi = [Fraction(c) for c in _cyclotomic_coeffs(m)]
    deg = len(phi) - 1
    g = _primitive_root(ell)
    # dlog[a] = discrete log of a base g
    dlog = {}
    acc = 1
    for e in range(m):
        dlog[acc] = e
        acc = acc * g % ell
    # power table of zeta_m = x in Q[x]/phi
    zpow = []
    cur = [Fraction(0)] * deg
    cur[0] = Fraction(1)
    xpoly = [Fraction(0)] * deg
    if deg > 1:
        xpoly[1] = Fraction(1)
    else:
        xpoly[0] = -phi[0]
    for _ in range(m):
        zpow.append(cur)
        cur = _polymod_mul(cur, xpoly, phi)
    product = [Fraction(0)] * deg
    product[0] = Fraction(1)
    for k in range(1, m, 2):  # odd characters chi_k(g^e) = zeta_m^(k e)
        b1 = [Fraction(0)] * deg
        for a in range(1, ell):
            z = zpow[(k * dlog[a]) % m]
            for t in range(deg):
                b1[t] += Fraction(a, ell) * z[t]
        factor = [Fraction(-1, 2) * c for c in b1]
        product = _polymod_mul(product, factor, phi)
    result = [2 * ell * c for c in product]
    for c in result[1:]:
        assert c == 0, "class number product must be rational"
    assert result[0].denominator == 1, "class number product must be integral"
    h = int(result[0])
    assert h >= 1
    return h


# ---------------------------------------------------------------------------
# The half-system matrix and its exact determinant.


def fraction_det(rows) -> Fraction:
    """Exact determinant over Q by Gaussian elimination with Fractions."""
    a = [[Fraction(x) for x in row] for row in rows]
    d = len(a)
    det = Fraction(1)
    for col in range(d):
        piv = next((r for r in range(col, d) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, d):
            f = a[r][col] * inv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def ord_p(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise DomainError("ord of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class DemjanenkoReport:
    ell: int
    r: int
    reps: tuple
    matrix: tuple  # rows of Fractions
    det: Fraction
    r_ell: int
    c_lr: int
    h_minus: int
    kappa_bound: int
    t: int
    sign: int

    def to_json_dict(self) -> dict:
        return {
            "ell": self.ell,
            "r": self.r,
            "reps": list(self.reps),
            "matrix": [[str(x) for x in row] for row in self.matrix],
            "det": str(self.det),
            "r_ell": self.r_ell,
            "c_lr": self.c_lr,
            "h_minus": self.h_minus,
            "kappa_bound": self.kappa_bound,
            "t": self.t,
            "sign": self.sign,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def half_system_matrix(ell: int, r: int, reps=None):
    """[n'(i * j^(-1) mod ell)] over the chosen half-system representatives."""
    _check_r(ell, r)
    if reps is None:
        reps = tuple(range(1, (ell - 1) // 2 + 1))
    reps = tuple(reps)
    if len(reps) != (ell - 1) // 2 or len(
        {x % ell for x in reps} | {(-x) % ell for x in reps}
    ) != ell - 1:
        raise DomainError("reps must represent the units modulo +-1")
    return reps, [
        [n_prime(ell, r, i * pow(j, -1, ell) % ell) for j in reps] for i in reps
    ]


def demjanenko_det(ell: int, r: int, reps=None, h_bound: int = 67) -> DemjanenkoReport:
    """The half-system determinant with the class-number identity asserted:
    |det| = h^- * c_{l,r} / (2 ell).  The sign is recorded, not asserted."""
    reps, matrix = half_system_matrix(ell, r, reps)
    det = fraction_det(matrix)
    r_ell, c = c_lr(ell, r)
    h = h_minus(ell, bound=h_bound)
    expected = Fraction(h * c, 2 * ell)
    assert abs(det) == expected, (
        f"determinant magnitude {abs(det)} != h^- c / (2 ell) = {expected}"
    )
    g = len(reps)
    t = ord_p(det * 2**g, ell)
    kappa_bound = ord_p(Fraction(h * c), ell) - 1
    return DemjanenkoReport(
        ell=ell,
        r=r,
        reps=reps,
        matrix=tuple(tuple(row) for row in matrix),
        det=det,
        r_ell=r_ell,
        c_lr=c,
        h_minus=h,
        kappa_bound=kappa_bound,
        t=t,
        sign=1 if det > 0 else -1,
    )


def kappa_and_t(ell: int, r: int, h_bound: int = 67):
    """(kappa upper bound, exact exponent t = ord_ell det 2[n'])."""
    rep = demjanenko_det(ell, r, h_bound=h_bound)
    return rep.kappa_bound, rep.t

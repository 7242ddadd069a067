"""Closed-form targets of the limit theorems and the series pipeline.

Cumulant/moment sequences of the four limit laws:

* ``eta_cumulant``      - compound-scaling law, kappa_n = (alpha n)^(n-1)/n!;
* ``lambda_cumulant``   - multiplicative free semicircular law;
* ``sigma_cumulant``    - free unitary normal law;
* ``pi_cumulant``       - free unitary Poisson law;

plus the fixed-ratio partition-sum limit (``sy_limit_t``) and its vanishing-
ratio limit (``sy_limit_zero``).  The independent route to the same numbers
is Lagrange inversion: kappa_n = [z^(n-1)] S(z)^(-n) / n applied to the
known S-transforms, implemented on truncated power series at 50-digit
default precision.

A flagged discrepancy: one worked example elsewhere lists the fixed-ratio
family with the opposite sign of t, i.e. (e^t - 1)/t instead of
(1 - e^(-t))/t at n = 2.  Direct evaluation of the displayed partition sum,
and every finite-degree computation in the experiment harness, produce the
decaying form implemented here; the mirrored family is intentionally NOT
"corrected" to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp

from .errors import CapExceededError
from .partitions import (
    DEFAULT_PARTITION_CAP,
    enumerate_by_type,
    enumerate_noncrossing,
)
from .scalars import DEFAULT_DIGITS, binom

NC_CAP = 10


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerSeries:
    """Truncated Taylor series c_0 + c_1 z + ... + c_N z^N.

    Arithmetic truncates at the common order.  Coefficients may be mpf (the
    default in this module) or exact rationals; they are never mixed.
    """

    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order: int) -> "PowerSeries":
        return cls((c,) + (c * 0,) * order)

    def coeff(self, j: int):
        return self.coeffs[j] if j <= self.order else self.coeffs[0] * 0

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        return PowerSeries(tuple(self.coeff(j) + other.coeff(j) for j in range(n + 1)))

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        return PowerSeries(tuple(self.coeff(j) - other.coeff(j) for j in range(n + 1)))

    def scale(self, c) -> "PowerSeries":
        return PowerSeries(tuple(c * a for a in self.coeffs))

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        zero = self.coeffs[0] * 0
        out = [zero] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a == 0:
                continue
            for j in range(n + 1 - i):
                b = other.coeff(j)
                if b != 0:
                    out[i + j] += a * b
        return PowerSeries(tuple(out))

    def inverse(self) -> "PowerSeries":
        """Reciprocal series; requires a nonzero constant term."""
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ValueError("series inverse needs a unit constant term")
        n = self.order
        inv = [1 / c0 if not isinstance(c0, Fraction) else Fraction(1) / c0]
        for j in range(1, n + 1):
            acc = inv[0] * 0
            for i in range(1, j + 1):
                acc += self.coeff(i) * inv[j - i]
            inv.append(-acc / c0)
        return PowerSeries(tuple(inv))

    def pow_int(self, m: int) -> "PowerSeries":
        if m < 0:
            return self.inverse().pow_int(-m)
        out = PowerSeries.constant(self.coeffs[0] ** 0, self.order)
        base = self
        while m:
            if m & 1:
                out = out * base
            base = base * base if m > 1 else base
            m >>= 1
        return out

    def exp(self) -> "PowerSeries":
        """exp of the series; the constant term goes through the scalar exp."""
        c0 = self.coeffs[0]
        n = self.order
        if isinstance(c0, Fraction):
            if c0 != 0:
                raise ValueError("exact series exp needs zero constant term")
            head = Fraction(1)
        else:
            head = mp.exp(c0) if isinstance(c0, mp.mpf) else math.exp(c0)
        # g' = u' g with g_0 = exp(u_0):  g_j = (1/j) sum_{i=1..j} i u_i g_{j-i}
        g = [head]
        for j in range(1, n + 1):
            acc = g[0] * 0
            for i in range(1, j + 1):
                acc += i * self.coeff(i) * g[j - i]
            g.append(acc / j)
        return PowerSeries(tuple(g))

    def derivative(self) -> "PowerSeries":
        if self.order == 0:
            return PowerSeries((self.coeffs[0] * 0,))
        return PowerSeries(tuple((j + 1) * c for j, c in enumerate(self.coeffs[1:])))


# ---------------------------------------------------------------------------
# closed-form cumulant and moment sequences
# ---------------------------------------------------------------------------

def _mpf(x, digits):
    with mp.workdps(digits):
        if isinstance(x, Fraction):
            return mp.mpf(x.numerator) / x.denominator
        return mp.mpf(x)


def eta_cumulant(n: int, alpha, digits: int = DEFAULT_DIGITS):
    """kappa_n = (alpha n)^(n-1) / n!."""
    if n < 1 or alpha < 0:
        raise ValueError("need n >= 1 and alpha >= 0")
    with mp.workdps(digits):
        a = _mpf(alpha, digits)
        return (a * n) ** (n - 1) / math.factorial(n)


def lambda_cumulant(n: int, t, digits: int = DEFAULT_DIGITS):
    """kappa_n = exp(nt/2) (nt)^(n-1) / n!."""
    if n < 1 or t < 0:
        raise ValueError("need n >= 1 and t >= 0")
    with mp.workdps(digits):
        tt = _mpf(t, digits)
        return mp.exp(n * tt / 2) * (n * tt) ** (n - 1) / math.factorial(n)


def sigma_cumulant(n: int, t, digits: int = DEFAULT_DIGITS):
    """kappa_n = exp(-nt/2) (-nt)^(n-1) / n!."""
    if n < 1 or t < 0:
        raise ValueError("need n >= 1 and t >= 0")
    with mp.workdps(digits):
        tt = _mpf(t, digits)
        return mp.exp(-n * tt / 2) * (-n * tt) ** (n - 1) / math.factorial(n)


def lambda_moment(n: int, t, digits: int = DEFAULT_DIGITS):
    """m_n = exp(nt/2) sum_{k=0}^{n-1} n^(k-1)/k! C(n,k+1) t^k."""
    if n < 1 or t < 0:
        raise ValueError("need n >= 1 and t >= 0")
    with mp.workdps(digits):
        tt = _mpf(t, digits)
        total = mp.mpf(0)
        for k in range(n):
            total += mp.mpf(n) ** (k - 1) / math.factorial(k) * binom(n, k + 1) * tt ** k
        return mp.exp(n * tt / 2) * total


def pi_cumulant(n: int, t, digits: int = DEFAULT_DIGITS):
    """kappa_n = (-1)^(n-1) 2^n e^(-2nt) sum_{k=1}^{n-1} (-t)^k/k! (2n)^(k-1) C(n-2,k-1).

    The n = 1 value is e^(-2t) by convention.
    """
    if n < 1 or not t > 0:
        raise ValueError("need n >= 1 and t > 0")
    with mp.workdps(digits):
        tt = _mpf(t, digits)
        if n == 1:
            return mp.exp(-2 * tt)
        total = mp.mpf(0)
        for k in range(1, n):
            total += (-tt) ** k / math.factorial(k) * (2 * n) ** (k - 1) * binom(n - 2, k - 1)
        return (-1) ** (n - 1) * mp.mpf(2) ** n * mp.exp(-2 * n * tt) * total


def sy_limit_t(n: int, t, kappa2=1, digits: int = DEFAULT_DIGITS,
               cap: int = DEFAULT_PARTITION_CAP):
    """Fixed-ratio limit of the scaled power-sequence cumulants.

    (-1)^(n-1) / (t^(n-1) (n-1)!) * sum over partitions pi of [n] of
    exp(-t sum_V C(|V|,2) kappa2) * mu(pi, 1_n), grouped by size profile.
    """
    if n < 1 or not t > 0:
        raise ValueError("need n >= 1 and t > 0")
    if n > cap:
        raise CapExceededError("partition sum", n, cap)
    with mp.workdps(digits):
        tt = _mpf(t, digits)
        k2 = _mpf(kappa2, digits)
        terms = []
        for typ, mult in enumerate_by_type(n):
            r = typ.num_blocks
            pairs = sum(c * binom(s, 2) for s, c in enumerate(typ.counts, start=1))
            mu = (-1) ** (r - 1) * math.factorial(r - 1)
            terms.append(mult * mu * mp.exp(-tt * pairs * k2))
        total = mp.fsum(terms)
        return (-1) ** (n - 1) / (tt ** (n - 1) * math.factorial(n - 1)) * total


def sy_limit_zero(n: int, kappa2=1, digits: int = DEFAULT_DIGITS):
    """Vanishing-ratio limit: (kappa2 n)^(n-1) / n!."""
    if n < 1:
        raise ValueError("need n >= 1")
    with mp.workdps(digits):
        k2 = _mpf(kappa2, digits)
        return (k2 * n) ** (n - 1) / math.factorial(n)


# ---------------------------------------------------------------------------
# S-transforms and Lagrange inversion
# ---------------------------------------------------------------------------

S_KINDS = ("lambda", "sigma", "pi", "identity")


def s_transform_series(kind: str, N: int, t=None,
                       digits: int = DEFAULT_DIGITS) -> PowerSeries:
    """Truncated S-transform of the requested limit law at 0.

    lambda: exp(-t(z+1/2)); sigma: exp(+t(z+1/2)); pi: exp(t/(z+1/2));
    identity: the constant 1 (point mass at 1).
    """
    if N < 1:
        raise ValueError("need order N >= 1")
    if kind not in S_KINDS:
        raise ValueError(f"unknown S-transform kind {kind!r}; pick one of {S_KINDS}")
    with mp.workdps(digits):
        if kind == "identity":
            return PowerSeries.constant(mp.mpf(1), N)
        tt = _mpf(t, digits)
        if kind == "lambda":
            u = PowerSeries(tuple([-tt / 2, -tt] + [mp.mpf(0)] * (N - 1)))
        elif kind == "sigma":
            u = PowerSeries(tuple([tt / 2, tt] + [mp.mpf(0)] * (N - 1)))
        else:
            # t/(z+1/2) = 2t * sum (-2z)^j
            u = PowerSeries(tuple(2 * tt * (-2) ** j for j in range(N + 1)))
        return u.exp()


def lagrange_cumulants(S: PowerSeries, N: int, digits: int = DEFAULT_DIGITS) -> list:
    """Free cumulants from an S-transform by Lagrange inversion.

    kappa_n = (1/n!) (d/dz)^(n-1) (z/f(z))^n at 0 with f(z) = z S(z), i.e.
    the (n-1)-st coefficient of S^(-n) divided by n.  Needs S(0) != 0.
    """
    if S.coeffs[0] == 0:
        raise ValueError("Lagrange inversion needs S(0) != 0")
    if S.order < N - 1:
        raise ValueError(f"series order {S.order} too small for N={N}")
    with mp.workdps(digits):
        inv = S.inverse()
        out = []
        power = PowerSeries.constant(inv.coeffs[0] ** 0, S.order)
        for n in range(1, N + 1):
            power = power * inv
            out.append(power.coeff(n - 1) / n)
    return out


def nc_moments_from_cumulants(kappas: Sequence, N: int, cap: int = NC_CAP,
                              digits: int = DEFAULT_DIGITS) -> list:
    """Moments from cumulants by summing over non-crossing partitions."""
    if N > len(kappas):
        raise ValueError("need kappa_1..kappa_N")
    if N > cap:
        raise CapExceededError("non-crossing moment sum", N, cap)
    out = []
    with mp.workdps(digits):
        for n in range(1, N + 1):
            total = None
            for sigma in enumerate_noncrossing(n, cap=max(cap, n)):
                term = None
                for b in sigma.blocks:
                    v = kappas[len(b) - 1]
                    term = v if term is None else term * v
                total = term if total is None else total + term
            out.append(total)
    return out

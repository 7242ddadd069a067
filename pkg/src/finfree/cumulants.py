"""Finite free cumulants and the special polynomial families.

The degree-d cumulant transform sends normalized coefficients to

    kappa_n = (-d)^(n-1)/(n-1)! * sum over partitions pi of [n] of
              atilde_pi * mu(pi, 1_n),        atilde_pi = prod_V atilde_|V|,

for n = 1..d, linearizing the additive convolution.  Because atilde_pi
depends only on block sizes, the sum is grouped by size profile, which keeps
large-d experiments cheap; the ungrouped path is kept for cross-checking.

The sum cancels to O(d^-(n-1)) against O(1) terms for the exponential
families, so mpf inputs are accumulated with ``csum`` (single rounding) and
callers should budget roughly (n-1)*log10(d) + 15 digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp

from .partitions import (
    DEFAULT_PARTITION_CAP,
    SetPartition,
    enumerate_by_type,
    enumerate_partitions,
    enumerate_refinements,
    join_all,
    mobius_bottom,
    mobius_top,
)
from .polycalc import MonicPoly, _work, boxtimes, from_normalized, normalized_coeffs
from .scalars import DEFAULT_DIGITS, EXACT, MPF, common_kind, csum, falling


@dataclass(frozen=True)
class CumulantVector:
    """kappa_1..kappa_d bound to the degree-d normalization."""

    d: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.d:
            raise ValueError("a cumulant vector carries exactly d entries")

    def __getitem__(self, n: int):
        """1-based access: kv[n] is kappa_n."""
        if not 1 <= n <= self.d:
            raise IndexError(f"kappa_{n} undefined at degree {self.d}")
        return self.values[n - 1]


# ---------------------------------------------------------------------------
# transform and inverse
# ---------------------------------------------------------------------------

def cumulants_from_atilde(d: int, atilde: Sequence, n_max: int,
                          digits: int = DEFAULT_DIGITS, grouped: bool = True) -> list:
    """kappa_1..kappa_n_max from atilde_0..atilde_n_max (or longer).

    ``grouped=True`` sums over block-size profiles with multiplicities;
    ``grouped=False`` enumerates P(n) literally (cross-check path).
    """
    if n_max > d:
        raise ValueError(f"kappa_n needs n <= d, got n={n_max}, d={d}")
    if len(atilde) < n_max + 1:
        raise ValueError("need atilde up to index n_max")
    if atilde[0] != 1:
        raise ValueError("atilde_0 must be 1")
    kind = common_kind(atilde[: n_max + 1], "cumulants_from_atilde")
    out = []
    with _work(kind, digits):
        for n in range(1, n_max + 1):
            terms = []
            if grouped:
                for t, mult in enumerate_by_type(n):
                    term = mult * _mu_top_sign(t.num_blocks)
                    for size, cnt in enumerate(t.counts, start=1):
                        for _ in range(cnt):
                            term = term * atilde[size]
                    terms.append(term)
            else:
                for pi in enumerate_partitions(n):
                    term = mobius_top(pi)
                    for b in pi.blocks:
                        term = term * atilde[len(b)]
                    terms.append(term)
            s = csum(terms, digits=digits)
            if kind == EXACT:
                out.append(Fraction((-d) ** (n - 1), math.factorial(n - 1)) * s)
            else:
                out.append(s * (-d) ** (n - 1) / math.factorial(n - 1))
    return out


def _mu_top_sign(r: int) -> int:
    return (-1) ** (r - 1) * math.factorial(r - 1)


def finite_cumulants(p: MonicPoly, digits: int = DEFAULT_DIGITS) -> CumulantVector:
    """The full cumulant vector kappa_1..kappa_d of p."""
    at = normalized_coeffs(p, digits=digits)
    vals = cumulants_from_atilde(p.degree, at, p.degree, digits=digits)
    return CumulantVector(p.degree, tuple(vals))


def atilde_from_cumulants(d: int, kappas: Sequence, n_max: int,
                          digits: int = DEFAULT_DIGITS) -> list:
    """Inverse transform: atilde_1..atilde_n_max from kappa_1..kappa_n_max.

    atilde_n = sum over sigma in P(n) of d^(|sigma|-n) mu(0_n, sigma)
    kappa_sigma, grouped by size profile.
    """
    if len(kappas) < n_max:
        raise ValueError("need kappa up to n_max")
    kind = common_kind(list(kappas[:n_max]), "atilde_from_cumulants")
    out = []
    with _work(kind, digits):
        for n in range(1, n_max + 1):
            terms = []
            for t, mult in enumerate_by_type(n):
                r = t.num_blocks
                if kind == EXACT:
                    term = mult * Fraction(1, d ** (n - r))
                else:
                    term = mult * mp.mpf(d) ** (r - n) if kind == MPF else mult * float(d) ** (r - n)
                for size, cnt in enumerate(t.counts, start=1):
                    blk = _mu_top_sign(size) * kappas[size - 1]
                    for _ in range(cnt):
                        term = term * blk
                terms.append(term)
            out.append(csum(terms, digits=digits))
    return out


def coeffs_from_cumulants(kv: CumulantVector, digits: int = DEFAULT_DIGITS) -> MonicPoly:
    """Rebuild the coefficient polynomial; exact inverse of finite_cumulants."""
    kind = common_kind(kv.values, "coeffs_from_cumulants")
    at = atilde_from_cumulants(kv.d, kv.values, kv.d, digits=digits)
    one = Fraction(1) if kind == EXACT else (mp.mpf(1) if kind == MPF else 1.0)
    return from_normalized([one] + at, digits=digits)


# ---------------------------------------------------------------------------
# multiplicative convolution on the cumulant side
# ---------------------------------------------------------------------------

def boxtimes_cumulants(ps: Sequence[MonicPoly], n: int, method: str = "pi-sum",
                       digits: int = DEFAULT_DIGITS,
                       cap: int = DEFAULT_PARTITION_CAP):
    """kappa_n of the multiplicative convolution of the family, from the
    factors' cumulants alone.

    ``pi-sum``: for each partition pi of [n], multiply over factors the
    refinement sums  sum_{sigma <= pi} d^(|sigma|-n) mu(0_n, sigma)
    kappa_sigma(p_i), and weight by mu(pi, 1_n).

    ``join-sum``: sum over m-tuples (sigma_1..sigma_m) whose join is 1_n of
    the product of the factors' weighted cumulants.  Exponential in m and n;
    capped at n <= 6.
    """
    if not ps:
        raise ValueError("need at least one polynomial")
    d = ps[0].degree
    if any(p.degree != d for p in ps):
        raise ValueError("equal degrees required")
    if n > d:
        raise ValueError(f"kappa_n needs n <= d")
    kappas = [
        cumulants_from_atilde(d, normalized_coeffs(p, digits=digits), n, digits=digits)
        for p in ps
    ]
    kind = common_kind([k for ks in kappas for k in ks], "boxtimes_cumulants")

    def kappa_sigma(i: int, sigma: SetPartition):
        out = None
        for b in sigma.blocks:
            v = kappas[i][len(b) - 1]
            out = v if out is None else out * v
        return out

    def weighted(i: int, sigma: SetPartition):
        r = sigma.num_blocks
        w = kappa_sigma(i, sigma) * mobius_bottom(sigma)
        if kind == EXACT:
            return w * Fraction(1, d ** (n - r))
        return w * (mp.mpf(d) ** (r - n) if kind == MPF else float(d) ** (r - n))

    with _work(kind, digits):
        if method == "pi-sum":
            terms = []
            for pi in enumerate_partitions(n, cap=cap):
                term = mobius_top(pi)
                for i in range(len(ps)):
                    inner = csum([weighted(i, s) for s in enumerate_refinements(pi)],
                                 digits=digits)
                    term = term * inner
                terms.append(term)
            total = csum(terms, digits=digits)
        elif method == "join-sum":
            if n > 6:
                raise ValueError("join-sum enumeration is limited to n <= 6")
            from itertools import product as iproduct

            all_parts = list(enumerate_partitions(n, cap=cap))
            top = SetPartition.top(n)
            tables = [
                {sigma: weighted(i, sigma) for sigma in all_parts}
                for i in range(len(ps))
            ]
            terms = []
            for combo in iproduct(all_parts, repeat=len(ps)):
                if join_all(combo, n) != top:
                    continue
                term = tables[0][combo[0]]
                for i in range(1, len(ps)):
                    term = term * tables[i][combo[i]]
                terms.append(term)
            total = csum(terms, digits=digits)
        else:
            raise ValueError(f"unknown method {method!r}")

        if kind == EXACT:
            return Fraction((-d) ** (n - 1), math.factorial(n - 1)) * total
        return total * (-d) ** (n - 1) / math.factorial(n - 1)


def boxtimes_fold(ps: Sequence[MonicPoly], digits: int = DEFAULT_DIGITS) -> MonicPoly:
    out = ps[0]
    for q in ps[1:]:
        out = boxtimes(out, q, digits=digits)
    return out


# ---------------------------------------------------------------------------
# special polynomial families
# ---------------------------------------------------------------------------

def laguerre_hat_atilde(d: int, lam, k: int):
    """atilde_k of the normalized Laguerre polynomial: (d*lam)_k / d^k."""
    if isinstance(lam, (int, Fraction)):
        return Fraction(falling(Fraction(d) * lam, k), d ** k)
    return falling(lam * d, k) / mp.mpf(d) ** k if isinstance(lam, mp.mpf) else falling(lam * d, k) / d ** k


def laguerre_hat(d: int, lam, digits: int = DEFAULT_DIGITS) -> MonicPoly:
    """Normalized Laguerre polynomial: all finite free cumulants equal lam."""
    if d < 1 or not lam > 0:
        raise ValueError("need d >= 1 and lam > 0")
    with _work(MPF if isinstance(lam, mp.mpf) else EXACT, digits):
        at = [laguerre_hat_atilde(d, lam, k) for k in range(d + 1)]
    return from_normalized(at, digits=digits)


def hermite_unitary_atilde(d: int, t, k: int, digits: int = DEFAULT_DIGITS):
    """atilde_k of the unitary Hermite polynomial: exp(-t k (d-k) / 2d)."""
    with mp.workdps(digits):
        return mp.exp(-mp.mpf(t) * k * (d - k) / (2 * d))


def hermite_unitary(d: int, t, digits: int = DEFAULT_DIGITS) -> MonicPoly:
    """Unitary Hermite polynomial; roots on the unit circle, coefficients real."""
    if d < 1 or t < 0:
        raise ValueError("need d >= 1 and t >= 0")
    with mp.workdps(digits):
        at = [hermite_unitary_atilde(d, t, k, digits) for k in range(d + 1)]
        at[0] = mp.mpf(1)
    return from_normalized(at, digits=digits)


def exp_poly_atilde(d: int, t, k: int, digits: int = DEFAULT_DIGITS):
    """atilde_k of the exponential-coefficient polynomial: exp(+t k (d-k) / 2d)."""
    with mp.workdps(digits):
        return mp.exp(mp.mpf(t) * k * (d - k) / (2 * d))


def exp_poly(d: int, t, digits: int = DEFAULT_DIGITS) -> MonicPoly:
    """The multiplicative-CLT limit polynomial at degree d, parameter t."""
    if d < 1 or t < 0:
        raise ValueError("need d >= 1 and t >= 0")
    with mp.workdps(digits):
        at = [exp_poly_atilde(d, t, k, digits) for k in range(d + 1)]
        at[0] = mp.mpf(1)
    return from_normalized(at, digits=digits)


def laguerre_unitary_atilde(d: int, m: int, k: int):
    """atilde_k of the unitary Laguerre polynomial: (1 - 2k/d)^m, exact."""
    return Fraction(d - 2 * k, d) ** m


def laguerre_unitary(d: int, m: int) -> MonicPoly:
    """Unitary Laguerre polynomial with exact rational coefficients."""
    if d < 1 or m < 0:
        raise ValueError("need d >= 1 and m >= 0")
    at = [laguerre_unitary_atilde(d, m, k) for k in range(d + 1)]
    return from_normalized(at)


_SPECIAL = {
    "laguerre_hat": lambda d, lam=1, digits=DEFAULT_DIGITS: laguerre_hat(d, _as_param(lam), digits),
    "hermite_unitary": lambda d, t=1, digits=DEFAULT_DIGITS: hermite_unitary(d, t, digits),
    "exp_poly": lambda d, t=1, digits=DEFAULT_DIGITS: exp_poly(d, t, digits),
    "laguerre_unitary": lambda d, m=1, digits=DEFAULT_DIGITS: laguerre_unitary(d, int(m)),
}


def _as_param(v):
    if isinstance(v, float) and not v.is_integer():
        return Fraction(v).limit_denominator(10 ** 12)
    if isinstance(v, float):
        return int(v)
    return v


def special_poly(kind: str, d: int, **params) -> MonicPoly:
    """Dispatcher for the named special families (CLI entry point)."""
    if kind not in _SPECIAL:
        raise ValueError(f"unknown special polynomial {kind!r}; pick one of {sorted(_SPECIAL)}")
    return _SPECIAL[kind](d, **params)

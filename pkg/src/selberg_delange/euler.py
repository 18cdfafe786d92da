"""Truncated Euler products: local factors, leading constants, limits.

Everything here reduces to products over primes p <= P of local factors
(1 - p^{-s})^rho (1 + F_p(s)), where F_p(s) = sum_k f(p^k) p^{-ks} is
truncated using the spec's geometric growth envelope.  Products are
accumulated in log space (exact summation of per-prime logs) so that
10^6 factors neither underflow nor lose relative accuracy.

The leading constant at s = 1,

    lambda0(f) = (1/Gamma(rho)) prod_p (1 - 1/p)^rho sum_k f(p^k) p^{-k},

is defined as exactly 0 when rho is a nonpositive integer, and the
limiting function of the normalized twisted averages is the ratio
psi(z) = lambda0(alpha_{e^z}) / lambda0(alpha).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from math import fsum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DegenerateSpecError,
    DivergentLocalFactorError,
    DomainError,
    PoleError,
)
from .funcs import AdditiveSpec, MultiplicativeSpec, OMEGA, eval_multiplicative, twist
from .sieve import build_sieve, factor, prime_array
from .special import clog1p, gamma

DEFAULT_PRIME_CUTOFF = 10**6
DEFAULT_FACTOR_TOL = 1e-14

# rho values this close to a nonpositive integer trigger the exact-zero
# rule; covers e.g. e^{i pi} * rho carrying one ulp of rounding
_INTEGER_SNAP_TOL = 1e-12

_K_HARD_CAP = 100_000


@dataclass(frozen=True)
class EulerProductResult:
    """Value of a truncated Euler product plus truncation metadata.

    k_cutoff is the largest per-prime series length used; tail_estimate
    is a heuristic bound on |log value - log true value| from the
    discarded primes p > prime_cutoff (0 when the value is exactly 0).
    """

    value: complex
    prime_cutoff: int
    k_cutoff: int
    tail_estimate: float


@dataclass(frozen=True)
class AdmissibilityReport:
    """Numeric diagnostics for the square-summability condition.

    square_sum_partials holds (P, sum over p <= P of the squared inner
    series at exponent 1 - c0); the verdict is read off the power-law
    slope of successive increments, with witness set to the smallest
    prime whose inner series outright diverges.
    """

    c0: float
    verdict: str
    witness: Optional[int]
    abscissa_estimate: float
    square_sum_partials: List[Tuple[int, float]]
    increment_exponent: Optional[float]


def _is_snapped_nonpositive_integer(z: complex) -> bool:
    z = complex(z)
    if abs(z.imag) > _INTEGER_SNAP_TOL:
        return False
    nearest = round(z.real)
    return nearest <= 0 and abs(z.real - nearest) <= _INTEGER_SNAP_TOL


def _series_length(C: float, q: float, tol: float, p: int) -> int:
    """Smallest K with geometric tail C q^{K+1}/(1-q) <= tol."""
    if q >= 1.0:
        raise DivergentLocalFactorError(
            f"local factor diverges at p={p}: growth ratio {C:g}*{q:g}^k does not decay",
            prime=p,
        )
    if C == 0.0:
        return 0
    K = 1
    bound = C * q * q / (1.0 - q)
    while bound > tol:
        K += 1
        bound *= q
        if K > _K_HARD_CAP:
            raise DivergentLocalFactorError(
                f"local factor at p={p} needs more than {_K_HARD_CAP} terms", prime=p
            )
    return K


def _local_factor_terms(
    spec: MultiplicativeSpec, p: int, s: complex, tol: float
) -> Tuple[complex, int]:
    sigma = s.real
    p_sigma = float(p) ** sigma
    q = spec.growth.r / p_sigma
    K = _series_length(spec.growth.C, q, tol, p)
    if K == 0:
        return 0j, 0
    if s.imag == 0.0:
        t = complex(1.0 / p_sigma)
    else:
        t = cmath.exp(-s * math.log(p))
    value_at = spec.value_at
    acc = 0j
    cur = t
    for k in range(1, K + 1):
        acc += value_at(p, k) * cur
        cur *= t
    return acc, K


def local_factor(spec: MultiplicativeSpec, p: int, s, tol: float = DEFAULT_FACTOR_TOL) -> complex:
    """F_p(s) = sum_{k>=1} f(p^k) p^{-ks}, truncated to tail <= tol.

    Raises:
        DivergentLocalFactorError: p^{Re s} <= growth ratio r.
    """
    if p < 2:
        raise ValueError(f"p must be a prime >= 2, got {p}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    value, _ = _local_factor_terms(spec, int(p), complex(s), tol)
    return value


def _prime_tail_scale(P: int, u: float) -> float:
    """Heuristic for sum over primes p > P of p^{-u} (infinite for u <= 1)."""
    if u <= 1.0:
        return math.inf
    return P ** (1.0 - u) / ((u - 1.0) * math.log(P))


def _second_order_constant(spec: MultiplicativeSpec, rho: complex) -> float:
    C, r = spec.growth.C, spec.growth.r
    return 2.0 * (abs(rho) + (C * r) ** 2 + C * r * r)


def lambda0(
    spec: MultiplicativeSpec,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    tol: float = DEFAULT_FACTOR_TOL,
) -> EulerProductResult:
    """Leading Euler-product constant of spec at s = 1.

    Args:
        spec: multiplicative function with growth ratio r < 2.
        prime_cutoff: include primes p <= prime_cutoff (>= 100).
        tol: per-factor truncation tolerance.

    Returns:
        EulerProductResult; value is exactly 0 when rho is a nonpositive
        integer (within snap tolerance) or some local factor vanishes.
    """
    P = int(prime_cutoff)
    if P < 100:
        raise ValueError(f"prime_cutoff must be >= 100, got {prime_cutoff}")
    rho = complex(spec.rho)
    if _is_snapped_nonpositive_integer(rho):
        return EulerProductResult(value=0j, prime_cutoff=P, k_cutoff=0, tail_estimate=0.0)
    if spec.growth.r >= 2.0:
        raise DivergentLocalFactorError(
            f"growth ratio r={spec.growth.r:g} >= 2 diverges at p=2, s=1", prime=2
        )
    if abs(complex(spec.prime_coeff) - rho) > _INTEGER_SNAP_TOL:
        raise DegenerateSpecError(
            f"spec {spec.name!r} declares prime value {spec.prime_coeff} != rho {spec.rho}; "
            "the s=1 Euler product diverges"
        )
    re_parts: List[float] = []
    im_parts: List[float] = []
    k_max = 0
    for p in prime_array(P).tolist():
        F, K = _local_factor_terms(spec, p, complex(1.0), tol)
        k_max = max(k_max, K)
        w = 1.0 + F
        if w == 0:
            return EulerProductResult(value=0j, prime_cutoff=P, k_cutoff=k_max, tail_estimate=0.0)
        if w.imag == 0.0 and w.real < 0.0:
            raise PoleError(
                f"local factor 1 + F_p(1) = {w.real:g} hits the log branch cut at p={p}",
                prime=p,
            )
        term = rho * math.log1p(-1.0 / p) + clog1p(F)
        re_parts.append(term.real)
        im_parts.append(term.imag)
    total = complex(fsum(re_parts), fsum(im_parts))
    value = cmath.exp(total) / gamma(rho)
    c1, eps = spec.prime_deviation
    tail = _second_order_constant(spec, rho) * _prime_tail_scale(P, 2.0)
    if c1 > 0.0:
        tail += c1 * _prime_tail_scale(P, 1.0 + eps)
    return EulerProductResult(value=value, prime_cutoff=P, k_cutoff=k_max, tail_estimate=tail)


def psi(
    alpha: MultiplicativeSpec,
    z,
    g: AdditiveSpec = OMEGA,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    tol: float = DEFAULT_FACTOR_TOL,
) -> complex:
    """Limiting function psi(z) = lambda0(exp-twist of alpha) / lambda0(alpha).

    Raises:
        DegenerateSpecError: lambda0(alpha) = 0.
    """
    z = complex(z)
    den = lambda0(alpha, prime_cutoff, tol)
    if den.value == 0:
        raise DegenerateSpecError(f"lambda0({alpha.name}) = 0; psi undefined")
    twisted = twist(alpha, cmath.exp(z), g)
    num = lambda0(twisted, prime_cutoff, tol)
    return num.value / den.value


def g_compensated(
    spec: MultiplicativeSpec,
    s,
    rho,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    tol: float = DEFAULT_FACTOR_TOL,
) -> EulerProductResult:
    """Compensated product prod_{p<=P} (1-p^{-s})^rho (1 + F_p(s)).

    Certified for Re s > 1; allowed down to Re s > 1 - c0 with the tail
    estimate degrading to a heuristic (possibly infinite).

    Raises:
        DomainError: Re s <= 1 - c0.
        DivergentLocalFactorError / PoleError: per-prime failures.
    """
    s = complex(s)
    rho = complex(rho)
    P = int(prime_cutoff)
    if P < 100:
        raise ValueError(f"prime_cutoff must be >= 100, got {prime_cutoff}")
    sigma = s.real
    if sigma <= 1.0 - spec.c0:
        raise DomainError(
            f"g_compensated needs Re s > 1 - c0 = {1.0 - spec.c0:g}, got Re s = {sigma:g}"
        )
    re_parts: List[float] = []
    im_parts: List[float] = []
    k_max = 0
    real_axis = s.imag == 0.0
    for p in prime_array(P).tolist():
        F, K = _local_factor_terms(spec, p, s, tol)
        k_max = max(k_max, K)
        w = 1.0 + F
        if w == 0:
            return EulerProductResult(value=0j, prime_cutoff=P, k_cutoff=k_max, tail_estimate=0.0)
        if w.imag == 0.0 and w.real < 0.0:
            raise PoleError(
                f"local factor 1 + F_p({s}) = {w.real:g} hits the log branch cut at p={p}",
                prime=p,
            )
        if real_axis:
            t = complex(float(p) ** (-sigma))
        else:
            t = cmath.exp(-s * math.log(p))
        term = rho * clog1p(-t) + clog1p(F)
        re_parts.append(term.real)
        im_parts.append(term.imag)
    value = cmath.exp(complex(fsum(re_parts), fsum(im_parts)))
    c1, eps = spec.prime_deviation
    tail = _second_order_constant(spec, rho) * _prime_tail_scale(P, 2.0 * sigma)
    tail += abs(complex(spec.prime_coeff) - rho) * _prime_tail_scale(P, sigma)
    if c1 > 0.0:
        tail += c1 * _prime_tail_scale(P, sigma + eps)
    return EulerProductResult(value=value, prime_cutoff=P, k_cutoff=k_max, tail_estimate=tail)


_DEFAULT_P_GRID = tuple(2000 * 2**i for i in range(9))
_DEFAULT_SIGMA_GRID = tuple(round(2.0 - 0.1 * i, 10) for i in range(10))  # 2.0 .. 1.1
_ABSCISSA_N = 1 << 16


def _abscissa_estimate(spec: MultiplicativeSpec, sigma_grid: Sequence[float]) -> float:
    """Smallest tested sigma at which sum |f(n)| n^{-sigma} looks stable."""
    table = build_sieve(_ABSCISSA_N)
    mags = np.empty(_ABSCISSA_N + 1)
    mags[0] = 0.0
    for n in range(1, _ABSCISSA_N + 1):
        mags[n] = abs(eval_multiplicative(spec, factor(n, table)))
    n_pows = np.arange(_ABSCISSA_N + 1, dtype=np.float64)
    n_pows[0] = 1.0
    best = math.inf
    for sigma in sorted(sigma_grid, reverse=True):
        terms = mags * n_pows ** (-float(sigma))
        full = float(terms.sum())
        half = float(terms[: _ABSCISSA_N // 2 + 1].sum())
        if not math.isfinite(full):
            break
        if abs(full - half) <= 1e-3 * max(1.0, abs(full)):
            best = float(sigma)
        else:
            break
    return best


def check_admissibility_pp(
    spec: MultiplicativeSpec,
    c0: float,
    p_grid: Optional[Sequence[int]] = None,
    tol: float = DEFAULT_FACTOR_TOL,
) -> AdmissibilityReport:
    """Probe the square-summability condition at exponent 1 - c0.

    Computes partial sums over p <= P of (sum_k |f(p^k)| p^{-k(1-c0)})^2
    on a grid of cutoffs and fits a power law to the increments:
    decaying increments (exponent < -0.1) are consistent with
    convergence, growing increments are not, and anything in between is
    inconclusive.  A prime whose inner series already fails to decay
    geometrically is reported as an inconsistency witness outright.
    """
    if not (0.0 < c0 < 1.0):
        raise ValueError(f"c0 must lie in (0,1), got {c0}")
    grid = sorted(set(int(P) for P in (p_grid if p_grid is not None else _DEFAULT_P_GRID)))
    if len(grid) < 3:
        raise ValueError("p_grid needs at least 3 cutoffs for a trend fit")
    beta = 1.0 - c0
    C, r = spec.growth.C, spec.growth.r
    abscissa = _abscissa_estimate(spec, _DEFAULT_SIGMA_GRID)
    # the inner ratio q = r / p^beta is decreasing in p, so the smallest
    # prime is the only candidate witness
    if r >= 2.0**beta:
        return AdmissibilityReport(
            c0=c0,
            verdict="inconsistent",
            witness=2,
            abscissa_estimate=abscissa,
            square_sum_partials=[],
            increment_exponent=None,
        )
    partials: List[Tuple[int, float]] = []
    acc_parts: List[float] = []
    value_at = spec.value_at
    grid_iter = iter(grid)
    next_cut = next(grid_iter)
    for p in prime_array(grid[-1]).tolist():
        while p > next_cut:
            partials.append((next_cut, fsum(acc_parts)))
            next_cut = next(grid_iter)
        q = r / float(p) ** beta
        K = _series_length(C, q, tol, p)
        inner = 0.0
        weight = 1.0
        for k in range(1, K + 1):
            weight /= float(p) ** beta
            inner += abs(value_at(p, k)) * weight
        acc_parts.append(inner * inner)
    partials.append((next_cut, fsum(acc_parts)))
    for remaining in grid_iter:
        partials.append((remaining, partials[-1][1]))
    increments = [
        (math.sqrt(lo * hi), t_hi - t_lo)
        for (lo, t_lo), (hi, t_hi) in zip(partials, partials[1:])
    ]
    positive = [(m, d) for m, d in increments if d > 0.0]
    if not positive:
        return AdmissibilityReport(
            c0=c0,
            verdict="consistent",
            witness=None,
            abscissa_estimate=abscissa,
            square_sum_partials=partials,
            increment_exponent=None,
        )
    xs = np.log([m for m, _ in positive])
    ys = np.log([d for _, d in positive])
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(positive) >= 2 else 0.0
    if slope < -0.1:
        verdict = "consistent"
    elif slope > 0.0:
        verdict = "inconsistent"
    else:
        verdict = "inconclusive"
    return AdmissibilityReport(
        c0=c0,
        verdict=verdict,
        witness=None,
        abscissa_estimate=abscissa,
        square_sum_partials=partials,
        increment_exponent=slope,
    )

"""Exact sieve-scale sums, distributions, and sampling.

Values f(n) for every n <= x are materialized from the prime-power
values by sweeping prime-power arithmetic progressions, which is the
vectorized equivalent of factoring each n and multiplying f over its
prime powers.  All reductions run through fixed-block compensated
summation so results carry full double precision at x = 10^7 and are
bit-stable for a given block size (changing _CHUNK may perturb outputs
at the 1e-13 level).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateSpecError, DomainError
from .funcs import AdditiveSpec, MultiplicativeSpec
from .sieve import SieveTable, prime_array
from .special import cexpm1, cpow

# reduction block size shared by every compensated sum in this module
_CHUNK = 1024


def compensated_sum(values) -> float:
    """Sum a real array: pairwise blocks finished with exact fsum."""
    a = np.ascontiguousarray(values, dtype=np.float64)
    n = a.size
    if n == 0:
        return 0.0
    m = (n // _CHUNK) * _CHUNK
    partials: List[float] = []
    if m:
        partials.extend(a[:m].reshape(-1, _CHUNK).sum(axis=1).tolist())
    if m < n:
        partials.append(math.fsum(a[m:].tolist()))
    return math.fsum(partials)


def compensated_complex_sum(values) -> complex:
    """Complex sum with real and imaginary parts compensated separately."""
    a = np.ascontiguousarray(values)
    if np.iscomplexobj(a):
        return complex(compensated_sum(a.real), compensated_sum(a.imag))
    return complex(compensated_sum(a), 0.0)


def compensated_cumsum(values) -> np.ndarray:
    """Prefix sums with per-block compensation of the running offset."""
    a = np.ascontiguousarray(values, dtype=np.float64)
    n = a.size
    out = np.empty(n, dtype=np.float64)
    m = (n // _CHUNK) * _CHUNK
    total = 0.0
    comp = 0.0
    if m:
        body = np.cumsum(a[:m].reshape(-1, _CHUNK), axis=1, out=out[:m].reshape(-1, _CHUNK))
        offsets = np.empty(m // _CHUNK, dtype=np.float64)
        for i, t in enumerate(body[:, -1].tolist()):
            offsets[i] = total
            y = t - comp
            new_total = total + y
            comp = (new_total - total) - y
            total = new_total
        body += offsets[:, None]
    if m < n:
        out[m:] = np.cumsum(a[m:]) + total
    return out


def _primes_leq(x: int, sieve: Optional[SieveTable]) -> Iterable[int]:
    if sieve is not None and sieve.x_max >= x:
        values = np.arange(2, x + 1, dtype=np.uint32)
        return values[sieve.spf[2 : x + 1] == values].tolist()
    return prime_array(x).tolist()


def _apply_prime_exact(w: np.ndarray, p: int, x: int, values: Sequence[complex]) -> None:
    """Multiply w[n] by value(p, k) on the exact-exponent classes p^k || n."""
    for k, v in enumerate(values, start=1):
        pk = p**k
        idx = np.arange(pk, x + 1, pk, dtype=np.int64)
        nxt = pk * p
        if nxt <= x:
            idx = idx[idx % nxt != 0]
        w[idx] *= v


def multiplicative_value_table(
    spec: MultiplicativeSpec, x: int, sieve: Optional[SieveTable] = None
) -> np.ndarray:
    """Array of f(n) for 0 <= n <= x (entry 0 is 0, entry 1 is 1).

    Built by sweeping arithmetic progressions of prime powers; the
    result is exactly the per-n product of prime-power values.  Returns
    float64 when every prime-power value is real, complex128 otherwise.
    """
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    w = np.ones(x + 1, dtype=np.float64)
    w[0] = 0.0
    for p in _primes_leq(x, sieve):
        values: List[complex] = []
        pk = p
        has_zero = False
        while pk <= x:
            v = complex(spec.value_at(p, len(values) + 1))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"{spec.name}: non-finite value at ({p},{len(values) + 1})")
            values.append(v)
            has_zero = has_zero or v == 0
            pk *= p
        if np.iscomplexobj(w):
            pass
        elif any(v.imag != 0.0 for v in values):
            w = w.astype(np.complex128)
        if has_zero:
            vals = values if np.iscomplexobj(w) else [v.real for v in values]
            _apply_prime_exact(w, p, x, vals)
            continue
        prev = complex(1.0)
        pk = p
        for v in values:
            ratio = v / prev
            if ratio != 1.0:
                scale = ratio if np.iscomplexobj(w) else ratio.real
                w[pk::pk] *= scale
            prev = v
            pk *= p
    return w


def additive_value_table(
    g: AdditiveSpec, x: int, sieve: Optional[SieveTable] = None
) -> np.ndarray:
    """Array of g(n) for 0 <= n <= x; int64 for integer-valued g."""
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    integer = g.integer_valued
    tab = np.zeros(x + 1, dtype=np.int64 if integer else np.float64)
    for p in _primes_leq(x, sieve):
        prev: complex = 0.0
        pk = p
        k = 1
        while pk <= x:
            v = complex(g.value_at(p, k))
            if v.imag != 0.0:
                raise ValueError(f"{g.name}: tables require real values, got {v} at ({p},{k})")
            delta = v.real - (prev.real if isinstance(prev, complex) else prev)
            prev = v.real
            if delta != 0.0:
                if integer:
                    if delta != int(delta):
                        raise ValueError(
                            f"{g.name} declared integer-valued but g({p}^{k}) jumps by {delta}"
                        )
                    tab[pk::pk] += int(delta)
                else:
                    tab[pk::pk] += delta
            pk *= p
            k += 1
    return tab


@dataclass(frozen=True)
class WeightTable:
    """Nonnegative weights w[n] = alpha(n) for n <= x with prefix sums."""

    x: int
    weights: np.ndarray
    cumulative: np.ndarray

    @property
    def total(self) -> float:
        return float(self.cumulative[self.x])


def build_weight_table(
    alpha: MultiplicativeSpec,
    x: int,
    sieve: Optional[SieveTable] = None,
    values: Optional[np.ndarray] = None,
) -> WeightTable:
    """Materialize alpha as a probability weight table on 1..x.

    Raises:
        ValueError: some alpha(n) is complex or negative.
        DegenerateSpecError: all weights vanish.
    """
    w = multiplicative_value_table(alpha, x, sieve) if values is None else values[: x + 1]
    if np.iscomplexobj(w):
        raise ValueError(f"{alpha.name}: weight table requires real nonnegative values")
    if w.size != x + 1:
        raise ValueError(f"values array covers {w.size - 1} < x = {x}")
    if float(w.min()) < 0.0:
        n_bad = int(np.argmin(w))
        raise ValueError(f"{alpha.name}: negative weight alpha({n_bad}) = {w[n_bad]:g}")
    cumulative = compensated_cumsum(w)
    if not cumulative[x] > 0.0:
        raise DegenerateSpecError(f"{alpha.name}: total weight is 0 on [1, {x}]")
    return WeightTable(x=int(x), weights=w, cumulative=cumulative)


@dataclass(frozen=True)
class DistributionTable:
    """Exact distribution of g(N) for N drawn with weights alpha(n), n <= x."""

    x: int
    values: np.ndarray
    probabilities: np.ndarray
    mean: float
    variance: float

    def as_dict(self) -> Dict[int, float]:
        return {int(m): float(q) for m, q in zip(self.values, self.probabilities)}

    def tail_probability(self, threshold: float) -> float:
        """P(g >= threshold), summing pmf buckets from ceil(threshold) up."""
        cut = math.ceil(threshold)
        mask = self.values >= cut
        return min(1.0, float(math.fsum(self.probabilities[mask].tolist())))


def partial_sum(
    spec: MultiplicativeSpec,
    x: int,
    sieve: Optional[SieveTable] = None,
    values: Optional[np.ndarray] = None,
) -> complex:
    """Exact sum of f(n) over 1 <= n <= x."""
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    w = multiplicative_value_table(spec, x, sieve) if values is None else values
    if w.shape[0] < x + 1:
        raise ValueError(f"values array covers {w.shape[0] - 1} < x = {x}")
    return compensated_complex_sum(w[1 : x + 1])


def _twist_powers(y: complex, g_slice: np.ndarray) -> np.ndarray:
    """y^{g(n)} for a table slice, exact integer powering when possible."""
    if g_slice.dtype.kind == "i":
        lo = int(g_slice.min())
        hi = int(g_slice.max())
        ladder = np.array([cpow(y, m) for m in range(lo, hi + 1)], dtype=np.complex128)
        return ladder[g_slice - lo]
    if y.imag == 0.0 and y.real <= 0.0:
        raise DomainError(f"y = {y} is on the branch cut for non-integer additive values")
    return np.exp(g_slice * complex(cmath.log(y)))


def twisted_sum(
    alpha: MultiplicativeSpec,
    y,
    g: AdditiveSpec,
    x: int,
    sieve: Optional[SieveTable] = None,
    weights: Optional[np.ndarray] = None,
    g_values: Optional[np.ndarray] = None,
) -> complex:
    """Exact sum of y^{g(n)} alpha(n) over 1 <= n <= x."""
    y = complex(y)
    if y == 0:
        raise ValueError("twist parameter y must be nonzero")
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    w = multiplicative_value_table(alpha, x, sieve) if weights is None else weights
    gt = additive_value_table(g, x, sieve) if g_values is None else g_values
    if w.shape[0] < x + 1 or gt.shape[0] < x + 1:
        raise ValueError(f"precomputed arrays do not cover x = {x}")
    factors = _twist_powers(y, gt[1 : x + 1])
    return compensated_complex_sum(w[1 : x + 1] * factors)


def mgf_exact(
    alpha: MultiplicativeSpec,
    g: AdditiveSpec,
    x: int,
    z,
    sieve: Optional[SieveTable] = None,
    weights: Optional[np.ndarray] = None,
    g_values: Optional[np.ndarray] = None,
) -> complex:
    """E[exp(z g(N))] for N weighted by alpha on 1..x (exact)."""
    z = complex(z)
    num = twisted_sum(alpha, cmath.exp(z), g, x, sieve, weights, g_values)
    den = partial_sum(alpha, x, sieve, values=weights)
    if den == 0:
        raise DegenerateSpecError(f"{alpha.name}: zero normalizing sum on [1, {x}]")
    return num / den


def _compensated_bincount(labels: np.ndarray, weights: np.ndarray, n_buckets: int) -> np.ndarray:
    rows = []
    for start in range(0, labels.size, 4096):
        rows.append(
            np.bincount(labels[start : start + 4096], weights=weights[start : start + 4096], minlength=n_buckets)
        )
    stacked = np.vstack(rows)
    return np.array([math.fsum(stacked[:, j].tolist()) for j in range(n_buckets)])


def pmf(
    alpha: MultiplicativeSpec,
    g: AdditiveSpec,
    x: int,
    sieve: Optional[SieveTable] = None,
    weights: Optional[np.ndarray] = None,
    g_values: Optional[np.ndarray] = None,
) -> DistributionTable:
    """Exact probability mass function of g(N) under the alpha weights.

    Requires g to take nonnegative integer values (omega, Omega, or an
    integer table); weights must be real and nonnegative.
    """
    if not g.integer_valued:
        raise ValueError(f"{g.name} is not integer-valued; pmf buckets are integers")
    table = build_weight_table(alpha, x, sieve, values=weights)
    gt = additive_value_table(g, x, sieve) if g_values is None else g_values
    if gt.shape[0] < x + 1:
        raise ValueError(f"g_values array does not cover x = {x}")
    g_slice = gt[1 : x + 1]
    lo = int(g_slice.min())
    if lo < 0:
        raise ValueError(f"{g.name} takes negative values; pmf requires nonnegative")
    hi = int(g_slice.max())
    sums = _compensated_bincount(g_slice, table.weights[1 : x + 1], hi + 1)
    total = math.fsum(sums.tolist())
    probabilities = sums / total
    values = np.arange(hi + 1, dtype=np.int64)
    keep = probabilities > 0.0
    values = values[keep]
    probabilities = probabilities[keep]
    mean = math.fsum((values * probabilities).tolist())
    variance = math.fsum(((values - mean) ** 2 * probabilities).tolist())
    return DistributionTable(
        x=int(x), values=values, probabilities=probabilities, mean=mean, variance=variance
    )


def sample(
    alpha: MultiplicativeSpec,
    x: int,
    seed: int,
    count: int,
    stream: int = 0,
    sieve: Optional[SieveTable] = None,
    table: Optional[WeightTable] = None,
) -> np.ndarray:
    """Draw `count` iid copies of N (P(N=n) proportional to alpha(n), n <= x).

    Inverse-CDF sampling: uniforms come from the counter-based
    Philox4x64 generator keyed by (seed, stream), so draws are
    reproducible across platforms and independent streams are obtained
    by varying `stream`; each draw binary-searches the cumulative
    weight array.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if table is None:
        table = build_weight_table(alpha, x, sieve)
    bits = np.random.Philox(key=[np.uint64(int(seed) & (2**64 - 1)), np.uint64(int(stream))])
    uniforms = np.random.Generator(bits).random(count)
    targets = uniforms * table.total
    return np.searchsorted(table.cumulative, targets, side="right").astype(np.int64)


def mod_poisson_residual(
    alpha: MultiplicativeSpec,
    g: AdditiveSpec,
    x: int,
    z,
    rho=None,
    sieve: Optional[SieveTable] = None,
    weights: Optional[np.ndarray] = None,
    g_values: Optional[np.ndarray] = None,
) -> complex:
    """Normalized MGF psi_x(z) = exp(-rho ln ln x (e^z - 1)) E[e^{z g(N)}].

    As x grows this converges to the limiting function psi(z); the
    difference from psi is the object of the convergence studies.

    Raises:
        ValueError: x < 3 (ln ln x must be positive).
    """
    if x < 3:
        raise ValueError(f"x must be >= 3 for ln ln x > 0, got {x}")
    z = complex(z)
    rho = complex(alpha.rho) if rho is None else complex(rho)
    t_x = rho * math.log(math.log(x))
    value = mgf_exact(alpha, g, x, z, sieve, weights, g_values)
    return cmath.exp(-t_x * cexpm1(z)) * value


def distribution_to_csv(dist: DistributionTable) -> str:
    """CSV rendering with header value,probability."""
    lines = ["value,probability"]
    for m, q in zip(dist.values.tolist(), dist.probabilities.tolist()):
        lines.append(f"{m},{q:.15g}")
    return "\n".join(lines) + "\n"


def sums_to_csv(rows: Sequence[Tuple[int, complex]]) -> str:
    """CSV rendering with header x,sum_re,sum_im."""
    lines = ["x,sum_re,sum_im"]
    for x, value in rows:
        value = complex(value)
        lines.append(f"{x},{value.real:.15g},{value.imag:.15g}")
    return "\n".join(lines) + "\n"

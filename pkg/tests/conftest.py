"""Shared brute-force oracles: everything here uses trial division and
direct summation only, independent of the package's sieve and table
machinery."""

from typing import Tuple


def trial_factorize(n: int) -> Tuple[Tuple[int, int], ...]:
    """Prime factorization by trial division; oracle for the sieve."""
    assert n >= 1
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            k = 0
            while n % d == 0:
                n //= d
                k += 1
            out.append((d, k))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def trial_omega(n: int) -> int:
    return len(trial_factorize(n))


def trial_big_omega(n: int) -> int:
    return sum(k for _, k in trial_factorize(n))


def spec_eval_brute(spec, n: int) -> complex:
    """Evaluate a multiplicative spec at n through trial division."""
    acc = complex(1.0)
    for p, k in trial_factorize(n):
        acc *= complex(spec.value_at(p, k))
    return acc


def additive_eval_brute(g, n: int) -> complex:
    acc = complex(0.0)
    for p, k in trial_factorize(n):
        acc += complex(g.value_at(p, k))
    return acc

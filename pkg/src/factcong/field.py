"""Prime fields: primality, primitive roots, and discrete-log tables.

A ``PrimeContext`` fixes the modulus p, the smallest primitive root g, and
optionally a dense index table mapping every nonzero residue to its
discrete logarithm base g.  Contexts are immutable; attaching a table
returns a new context.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    CompositeModulusError,
    DlogTableRequiredError,
    ParameterError,
    TableTooLargeError,
)

__all__ = [
    "DLOG_MEMORY_LIMIT",
    "is_probable_prime",
    "factorize",
    "find_primitive_root",
    "PrimeContext",
    "build_dlog_table",
    "Residue",
    "primes_between",
    "next_prime_at_least",
    "primes_nearest",
]

DLOG_MEMORY_LIMIT = 10_000_000

# Contexts are capped at 31-bit moduli so kernel products fit in int64.
MAX_CONTEXT_PRIME = 2**31 - 1

# Witness set covering every n below 3.3e24, far beyond the 64-bit range.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24 (witnesses 2..41)."""
    n = int(n)
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization by trial division, as ((prime, exponent), ...)."""
    n = int(n)
    if n < 1:
        raise ParameterError(f"cannot factor {n}")
    out = []
    for q in (2, 3):
        e = 0
        while n % q == 0:
            n //= q
            e += 1
        if e:
            out.append((q, e))
    q = 5
    # 6k +- 1 wheel; enough for the 31-bit group orders handled here
    while q * q <= n:
        for cand in (q, q + 2):
            e = 0
            while n % cand == 0:
                n //= cand
                e += 1
            if e:
                out.append((cand, e))
        q += 6
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def find_primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group mod p."""
    p = int(p)
    if not is_probable_prime(p):
        raise CompositeModulusError(f"{p} is not prime")
    if p == 2:
        return 1
    order = p - 1
    prime_divisors = [q for q, _ in factorize(order)]
    g = 2
    while True:
        if all(pow(g, order // q, p) != 1 for q in prime_divisors):
            return g
        g += 1


@dataclass(frozen=True)
class PrimeContext:
    """Immutable bundle of a prime modulus with its group structure.

    ``dlog`` is a dense int64 table of length p with dlog[x] the exponent
    of the smallest primitive root giving x, and dlog[0] = -1.  It is
    optional because it costs O(p) memory.
    """

    p: int
    g: int
    factors: tuple[tuple[int, int], ...]
    dlog: np.ndarray | None = dataclasses.field(
        default=None, compare=False, repr=False
    )

    @classmethod
    def create(
        cls,
        p: int,
        with_dlog: bool = False,
        memory_limit: int = DLOG_MEMORY_LIMIT,
    ) -> "PrimeContext":
        p = int(p)
        if not is_probable_prime(p):
            raise CompositeModulusError(f"{p} is not prime")
        if p < 3:
            raise ParameterError("the modulus must be an odd prime, got p < 3")
        if p > MAX_CONTEXT_PRIME:
            raise ParameterError(
                f"p={p} exceeds the 31-bit kernel limit {MAX_CONTEXT_PRIME}"
            )
        ctx = cls(p=p, g=find_primitive_root(p), factors=factorize(p - 1))
        if with_dlog:
            ctx = ctx.with_dlog(memory_limit=memory_limit)
        return ctx

    def with_dlog(self, memory_limit: int = DLOG_MEMORY_LIMIT) -> "PrimeContext":
        """Return a copy carrying the dense discrete-log table."""
        if self.dlog is not None:
            return self
        return dataclasses.replace(
            self, dlog=build_dlog_table(self, memory_limit=memory_limit)
        )

    def attach_dlog(self, table: np.ndarray) -> "PrimeContext":
        """Return a copy carrying an externally supplied table (already
        verified, e.g. loaded from cache)."""
        if table.shape != (self.p,):
            raise ParameterError(
                f"table length {table.shape} does not match p={self.p}"
            )
        return dataclasses.replace(self, dlog=np.asarray(table, dtype=np.int64))

    def require_dlog(self) -> np.ndarray:
        if self.dlog is None:
            raise DlogTableRequiredError(
                f"this operation needs the discrete-log table for p={self.p}; "
                "build the context with with_dlog=True"
            )
        return self.dlog

    def index(self, x: int) -> int:
        """Discrete logarithm of x base g (requires the table)."""
        x = int(x) % self.p
        if x == 0:
            raise ParameterError("0 has no discrete logarithm")
        return int(self.require_dlog()[x])

    def power_table(self) -> np.ndarray:
        """Inverse permutation of the dlog table: entry e holds g**e mod p."""
        table = self.require_dlog()
        out = np.empty(self.p - 1, dtype=np.int64)
        out[table[1:]] = np.arange(1, self.p, dtype=np.int64)
        return out

    def pow(self, x: int, e: int) -> int:
        return pow(int(x) % self.p, int(e), self.p)

    def inverse(self, x: int) -> int:
        x = int(x) % self.p
        if x == 0:
            raise ParameterError("0 is not invertible")
        return pow(x, self.p - 2, self.p)


def build_dlog_table(
    ctx: PrimeContext, memory_limit: int = DLOG_MEMORY_LIMIT
) -> np.ndarray:
    """Dense discrete-log table for ctx, one sequential pass over the group."""
    if ctx.p > memory_limit:
        raise TableTooLargeError(
            f"discrete-log table for p={ctx.p} exceeds the limit of "
            f"{memory_limit} entries"
        )
    return kernels.dlog_table(ctx.p, ctx.g)


@dataclass(frozen=True)
class Residue:
    """A value together with the prime modulus it lives under."""

    value: int
    p: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.p:
            raise ParameterError(
                f"residue {self.value} outside [0, {self.p})"
            )


def primes_between(lo: int, hi: int) -> list[int]:
    """All primes in [lo, hi]; endpoints need not be prime themselves."""
    lo, hi = int(lo), int(hi)
    if hi < lo or hi < 2:
        return []
    lo = max(lo, 2)
    if hi <= 20_000_000:
        sieve = bytearray([1]) * (hi + 1)
        sieve[0:2] = b"\x00\x00"
        for q in range(2, int(hi**0.5) + 1):
            if sieve[q]:
                sieve[q * q :: q] = b"\x00" * len(sieve[q * q :: q])
        return [n for n in range(lo, hi + 1) if sieve[n]]
    return [n for n in range(lo, hi + 1) if is_probable_prime(n)]


def next_prime_at_least(n: int) -> int:
    n = max(int(n), 2)
    while not is_probable_prime(n):
        n += 1
    return n


def primes_nearest(center: int, count: int) -> list[int]:
    """The count primes closest to center, ties resolved downward first."""
    center = int(center)
    out: list[int] = []
    lo, hi = center, center + 1
    while len(out) < count:
        if lo >= 2 and is_probable_prime(lo):
            out.append(lo)
        if len(out) < count and is_probable_prime(hi):
            out.append(hi)
        lo -= 1
        hi += 1
    return sorted(out[:count])

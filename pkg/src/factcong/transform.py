"""Exact cyclic convolution and floating-point DFTs of awkward lengths.

Counting work needs cyclic convolutions of nonnegative integer vectors
whose entries must come out exactly.  The primary engine runs a radix-2
number-theoretic transform modulo several 31-bit primes and reassembles
coefficients by the Chinese remainder theorem; the certified coefficient
bound decides how many moduli are needed.  When the bound outgrows the
configured moduli the engine falls back to exact big-integer arithmetic
via limb packing.  A quadratic schoolbook engine serves as the test
oracle.

Spectra need complex DFTs whose length is a prime p or the composite
p - 1.  Prime lengths are reindexed through a primitive root into one
cyclic convolution of length p - 1 (computed by zero-padded power-of-two
FFTs); other lengths use the chirp transform.  Every spectrum carries a
conservative absolute error bound.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import field, kernels
from .errors import ParameterError

__all__ = [
    "NTT_MODULI",
    "ConvolutionPlan",
    "plan_cyclic_convolution",
    "cyclic_convolve_exact",
    "cyclic_convolution_power",
    "cyclic_convolve_direct",
    "index_reversed",
    "dft_prime_length",
    "dft_error_bound",
]

_INT64_MAX = 2**63 - 1


def _two_adic_valuation(n: int) -> int:
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return v


@functools.lru_cache(maxsize=None)
def _modulus_root(q: int) -> int:
    return field.find_primitive_root(q)


# 31-bit primes q = odd * 2**v + 1, largest first.  v bounds the transform
# size 2**v each modulus supports.
NTT_MODULI: tuple[tuple[int, int], ...] = tuple(
    (q, _two_adic_valuation(q - 1))
    for q in (2013265921, 1711276033, 1107296257, 754974721, 469762049, 167772161)
)


@dataclass(frozen=True)
class ConvolutionPlan:
    """Resolved strategy for one exact cyclic convolution.

    engine is "ntt-crt", "bigint", or "direct"; padded is the power-of-two
    transform size (equal to length when length is itself a power of two);
    bound is the certified ceiling on every output coefficient.
    """

    length: int
    padded: int
    engine: str
    moduli: tuple[int, ...]
    bound: int


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def plan_cyclic_convolution(length: int, bound: int) -> ConvolutionPlan:
    """Pick moduli whose product certifies the given coefficient bound."""
    length = int(length)
    bound = int(bound)
    if length < 1:
        raise ParameterError("convolution length must be at least 1")
    if bound < 0:
        raise ParameterError("coefficient bound must be nonnegative")
    if length == 1:
        return ConvolutionPlan(1, 1, "direct", (), bound)
    if length & (length - 1) == 0:
        padded = length
    else:
        padded = _next_pow2(2 * length - 1)
    need_v = padded.bit_length() - 1
    usable = [q for q, v in NTT_MODULI if v >= need_v]
    chosen: list[int] = []
    product = 1
    # a zero bound (all-zero input) still needs one modulus to run through
    target = max(bound, 1)
    for q in usable:
        if product > target:
            break
        chosen.append(q)
        product *= q
    if product > target:
        return ConvolutionPlan(length, padded, "ntt-crt", tuple(chosen), bound)
    # Certification failed: the configured moduli cannot cover the bound,
    # so fall back to exact wide arithmetic.
    return ConvolutionPlan(length, padded, "bigint", (), bound)


def _as_int_vector(a) -> tuple[np.ndarray, int]:
    """Validate a nonnegative integer vector, return it plus its exact sum."""
    arr = np.asarray(a)
    if arr.ndim != 1 or arr.size == 0:
        raise ParameterError("expected a nonempty one-dimensional vector")
    if arr.dtype == object:
        values = [int(x) for x in arr.tolist()]
    elif np.issubdtype(arr.dtype, np.integer):
        values = [int(x) for x in arr.tolist()]
    else:
        raise ParameterError("exact convolution needs integer input")
    if any(v < 0 for v in values):
        raise ParameterError("exact convolution expects nonnegative counts")
    total = sum(values)
    return arr, total


def _residues_mod(arr: np.ndarray, q: int) -> np.ndarray:
    if arr.dtype == object:
        return np.fromiter(
            (int(x) % q for x in arr.tolist()), dtype=np.int64, count=arr.size
        )
    return (arr.astype(np.int64, copy=True)) % q


def _ntt_cyclic(a_mod: np.ndarray, b_mod: np.ndarray, n: int, padded: int, q: int):
    """Length-n cyclic convolution of two residue vectors modulo q."""
    root = pow(_modulus_root(q), (q - 1) // padded, q)
    fa = np.zeros(padded, dtype=np.int64)
    fb = np.zeros(padded, dtype=np.int64)
    fa[:n] = a_mod
    fb[:n] = b_mod
    kernels.ntt_inplace(fa, q, root)
    kernels.ntt_inplace(fb, q, root)
    fa = fa * fb % q
    kernels.ntt_inplace(fa, q, root, invert=True)
    if padded == n:
        return fa
    out = fa[:n].copy()
    tail = fa[n : 2 * n - 1]
    out[: tail.size] += tail
    out %= q
    return out


def _crt_combine(residues: list[np.ndarray], moduli: tuple[int, ...], bound: int):
    """Lift per-modulus residue vectors to exact integers below the bound."""
    if len(moduli) == 1:
        return residues[0].copy()
    if len(moduli) == 2 and moduli[0] * moduli[1] <= _INT64_MAX:
        q1, q2 = moduli
        inv = pow(q1 % q2, q2 - 2, q2)
        t = (residues[1] - residues[0]) % q2 * inv % q2
        return residues[0] + t * q1
    x = residues[0].astype(object)
    m = int(moduli[0])
    for r_i, q_i in zip(residues[1:], moduli[1:]):
        inv = pow(m % q_i, q_i - 2, q_i)
        t = (r_i.astype(object) - x % q_i) * inv % q_i
        x = x + t * m
        m *= q_i
    return x


def _pack_bigint(values: list[int], limb_bytes: int) -> int:
    return int.from_bytes(
        b"".join(v.to_bytes(limb_bytes, "little") for v in values), "little"
    )


def _cyclic_convolve_bigint(a: np.ndarray, b: np.ndarray, bound: int) -> list[int]:
    """Exact cyclic convolution through one wide integer multiplication.

    Coefficients are packed as little-endian limbs wide enough that no
    limb of the product can carry into its neighbor.
    """
    n = a.size
    limb_bytes = max(1, (max(int(bound), 1).bit_length() + 7) // 8)
    A = _pack_bigint([int(x) for x in a.tolist()], limb_bytes)
    B = _pack_bigint([int(x) for x in b.tolist()], limb_bytes)
    raw = (A * B).to_bytes(limb_bytes * 2 * n, "little")
    limbs = [
        int.from_bytes(raw[i * limb_bytes : (i + 1) * limb_bytes], "little")
        for i in range(2 * n)
    ]
    return [limbs[t] + (limbs[t + n] if t + n < 2 * n else 0) for t in range(n)]


def _finalize(values, bound: int) -> np.ndarray:
    if bound <= _INT64_MAX:
        return np.array([int(v) for v in values], dtype=np.int64)
    return np.array([int(v) for v in values], dtype=object)


def cyclic_convolve_exact(a, b, bound: int | None = None) -> np.ndarray:
    """Exact cyclic convolution of two nonnegative integer vectors.

    out[t] = sum over i+j = t (mod n) of a[i] * b[j].  The result dtype is
    int64 when the certified bound fits, otherwise Python integers.  The
    default bound sum(a) * sum(b) is always valid for nonnegative input.
    """
    arr_a, total_a = _as_int_vector(a)
    arr_b, total_b = _as_int_vector(b)
    if arr_a.size != arr_b.size:
        raise ParameterError("cyclic convolution needs equal lengths")
    n = arr_a.size
    if bound is None:
        bound = total_a * total_b
    bound = int(bound)
    plan = plan_cyclic_convolution(n, bound)
    if n == 1:
        return _finalize([int(arr_a[0]) * int(arr_b[0])], bound)
    if plan.engine == "bigint":
        return _finalize(_cyclic_convolve_bigint(arr_a, arr_b, bound), bound)
    residues = [
        _ntt_cyclic(_residues_mod(arr_a, q), _residues_mod(arr_b, q), n, plan.padded, q)
        for q in plan.moduli
    ]
    combined = _crt_combine(residues, plan.moduli, bound)
    if combined.dtype == object or bound > _INT64_MAX:
        return _finalize(combined.tolist(), bound)
    return combined.astype(np.int64)


def cyclic_convolution_power(a, k: int, total: int | None = None) -> np.ndarray:
    """k-fold cyclic self-convolution, chaining exact pairwise convs.

    Chaining keeps the transform size at the pairwise padding regardless
    of k, which matters for long vectors.
    """
    k = int(k)
    if k < 1:
        raise ParameterError("convolution power needs k >= 1")
    arr, tot = _as_int_vector(a)
    if total is None:
        total = tot
    acc = arr
    acc_total = total
    for _ in range(k - 1):
        acc = cyclic_convolve_exact(acc, arr, bound=acc_total * total)
        acc_total *= total
    if k == 1:
        return _finalize([int(x) for x in arr.tolist()], total)
    return acc


def cyclic_convolve_direct(a, b) -> np.ndarray:
    """Schoolbook O(n^2) cyclic convolution in exact Python integers.

    Reference oracle for the fast engines; quadratic, keep lengths small.
    """
    arr_a, total_a = _as_int_vector(a)
    arr_b, total_b = _as_int_vector(b)
    if arr_a.size != arr_b.size:
        raise ParameterError("cyclic convolution needs equal lengths")
    n = arr_a.size
    va = [int(x) for x in arr_a.tolist()]
    vb = [int(x) for x in arr_b.tolist()]
    out = [0] * n
    for i, x in enumerate(va):
        if x == 0:
            continue
        for j, y in enumerate(vb):
            if y:
                out[(i + j) % n] += x * y
    return _finalize(out, total_a * total_b)


def index_reversed(a) -> np.ndarray:
    """Vector b with b[x] = a[-x mod n]; pairs with convolution to give
    cross-correlation."""
    arr = np.asarray(a)
    return np.concatenate([arr[:1], arr[:0:-1]])


# ---------------------------------------------------------------------------
# floating-point DFT for prime and arbitrary lengths


def dft_error_bound(length: int, l1_norm: float) -> float:
    """Conservative absolute error ceiling for one spectrum entry."""
    padded = _next_pow2(max(2 * length - 1, 2))
    stages = max(1.0, math.log2(padded))
    return 24.0 * np.finfo(np.float64).eps * (stages + 4.0) * float(l1_norm)


def _direct_dft(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.size
    grid = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(sign * 2j * np.pi * grid / n) @ x


@functools.lru_cache(maxsize=64)
def _rader_plan(p: int, sign: int):
    """Permutations and the transformed chirp for a prime-length DFT."""
    g = field.find_primitive_root(p)
    gp = np.empty(p - 1, dtype=np.int64)
    acc = 1
    for m in range(p - 1):
        gp[m] = acc
        acc = acc * g % p
    # g**(-m) indexes: gp reversed with the leading 1 kept in place
    ginv = np.empty(p - 1, dtype=np.int64)
    ginv[0] = gp[0]
    ginv[1:] = gp[:0:-1]
    padded = _next_pow2(2 * (p - 1) - 1)
    chirp = np.exp(sign * 2j * np.pi * gp / p)
    vpad = np.zeros(padded, dtype=np.complex128)
    vpad[: p - 1] = chirp
    return gp, ginv, np.fft.fft(vpad), padded


def _rader_dft(x: np.ndarray, sign: int) -> np.ndarray:
    p = x.size
    gp, ginv, vfft, padded = _rader_plan(p, sign)
    upad = np.zeros(padded, dtype=np.complex128)
    upad[: p - 1] = x[ginv]
    lin = np.fft.ifft(np.fft.fft(upad) * vfft)[: 2 * (p - 1) - 1]
    folded = lin[: p - 1].copy()
    folded[: p - 2] += lin[p - 1 :]
    out = np.empty(p, dtype=np.complex128)
    out[0] = x.sum()
    out[gp] = x[0] + folded
    return out


@functools.lru_cache(maxsize=64)
def _bluestein_plan(n: int, sign: int):
    ks = np.arange(n, dtype=np.int64)
    # k*k mod 2n keeps the chirp phase argument small and exact
    chirp = np.exp(sign * 1j * np.pi * (ks * ks % (2 * n)) / n)
    padded = _next_pow2(2 * n - 1)
    bpad = np.zeros(padded, dtype=np.complex128)
    bpad[:n] = chirp.conj()
    bpad[padded - n + 1 :] = chirp[:0:-1].conj()
    return chirp, np.fft.fft(bpad), padded


def _bluestein_dft(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.size
    chirp, bfft, padded = _bluestein_plan(n, sign)
    apad = np.zeros(padded, dtype=np.complex128)
    apad[:n] = x * chirp
    conv = np.fft.ifft(np.fft.fft(apad) * bfft)
    return chirp * conv[:n]


def dft_prime_length(values, sign: int = 1) -> tuple[np.ndarray, float]:
    """DFT out[a] = sum_x values[x] * exp(sign * 2*pi*i * a*x / n).

    Prime lengths go through the primitive-root reindexing; any other
    length takes the chirp path.  Returns the spectrum and an absolute
    error bound valid for every entry.
    """
    x = np.ascontiguousarray(values, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise ParameterError("dft needs a nonempty one-dimensional vector")
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    n = x.size
    err = dft_error_bound(n, float(np.abs(x).sum()))
    if n == 1:
        return x.copy(), err
    if n <= 16:
        return _direct_dft(x, sign), err
    if field.is_probable_prime(n):
        return _rader_dft(x, sign), err
    return _bluestein_dft(x, sign), err

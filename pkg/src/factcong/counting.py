"""Exact solution counts for congruence families built from factorials.

Seven families, each counting tuples drawn from factorial windows:

  J      two l-fold sums of factorials differing by lambda
  SIGNED one k-fold sign-weighted sum of factorials hitting lambda
  F      two l-fold sums of factorial pair products agreeing exactly
  I      two l-fold products of factorials agreeing exactly
  T      an r-fold sum of factorial pair products hitting lambda
  Q      one pair product plus an r-fold factorial sum hitting lambda
  R      product of bracket sums and factorials hitting a nonzero lambda

Each family has two independent engines.  The convolution engine folds
histograms with exact cyclic convolutions; the brute-force engine
enumerates the variable blocks exhaustively with early modular reduction
and combines block tallies by direct summation over residues.  They share
no transform code, so their agreement is a meaningful consistency check.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from . import factorial, kernels, transform
from .errors import EngineMismatchError, GuardExceededError, ParameterError
from .factorial import FactorialWindow
from .field import PrimeContext

__all__ = [
    "FAMILIES",
    "ENGINES",
    "BRUTE_FORCE_GUARD",
    "AUTO_BRUTE_THRESHOLD",
    "CountQuery",
    "CountResult",
    "count",
    "count_convolution",
    "brute_force_count",
    "count_profile",
    "estimate_brute_work",
]

FAMILIES = ("J", "SIGNED", "F", "I", "T", "Q", "R")
ENGINES = ("auto", "conv", "brute", "both")

# Hard ceiling on tuples the exhaustive engine may enumerate, and the
# work level below which automatic selection prefers it.
BRUTE_FORCE_GUARD = 10**9
AUTO_BRUTE_THRESHOLD = 10**7

_PROFILE_FAMILIES = ("J", "SIGNED", "T", "Q", "R")


@dataclass(frozen=True)
class CountQuery:
    """One fully specified counting request.

    Window roles: (L, N) is the main factorial window; (K, M) is the
    second window for the pair-product families F, T, Q and the bracket
    window for R; (S, T) is the plain-factorial window of R.  Unset window
    fields default to the full range (0, p-1).  lam is the target residue;
    signs configures SIGNED and must hold +1/-1 entries of length k.
    """

    family: str
    ctx: PrimeContext
    ell: int = 1
    k: int = 1
    r: int = 1
    lam: int = 0
    signs: tuple[int, ...] = ()
    L: int = 0
    N: int | None = None
    K: int = 0
    M: int | None = None
    S: int = 0
    T: int | None = None

    def resolved(self) -> "CountQuery":
        """Fill window defaults and normalize lambda into [0, p)."""
        p = self.ctx.p
        q = replace(
            self,
            N=p - 1 - self.L if self.N is None else self.N,
            M=p - 1 - self.K if self.M is None else self.M,
            T=p - 1 - self.S if self.T is None else self.T,
            lam=int(self.lam) % p,
        )
        q.validate()
        return q

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ParameterError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}"
            )
        if self.family in ("J", "F", "I") and self.ell < 1:
            raise ParameterError("ell must be at least 1")
        if self.family in ("T", "Q", "R") and self.r < 1:
            raise ParameterError("r must be at least 1")
        if self.family == "SIGNED":
            if self.k < 1:
                raise ParameterError("k must be at least 1")
            if len(self.signs) != self.k or any(s not in (-1, 1) for s in self.signs):
                raise ParameterError(
                    "SIGNED needs a sign tuple of +1/-1 entries of length k"
                )
        if self.family == "R":
            if self.k < 0:
                raise ParameterError("R allows k = 0 but not negative k")
            if self.ell < 1:
                raise ParameterError("ell must be at least 1")
            if self.lam % self.ctx.p == 0:
                raise ParameterError("family R requires lambda nonzero mod p")
        if not 0 <= self.lam < self.ctx.p:
            raise ParameterError("lambda must be reduced into [0, p)")

    # window accessors (valid on resolved queries)

    def n_window(self) -> FactorialWindow:
        return factorial.build_window(self.ctx, self.L, self.N)

    def m_window(self) -> FactorialWindow:
        return factorial.build_window(self.ctx, self.K, self.M)

    def t_window(self) -> FactorialWindow:
        return factorial.build_window(self.ctx, self.S, self.T)


@dataclass(frozen=True)
class CountResult:
    """Exact count plus how it was obtained."""

    query: CountQuery
    count: int
    engine: str
    seconds: float
    details: dict = dc_field(default_factory=dict)


def _exact_dot(a: np.ndarray, b: np.ndarray) -> int:
    return sum(int(x) * int(y) for x, y in zip(a.tolist(), b.tolist()) if x and y)


def _exact_correlation_at(vec: np.ndarray, lam: int) -> int:
    """sum over mu of vec[mu] * vec[mu - lam], exact."""
    n = vec.size
    if lam == 0:
        return _sum_squares(vec)
    return sum(
        int(vec[(mu + lam) % n]) * int(vec[mu]) for mu in range(n) if vec[mu]
    )


def _sum_squares(vec: np.ndarray) -> int:
    return sum(int(x) * int(x) for x in vec.tolist() if x)


# ---------------------------------------------------------------------------
# convolution engine


def _conv_profile(q: CountQuery) -> np.ndarray:
    """Exact counts for every lambda at once (length p, exponent families
    mapped back to residues with a structurally empty zero bin)."""
    p = q.ctx.p
    fam = q.family
    if fam == "J":
        G = factorial.sum_histogram(q.n_window(), q.ell).counts
        return transform.cyclic_convolve_exact(
            G, transform.index_reversed(G), bound=int(q.N) ** (2 * q.ell)
        )
    if fam == "SIGNED":
        h = factorial.value_histogram(q.n_window()).counts
        rev = transform.index_reversed(h)
        acc = h if q.signs[0] == 1 else rev
        bound = q.N
        for s in q.signs[1:]:
            acc = transform.cyclic_convolve_exact(
                acc, h if s == 1 else rev, bound=bound * q.N
            )
            bound *= q.N
        return np.asarray(acc)
    if fam == "T":
        c = factorial.product_histogram(q.m_window(), q.n_window()).counts
        return transform.cyclic_convolution_power(c, q.r, total=q.M * q.N)
    if fam == "Q":
        c = factorial.product_histogram(q.m_window(), q.n_window()).counts
        G = factorial.sum_histogram(q.n_window(), q.r).counts
        return transform.cyclic_convolve_exact(
            c, G, bound=q.M * q.N * int(q.N) ** q.r
        )
    if fam == "R":
        ctx = q.ctx
        parts: list[tuple[np.ndarray, int]] = []
        if q.k >= 1:
            A = factorial.sum_histogram(q.m_window(), q.k).counts
            parts.append((_residues_to_exponents(ctx, A), int(q.M) ** q.k))
        B = factorial.sum_histogram(q.n_window(), q.ell).counts
        parts.append((_residues_to_exponents(ctx, B), int(q.N) ** q.ell))
        u = factorial.exponent_histogram(q.t_window()).counts
        prod = transform.cyclic_convolution_power(u, q.r, total=q.T)
        parts.append((np.asarray(prod), int(q.T) ** q.r))
        acc, bound = parts[0]
        for vec, tot in parts[1:]:
            acc = transform.cyclic_convolve_exact(acc, vec, bound=bound * tot)
            bound *= tot
        out = np.zeros(p, dtype=object if acc.dtype == object else np.int64)
        out[ctx.power_table()] = acc
        return out
    raise ParameterError(f"family {q.family} has no lambda profile")


def _residues_to_exponents(ctx: PrimeContext, vec: np.ndarray) -> np.ndarray:
    """Project an additive-domain vector onto exponents, dropping bin 0."""
    return np.asarray(vec)[ctx.power_table()]


def count_convolution(q: CountQuery) -> CountResult:
    """Histogram-and-convolution engine; exact for every family."""
    q = q.resolved()
    started = time.perf_counter()
    details: dict = {}
    fam = q.family
    if fam == "J":
        G = factorial.sum_histogram(q.n_window(), q.ell).counts
        value = _exact_correlation_at(G, q.lam)
    elif fam == "SIGNED":
        value = int(_conv_profile(q)[q.lam])
    elif fam == "F":
        c = factorial.product_histogram(q.m_window(), q.n_window()).counts
        D = transform.cyclic_convolution_power(c, q.ell, total=q.M * q.N)
        value = _sum_squares(D)
    elif fam == "I":
        u = factorial.exponent_histogram(q.n_window()).counts
        P = transform.cyclic_convolution_power(u, q.ell, total=q.N)
        value = _sum_squares(P)
    elif fam == "T":
        value = int(_conv_profile(q)[q.lam])
    elif fam == "Q":
        c = factorial.product_histogram(q.m_window(), q.n_window()).counts
        G = factorial.sum_histogram(q.n_window(), q.r).counts
        # Q(lam) = sum_u c[u] * G[lam - u]
        idx = (q.lam - np.arange(q.ctx.p)) % q.ctx.p
        value = _exact_dot(c, G[idx])
    elif fam == "R":
        profile = _conv_profile(q)
        value = int(profile[q.lam])
        details["dropped_zero_mass"] = _r_dropped_mass(q)
    else:  # pragma: no cover - validate() blocks this
        raise ParameterError(f"unknown family {fam}")
    return CountResult(
        query=q,
        count=int(value),
        engine="convolution",
        seconds=time.perf_counter() - started,
        details=details,
    )


def _r_dropped_mass(q: CountQuery) -> int:
    """Tuples of family R that land on lambda = 0 because a bracket
    vanishes; reported since the profile only covers nonzero lambda."""
    if q.k >= 1:
        A = factorial.sum_histogram(q.m_window(), q.k)
        a0, a_tot = int(A.counts[0]), A.total
    else:
        a0, a_tot = 0, 1
    B = factorial.sum_histogram(q.n_window(), q.ell)
    b0, b_tot = int(B.counts[0]), B.total
    return (a0 * b_tot + (a_tot - a0) * b0) * int(q.T) ** q.r


# ---------------------------------------------------------------------------
# exhaustive engine


def estimate_brute_work(q: CountQuery) -> int:
    """Tuples the exhaustive engine will enumerate, plus combine steps."""
    q = q.resolved()
    p = q.ctx.p
    N, M, T = int(q.N), int(q.M), int(q.T)
    fam = q.family
    if fam == "J":
        return N**q.ell + p
    if fam == "SIGNED":
        return N**q.k
    if fam == "F":
        return M * N + (M * N) ** q.ell + p
    if fam == "I":
        return N**q.ell + p
    if fam == "T":
        return M * N if q.r == 1 else M * N + (M * N) ** q.r
    if fam == "Q":
        return M * N + N**q.r + p
    if fam == "R":
        return (M**q.k if q.k else 1) + N**q.ell + T**q.r + p * p
    raise ParameterError(f"unknown family {fam}")


def _pair_values(wm: FactorialWindow, wn: FactorialWindow) -> np.ndarray:
    """All pairwise products m! * n! mod p as a flat list of residues."""
    if wm.N * wn.N > 50_000_000:
        raise GuardExceededError(
            "materializing the pair-product list needs too much memory"
        )
    return ((wm.values[:, None] * wn.values[None, :]) % wm.p).ravel()


def brute_force_count(q: CountQuery) -> CountResult:
    """Exhaustive enumeration with early modular reduction.

    Each independent variable block is enumerated in full into a residue
    tally; tallies combine by direct summation over the defining
    congruence.  Exact, and guarded by BRUTE_FORCE_GUARD.
    """
    q = q.resolved()
    work = estimate_brute_work(q)
    if work > BRUTE_FORCE_GUARD:
        raise GuardExceededError(
            f"brute-force enumeration would take about {work} tuple steps, "
            f"above the guard of {BRUTE_FORCE_GUARD}"
        )
    started = time.perf_counter()
    p = q.ctx.p
    fam = q.family
    plus = np.ones(max(q.ell, q.k, q.r), dtype=np.int64)
    if fam == "J":
        tally = kernels.sum_tally(q.n_window().values, q.ell, plus[: q.ell], p)
        value = sum(
            int(tally[(mu + q.lam) % p]) * int(tally[mu]) for mu in range(p)
        )
    elif fam == "SIGNED":
        tally = kernels.sum_tally(
            q.n_window().values, q.k, np.asarray(q.signs, dtype=np.int64), p
        )
        value = int(tally[q.lam])
    elif fam == "F":
        if q.ell == 1:
            tally = kernels.pair_product_tally(
                q.m_window().values, q.n_window().values, p
            )
        else:
            pairs = _pair_values(q.m_window(), q.n_window())
            tally = kernels.sum_tally(pairs, q.ell, plus[: q.ell], p)
        value = _sum_squares(tally)
    elif fam == "I":
        tally = kernels.prod_tally(q.n_window().values, q.ell, p)
        value = _sum_squares(tally)
    elif fam == "T":
        if q.r == 1:
            tally = kernels.pair_product_tally(
                q.m_window().values, q.n_window().values, p
            )
        else:
            pairs = _pair_values(q.m_window(), q.n_window())
            tally = kernels.sum_tally(pairs, q.r, plus[: q.r], p)
        value = int(tally[q.lam])
    elif fam == "Q":
        pair_tally = kernels.pair_product_tally(
            q.m_window().values, q.n_window().values, p
        )
        fold_tally = kernels.sum_tally(q.n_window().values, q.r, plus[: q.r], p)
        value = sum(
            int(pair_tally[u]) * int(fold_tally[(q.lam - u) % p])
            for u in range(p)
            if pair_tally[u]
        )
    elif fam == "R":
        if q.k >= 1:
            A = kernels.sum_tally(q.m_window().values, q.k, plus[: q.k], p)
        else:
            A = np.zeros(p, dtype=np.int64)
            A[1] = 1
        B = kernels.sum_tally(q.n_window().values, q.ell, plus[: q.ell], p)
        C = kernels.prod_tally(q.t_window().values, q.r, p)
        inv = kernels.inverse_table(p)
        v_range = np.arange(1, p, dtype=np.int64)
        b_slice = B[1:].astype(object)
        value = 0
        for u in range(1, p):
            if A[u] == 0:
                continue
            w = q.lam * inv[(u * v_range) % p] % p
            value += int(A[u]) * int((b_slice * C[w].astype(object)).sum())
    else:  # pragma: no cover - validate() blocks this
        raise ParameterError(f"unknown family {fam}")
    return CountResult(
        query=q,
        count=int(value),
        engine="brute-force",
        seconds=time.perf_counter() - started,
        details={"enumerated_tuples": work},
    )


# ---------------------------------------------------------------------------
# selection and profiles


def count(q: CountQuery, engine: str = "auto") -> CountResult:
    """Count solutions with the requested engine.

    auto picks brute force below AUTO_BRUTE_THRESHOLD estimated steps and
    the convolution engine otherwise; both runs the two independently and
    raises EngineMismatchError on disagreement.
    """
    q = q.resolved()
    if engine == "auto":
        use_brute = estimate_brute_work(q) < AUTO_BRUTE_THRESHOLD
        return brute_force_count(q) if use_brute else count_convolution(q)
    if engine == "conv":
        return count_convolution(q)
    if engine == "brute":
        return brute_force_count(q)
    if engine == "both":
        conv = count_convolution(q)
        brute = brute_force_count(q)
        if conv.count != brute.count:
            raise EngineMismatchError(
                f"engines disagree for {q.family}: convolution={conv.count} "
                f"brute-force={brute.count} (p={q.ctx.p}, lam={q.lam})"
            )
        return CountResult(
            query=q,
            count=conv.count,
            engine="both",
            seconds=conv.seconds + brute.seconds,
            details={
                "convolution_seconds": conv.seconds,
                "brute_force_seconds": brute.seconds,
            },
        )
    raise ParameterError(
        f"unknown engine {engine!r}; expected auto, conv, brute, or both"
    )


def count_profile(q: CountQuery) -> np.ndarray:
    """Exact counts for every lambda in [0, p) via the convolution engine.

    Only meaningful for the lambda-indexed families; F and I are single
    diagonal quantities.  For R the zero entry stays 0 by construction.
    """
    q = q.resolved()
    if q.family not in _PROFILE_FAMILIES:
        raise ParameterError(
            f"family {q.family} is a single diagonal count, not a profile"
        )
    return np.asarray(_conv_profile(q))

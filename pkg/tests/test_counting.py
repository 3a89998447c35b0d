import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factcong.counting import (
    AUTO_BRUTE_THRESHOLD,
    BRUTE_FORCE_GUARD,
    CountQuery,
    brute_force_count,
    count,
    count_convolution,
    count_profile,
    estimate_brute_work,
)
from factcong.errors import GuardExceededError, ParameterError
from factcong.factorial import sum_histogram
from factcong.field import PrimeContext

PRIMES = [5, 7, 11, 13]


@pytest.fixture(scope="module")
def contexts():
    return {p: PrimeContext.create(p, with_dlog=True) for p in PRIMES + [29]}


# fixed values derived with a standalone exhaustive script before this
# package was written


def test_fixed_values_p7(ctx7):
    def c(**kw):
        return count(CountQuery(ctx=ctx7, **kw)).count

    assert c(family="J", ell=1, lam=0) == 10
    assert c(family="J", ell=2, lam=0) == 222
    assert c(family="F", ell=1) == 246
    assert c(family="T", r=1, lam=1) == 8
    assert c(family="T", r=1, lam=6) == 10
    assert c(family="Q", r=1, lam=0) == 45
    assert c(family="Q", r=1, lam=1) == 24
    assert c(family="Q", r=1, lam=6) == 17
    assert c(family="R", k=1, ell=1, r=1, lam=1) == 45
    assert c(family="R", k=1, ell=1, r=1, lam=6) == 45
    assert c(family="I", ell=1) == 10


def test_fixed_profile_p7(ctx7):
    profile = count_profile(CountQuery(family="J", ctx=ctx7, ell=1))
    assert [int(x) for x in profile] == [10, 3, 6, 4, 4, 6, 3]


def test_r_total_mass_p7(ctx7):
    total = sum(
        count(CountQuery(family="R", ctx=ctx7, k=1, ell=1, r=1, lam=lam)).count
        for lam in range(1, 7)
    )
    # single-factorial brackets never vanish mod p, so nothing is dropped
    assert total == 6**3


# engine equivalence


def param_grid(p):
    for fam in ("J", "SIGNED", "F", "I", "T", "Q", "R"):
        for mult in (1, 2):
            lams = (0, 1, p - 1) if fam in ("J", "SIGNED", "T", "Q") else (1, p - 1)
            if fam in ("F", "I"):
                lams = (0,)
            for lam in lams:
                kw = {"lam": lam}
                if fam in ("J", "F", "I"):
                    kw["ell"] = mult
                elif fam == "SIGNED":
                    kw["k"] = mult
                    kw["signs"] = tuple(
                        1 if i % 2 == 0 else -1 for i in range(mult)
                    )
                elif fam in ("T", "Q"):
                    kw["r"] = mult
                else:
                    kw.update(k=mult, ell=mult, r=mult)
                if fam in ("F", "I"):
                    kw.pop("lam")
                yield fam, kw


@pytest.mark.parametrize("p", PRIMES)
def test_engines_agree_full_window(contexts, p):
    ctx = contexts[p]
    for fam, kw in param_grid(p):
        q = CountQuery(family=fam, ctx=ctx, **kw)
        conv = count_convolution(q)
        brute = brute_force_count(q)
        assert conv.count == brute.count, (fam, kw)


@pytest.mark.parametrize("p", [11, 13])
def test_engines_agree_offset_window(contexts, p):
    ctx = contexts[p]
    L, N = 1, p - 3
    for fam, kw in param_grid(p):
        q = CountQuery(family=fam, ctx=ctx, L=L, N=N, K=L, M=N, S=L, T=N, **kw)
        assert count_convolution(q).count == brute_force_count(q).count, (fam, kw)


def test_engine_both_reports_match(ctx7):
    res = count(CountQuery(family="J", ctx=ctx7, ell=1), engine="both")
    assert res.engine == "both"
    assert res.count == 10
    assert "convolution_seconds" in res.details


# mass conservation and structural properties


@given(st.sampled_from(PRIMES), st.integers(1, 2), st.data())
def test_j_mass_and_dominance(p, ell, data):
    ctx = PrimeContext.create(p)
    L = data.draw(st.integers(0, p - 3), label="L")
    N = data.draw(st.integers(2, p - 1 - L), label="N")
    profile = count_profile(CountQuery(family="J", ctx=ctx, ell=ell, L=L, N=N))
    total = sum(int(x) for x in profile)
    assert total == N ** (2 * ell)
    # zero shift dominates and the profile is symmetric under negation
    assert all(int(profile[0]) >= int(x) for x in profile)
    for lam in range(1, p):
        assert int(profile[lam]) == int(profile[p - lam])


@given(st.sampled_from(PRIMES), st.integers(1, 2), st.data())
def test_j_zero_equals_sum_of_squares(p, ell, data):
    ctx = PrimeContext.create(p)
    L = data.draw(st.integers(0, p - 3), label="L")
    N = data.draw(st.integers(2, p - 1 - L), label="N")
    G = sum_histogram(
        CountQuery(family="J", ctx=ctx, ell=ell, L=L, N=N).resolved().n_window(),
        ell,
    )
    j0 = count(CountQuery(family="J", ctx=ctx, ell=ell, L=L, N=N, lam=0)).count
    assert sum(int(x) ** 2 for x in G.counts) == j0


@given(st.sampled_from(PRIMES), st.integers(1, 2), st.data())
def test_t_and_q_mass(p, r, data):
    ctx = PrimeContext.create(p, with_dlog=True)
    profile_t = count_profile(CountQuery(family="T", ctx=ctx, r=r))
    assert sum(int(x) for x in profile_t) == ((p - 1) * (p - 1)) ** r
    profile_q = count_profile(CountQuery(family="Q", ctx=ctx, r=r))
    assert sum(int(x) for x in profile_q) == (p - 1) ** (r + 2)


@given(st.sampled_from(PRIMES), st.data())
def test_signed_mass(p, data):
    ctx = PrimeContext.create(p)
    k = data.draw(st.integers(1, 3), label="k")
    signs = tuple(
        data.draw(st.sampled_from([1, -1]), label=f"s{i}") for i in range(k)
    )
    profile = count_profile(CountQuery(family="SIGNED", ctx=ctx, k=k, signs=signs))
    assert sum(int(x) for x in profile) == (p - 1) ** k


@given(st.sampled_from([7, 11, 13]), st.integers(1, 2), st.integers(1, 2))
def test_r_mass_accounts_for_zero_products(p, k, ell):
    ctx = PrimeContext.create(p, with_dlog=True)
    total_nonzero = 0
    dropped = None
    for lam in range(1, p):
        res = count_convolution(
            CountQuery(family="R", ctx=ctx, k=k, ell=ell, r=1, lam=lam)
        )
        total_nonzero += res.count
        dropped = res.details["dropped_zero_mass"]
    n = p - 1
    assert total_nonzero + dropped == n ** (k + ell + 1)


def test_f_equals_t_selfcorrelation_route(ctx11):
    # two independent characterizations of the same quantity
    f1 = count(CountQuery(family="F", ctx=ctx11, ell=1)).count
    profile_t = count_profile(CountQuery(family="T", ctx=ctx11, r=1))
    assert f1 == sum(int(x) ** 2 for x in profile_t)


def test_i_counts_multiplicative_collisions(ctx7):
    # I with ell=1 counts pairs with equal factorials
    from factcong.factorial import build_window, value_histogram

    hist = value_histogram(build_window(ctx7, 0, 6))
    expect = sum(int(c) ** 2 for c in hist.counts)
    assert count(CountQuery(family="I", ctx=ctx7, ell=1)).count == expect


# validation and guards


def test_validation_errors(ctx7):
    with pytest.raises(ParameterError):
        CountQuery(family="X", ctx=ctx7).resolved()
    with pytest.raises(ParameterError):
        CountQuery(family="SIGNED", ctx=ctx7, k=2, signs=(1,)).resolved()
    with pytest.raises(ParameterError):
        CountQuery(family="SIGNED", ctx=ctx7, k=2, signs=(1, 2)).resolved()
    with pytest.raises(ParameterError):
        CountQuery(family="R", ctx=ctx7, lam=0).resolved()
    with pytest.raises(ParameterError):
        CountQuery(family="R", ctx=ctx7, k=-1, lam=1).resolved()
    with pytest.raises(ParameterError):
        CountQuery(family="J", ctx=ctx7, ell=0).resolved()


def test_lambda_normalization(ctx7):
    q = CountQuery(family="J", ctx=ctx7, lam=-1).resolved()
    assert q.lam == 6
    assert count(CountQuery(family="J", ctx=ctx7, lam=-1)).count == count(
        CountQuery(family="J", ctx=ctx7, lam=6)
    ).count


def test_brute_guard_fires():
    ctx = PrimeContext.create(9973)
    q = CountQuery(family="J", ctx=ctx, ell=3)
    assert estimate_brute_work(q.resolved()) > BRUTE_FORCE_GUARD
    with pytest.raises(GuardExceededError):
        brute_force_count(q)


def test_auto_picks_engines(ctx7):
    small = count(CountQuery(family="J", ctx=ctx7, ell=1), engine="auto")
    assert small.engine == "brute-force"
    big_ctx = PrimeContext.create(4001)
    big = count(CountQuery(family="J", ctx=big_ctx, ell=2), engine="auto")
    assert big.engine == "convolution"
    assert estimate_brute_work(
        CountQuery(family="J", ctx=big_ctx, ell=2).resolved()
    ) > AUTO_BRUTE_THRESHOLD


def test_unknown_engine_rejected(ctx7):
    with pytest.raises(ParameterError):
        count(CountQuery(family="J", ctx=ctx7), engine="quantum")


def test_profile_rejected_for_scalar_families(ctx7):
    with pytest.raises(ParameterError):
        count_profile(CountQuery(family="F", ctx=ctx7))
    with pytest.raises(ParameterError):
        count_profile(CountQuery(family="I", ctx=ctx7))


def test_profile_matches_pointwise(contexts):
    ctx = contexts[11]
    profile = count_profile(CountQuery(family="Q", ctx=ctx, r=2))
    for lam in (0, 3, 10):
        assert int(profile[lam]) == count(
            CountQuery(family="Q", ctx=ctx, r=2, lam=lam)
        ).count


def test_r_with_k_zero(contexts):
    # k = 0 drops the first bracket entirely
    ctx = contexts[11]
    q0 = CountQuery(family="R", ctx=ctx, k=0, ell=2, r=1, lam=3)
    assert count_convolution(q0).count == brute_force_count(q0).count


def test_signed_k1_profiles(ctx7):
    plus = count_profile(CountQuery(family="SIGNED", ctx=ctx7, k=1, signs=(1,)))
    minus = count_profile(CountQuery(family="SIGNED", ctx=ctx7, k=1, signs=(-1,)))
    # negating the sign reflects the profile through zero
    for lam in range(7):
        assert int(plus[lam]) == int(minus[(7 - lam) % 7])

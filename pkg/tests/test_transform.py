import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factcong.errors import ParameterError
from factcong.field import is_probable_prime
from factcong.transform import (
    NTT_MODULI,
    cyclic_convolution_power,
    cyclic_convolve_direct,
    cyclic_convolve_exact,
    dft_error_bound,
    dft_prime_length,
    index_reversed,
    plan_cyclic_convolution,
)


def as_ints(vec):
    return [int(v) for v in vec]


def test_moduli_are_ntt_friendly():
    for q, v in NTT_MODULI:
        assert is_probable_prime(q)
        assert q < 2**31
        assert (q - 1) % (2**v) == 0
        assert (q - 1) % (2 ** (v + 1)) != 0


def test_plan_prefers_ntt_and_falls_back():
    small = plan_cyclic_convolution(100, 10**9)
    assert small.engine == "ntt-crt"
    assert small.padded >= 199
    assert small.padded & (small.padded - 1) == 0
    pow2 = plan_cyclic_convolution(128, 10**9)
    assert pow2.padded == 128

    impossible = plan_cyclic_convolution(16, 10**300)
    assert impossible.engine == "bigint"


@given(
    st.integers(1, 64),
    st.integers(0, 10**6),
    st.data(),
)
def test_exact_matches_direct(n, scale, data):
    a = np.array(
        data.draw(st.lists(st.integers(0, scale + 1), min_size=n, max_size=n)),
        dtype=np.int64,
    )
    b = np.array(
        data.draw(st.lists(st.integers(0, scale + 1), min_size=n, max_size=n)),
        dtype=np.int64,
    )
    got = cyclic_convolve_exact(a, b)
    want = cyclic_convolve_direct(a, b)
    assert as_ints(got) == as_ints(want)


def test_exact_preserves_total_mass(rng):
    a = rng.integers(0, 500, size=97).astype(np.int64)
    b = rng.integers(0, 500, size=97).astype(np.int64)
    out = cyclic_convolve_exact(a, b)
    assert int(np.sum(out)) == int(a.sum()) * int(b.sum())


def test_bigint_fallback_matches_direct(rng):
    a = (rng.integers(1, 2**40, size=33).astype(object)) ** 4
    b = (rng.integers(1, 2**40, size=33).astype(object)) ** 4
    got = cyclic_convolve_exact(a, b)
    want = cyclic_convolve_direct(a, b)
    assert as_ints(got) == as_ints(want)
    assert plan_cyclic_convolution(33, int(sum(a)) * int(sum(b))).engine == "bigint"


def test_wide_values_stay_exact():
    # beyond int64 but still within the multi-modulus certificate
    a = np.array([10**17] * 64, dtype=object)
    out = cyclic_convolve_exact(a, a)
    assert all(int(x) == 64 * 10**34 for x in out)


def test_rejects_negative_and_fractional_input():
    with pytest.raises(ParameterError):
        cyclic_convolve_exact(np.array([1, -2]), np.array([1, 1]))
    with pytest.raises(ParameterError):
        cyclic_convolve_exact(np.array([1.5, 2.0]), np.array([1.0, 1.0]))
    with pytest.raises(ParameterError):
        cyclic_convolve_exact(np.array([1, 2]), np.array([1, 2, 3]))


def test_length_one_convolution():
    out = cyclic_convolve_exact(np.array([7]), np.array([6]))
    assert as_ints(out) == [42]


@given(st.integers(1, 5), st.data())
def test_power_matches_repeated_direct(k, data):
    n = data.draw(st.integers(1, 24), label="n")
    a = np.array(
        data.draw(st.lists(st.integers(0, 50), min_size=n, max_size=n)),
        dtype=np.int64,
    )
    got = cyclic_convolution_power(a, k)
    want = a.astype(object)
    for _ in range(k - 1):
        want = np.array(cyclic_convolve_direct(want, a), dtype=object)
    assert as_ints(got) == as_ints(want)


def test_index_reversed():
    a = np.array([10, 11, 12, 13])
    assert index_reversed(a).tolist() == [10, 13, 12, 11]
    assert index_reversed(np.array([5])).tolist() == [5]


@pytest.mark.parametrize("n", [1, 2, 5, 16, 17, 97, 100, 101, 512, 10007])
def test_dft_matches_numpy_fft(n, rng):
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    got, err = dft_prime_length(x, sign=-1)
    want = np.fft.fft(x)
    scale = max(1.0, float(np.max(np.abs(want))))
    assert np.max(np.abs(got - want)) / scale < 1e-9
    assert err >= 0


@pytest.mark.parametrize("n", [5, 97, 10007])
def test_dft_roundtrip(n, rng):
    x = rng.standard_normal(n)
    X, _ = dft_prime_length(x, sign=1)
    back, _ = dft_prime_length(X, sign=-1)
    back = back / n
    assert np.max(np.abs(back - x)) / np.max(np.abs(x)) < 1e-9


def test_dft_error_bound_grows_with_l1():
    small = dft_error_bound(64, 10.0)
    large = dft_error_bound(64, 1000.0)
    assert 0 < small < large


def test_dft_error_bound_is_sound(rng):
    # observed DFT error must sit below the certified bound
    for n in (97, 101, 512):
        x = rng.integers(0, 1000, size=n).astype(np.float64)
        got, err = dft_prime_length(x, sign=-1)
        want = np.fft.fft(x)
        assert np.max(np.abs(got - want)) < err

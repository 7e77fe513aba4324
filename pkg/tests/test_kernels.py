from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from raflab.kernels import (
    Affine,
    Disc,
    FSpec,
    GeneralizedIngham,
    Ingham,
    KernelDomainError,
    LogKernel,
    RationalRaf,
    Scaled,
    UnsupportedKernelError,
    parse_kernel,
)


def test_ingham_hand_values():
    g = Ingham()
    # G(n,k) = (k/n)*floor(n/k)
    assert g.eval(10, 10) == 1.0
    assert g.eval(10, 5) == 1.0
    assert g.eval(10, 3) == pytest.approx(9 / 10)
    assert g.eval(10, 4) == pytest.approx(8 / 10)
    assert g.eval_exact(10, 3) == Fraction(9, 10)
    assert g.eval_exact(7, 2) == Fraction(6, 7)


def test_ingham_domain():
    g = Ingham()
    with pytest.raises(KernelDomainError):
        g.eval(10, 0)
    with pytest.raises(KernelDomainError):
        g.eval(10, 11)


def test_disc_hand_value():
    # lam=2, t=3/4: floor(-ln(3/4)/ln 2) = 0, so g = 3/4
    g = Disc(2.0)
    assert g.eval(4, 3) == pytest.approx(0.75)
    # t = 1/4 sits exactly on a power boundary: 2^2 * 1/4 = 1
    assert g.eval(4, 1) == pytest.approx(1.0)
    # t = 3/8: one step, 2 * 3/8 = 3/4
    assert g.eval(8, 3) == pytest.approx(0.75)


def test_disc_unproven_flag():
    assert Disc(2.0).unproven_index is False
    assert Disc(2.5).unproven_index is True


def test_affine_and_log_profiles():
    a = Affine(0.5)
    assert a.profile(1.0) == 1.0
    assert a.profile(0.5) == pytest.approx(0.75)
    lg = LogKernel(0.5)
    assert lg.profile(1.0) == 1.0
    assert lg.profile(np.exp(-2.0)) == pytest.approx(2.0)
    with pytest.raises(KernelDomainError):
        Affine(0.0)
    with pytest.raises(KernelDomainError):
        Affine(1.0)
    with pytest.raises(KernelDomainError):
        LogKernel(1.5)
    with pytest.raises(KernelDomainError):
        Disc(1.0)


def test_rational_is_not_fgv():
    r = RationalRaf(1.0, 2.0)
    assert not r.is_fgv
    assert r.eval(10, 5) == pytest.approx(16 / 17)
    with pytest.raises(UnsupportedKernelError):
        r.profile(0.5)
    with pytest.raises(UnsupportedKernelError):
        Scaled(r, FSpec("power", r=0.5))
    with pytest.raises(KernelDomainError):
        RationalRaf(1.0, 1.0)


def test_scaled_exp_hand_value():
    # q=2: t = f(1)/f(2) = 3/5, floor(1/t) = 1 -> g = 3/5
    k = Scaled(Ingham(), FSpec("exp_plus_one", q=2))
    assert k.eval(2, 1) == pytest.approx(3 / 5)
    # f(1)/f(3) = 3/9 = 1/3 exactly -> floor(3) * 1/3 = 1
    assert k.eval(3, 1) == pytest.approx(1.0)


def test_scaled_identity_passthrough():
    k = Scaled(Ingham(), FSpec("identity"))
    g = Ingham()
    for n, kk in [(10, 3), (7, 7), (100, 41)]:
        assert k.eval(n, kk) == g.eval(n, kk)


def test_genin_reduces_to_ingham_with_single_weight():
    # weights (1,0,0,...) truncated to one term reproduces x*floor(1/x)? no —
    # a single weight 1 gives the full divisor-sum profile. Check against the
    # brute double sum instead.
    g = GeneralizedIngham((1.0, -1.0))
    n = 12
    for k in range(1, n + 1):
        total = 0.0
        for j in range(1, n // k + 1):
            u = 1.0 if j % 2 == 1 else -1.0
            total += u / j * ((j * k) / n) * (n // (j * k))
        assert g.eval(n, k) == pytest.approx(total)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=300))
def test_eval_row_matches_scalar(n):
    ks = np.arange(1, n + 1)
    for kern in (Ingham(), Affine(0.3), LogKernel(0.7), Disc(2.0),
                 RationalRaf(1.0, 3.0), GeneralizedIngham((1.0, -1.0, 0.5))):
        row = kern.eval_row(n, ks)
        scalar = np.array([kern.eval(n, int(k)) for k in ks])
        np.testing.assert_allclose(row, scalar, rtol=1e-12, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=200), st.integers(min_value=1, max_value=200))
def test_fgv_eval_equals_profile_of_ratio(n, k):
    if k > n:
        n, k = k, n
    for kern in (Affine(0.25), LogKernel(0.5)):
        assert kern.eval(n, k) == pytest.approx(kern.profile(k / n), rel=1e-12)


def test_parse_round_trips():
    for spec in ("ingham", "affine:0.5", "log:0.25", "disc:2",
                 "ratraf:1,2", "genin:1,-1", "scaled:ingham:exp:2",
                 "scaled:ingham:pow:0.5", "scaled:ingham:id"):
        k = parse_kernel(spec)
        assert parse_kernel(k.spec).spec == k.spec


def test_parse_rejects_garbage():
    for bad in ("", "ingham:1", "affine", "affine:2", "disc:0.5",
                "scaled:ratraf:1,2:id", "wavelet:3", "genin:",
                "scaled:ingham:exp", "scaled:ingham:sqrt:2"):
        with pytest.raises((KernelDomainError, UnsupportedKernelError)):
            parse_kernel(bad)


def test_fspec_validation():
    with pytest.raises(KernelDomainError):
        FSpec("power", r=0.0)
    with pytest.raises(KernelDomainError):
        FSpec("power", r=1.5)
    with pytest.raises(KernelDomainError):
        FSpec("exp_plus_one", q=1)
    f = FSpec("exp_plus_one", q=3)
    assert f.value(0) == 2
    assert f.value(4) == 82
    assert f.log_value(4) == pytest.approx(np.log(82.0))
    # overflow-free log for huge arguments
    assert FSpec("exp_plus_one", q=2).log_value(5000) == pytest.approx(5000 * np.log(2.0))


def test_genin_row_handles_unsorted_and_empty():
    g = GeneralizedIngham((1.0,))
    out = g.eval_row(20, np.array([7, 3, 11]))
    expect = np.array([g.eval(20, 7), g.eval(20, 3), g.eval(20, 11)])
    np.testing.assert_allclose(out, expect)
    assert g.eval_row(20, np.array([], dtype=np.int64)).shape == (0,)

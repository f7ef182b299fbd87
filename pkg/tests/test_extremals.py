import cmath
import math

import numpy as np
import pytest

from conftest import PB, ROYAL, rand_disk, rand_pb, rand_royal
from oracles import directional
from symbidisc.caratheodory import metric, push_general, verify_extremal
from symbidisc.extremals import (
    IdentifiabilityError,
    ModelCoefficients,
    check_coefficient_bound,
    flat_extremal_data,
    pb_extremal,
    pb_extremal_direct,
    pb_frame,
    recover_coefficients,
    royal_extremal,
    szego_kernel,
)
from symbidisc.functions import SchurViolation, constant
from symbidisc.gdomain import SymPoint, sample_G
from symbidisc.geodesics import royal_disc, verify_geodesic
from symbidisc.mobius import MobiusMap, aligning_map
from symbidisc.realization import random_colligation, schur_from_colligation


def psi_sample(seed, n=2):
    return schur_from_colligation(random_colligation(seed, n))


def test_royal_extremal_collapses_to_half_s():
    F = royal_extremal(MobiusMap.identity(), constant(0))
    s, p = sample_G(0, 100)
    assert np.max(np.abs(F.raw(s, p) - s / 2)) < 1e-16


def test_royal_extremal_params():
    F = royal_extremal(MobiusMap(1j, 0.2), psi_sample(1))
    assert F.params["family"] == "royal" and F.params["psi"]["n"] == 2


def test_royal_extremal_verifies_and_is_left_inverse(rng):
    for i in range(10):
        d, z, c = rand_royal(rng)
        m = aligning_map(z, 2 * c)
        F = royal_extremal(m, psi_sample(100 + i))
        rep = verify_extremal(F, d, seed=i)
        assert rep.passed
        pf = push_general(F, d)
        assert abs(pf.z) < 1e-10 and abs(pf.v - metric(d)) < 1e-8 * metric(d)
        assert verify_geodesic(royal_disc(), F, mode="aut").residual < 1e-9


def test_royal_gradient_matches_differences(rng):
    F = royal_extremal(MobiusMap(cmath.exp(0.4j), 0.1 - 0.3j), psi_sample(7, 3))
    for _ in range(20):
        d, _, _ = rand_royal(rng)
        s, p = d.base
        assert abs(push_general(F, d).v - directional(F.raw, s, p, *d.v)) < 1e-8 * max(1, abs(d.v[0]))


def test_pb_frame_example():
    fr = pb_frame(PB)
    assert sorted(w.real for w in fr.omegas) == pytest.approx([-1, 1], abs=1e-12)
    for f in fr.phis:
        assert abs(f(0.5, 0)) < 1e-14


def test_pb_frame_rejects_royal():
    with pytest.raises(ValueError):
        pb_frame(ROYAL)


def test_pb_extremal_endpoints_and_midpoint():
    fr = pb_frame(PB)
    psi = psi_sample(3)
    s, p = sample_G(1, 500)
    f1, f2 = (f.raw(s, p) for f in fr.phis)
    assert np.max(np.abs(pb_extremal(fr, 1, psi).raw(s, p) - f1)) < 1e-14
    assert np.max(np.abs(pb_extremal(fr, 0, psi).raw(s, p) - f2)) < 1e-14
    F = pb_extremal(fr, 0.5, constant(0))
    assert np.max(np.abs(F.raw(s, p) - (f1 + f2) / 2)) < 1e-14
    assert verify_extremal(F, PB).passed


def test_pb_extremal_direct_matches_lft(rng):
    for i in range(10):
        d, _, _ = rand_pb(rng)
        fr = pb_frame(d)
        psi = psi_sample(200 + i)
        s, p = sample_G(i, 1000)
        for r in (0, 0.25, 0.5, 0.75, 1):
            a = pb_extremal(fr, r, psi).raw(s, p)
            b = pb_extremal_direct(fr, r, psi).raw(s, p)
            assert np.max(np.abs(a - b)) < 1e-12


def test_pb_extremal_well_aligned(rng):
    for i in range(8):
        d, _, _ = rand_pb(rng)
        fr = pb_frame(d)
        for j, r in enumerate((0, 0.25, 0.5, 0.75, 1)):
            F = pb_extremal(fr, r, psi_sample(300 + 10 * i + j))
            rep = verify_extremal(F, d, cara_value=fr.cara_value)
            assert rep.passed
            assert abs(rep.pushforward.z) < 1e-10
            assert abs(rep.pushforward.v - fr.cara_value) < 1e-8 * fr.cara_value


def test_pb_gradient_matches_differences(rng):
    d, _, _ = rand_pb(rng)
    F = pb_extremal(pb_frame(d), 0.3, psi_sample(9, 3))
    for _ in range(20):
        d2 = rand_pb(rng)[0]
        s, p = d2.base
        assert abs(push_general(F, d2).v - directional(F.raw, s, p, *d2.v)) < 1e-7 * max(1, abs(d2.v[0]))


def test_psi_outside_disc_rejected():
    fr = pb_frame(PB)
    F = pb_extremal(fr, 0.5, constant(0.5))
    bad = constant(0.5)
    object.__setattr__(bad, "func", lambda s, p: 2 + 0 * s)
    with pytest.raises(SchurViolation):
        pb_extremal(fr, 0.5, bad)(0.1, 0)
    assert abs(F(0.1, 0)) < 1


def test_szego_kernel_examples():
    assert szego_kernel(0, 0.3j) == 1
    assert szego_kernel(0.5, 0) == pytest.approx(math.sqrt(0.75), rel=1e-15)
    a = 0.3 - 0.4j
    assert szego_kernel(a, a) == pytest.approx((1 - abs(a) ** 2) ** -0.5, rel=1e-15)


def test_recover_coefficients_for_phi1_and_phi2(rng):
    d, _, _ = rand_pb(rng)
    fr = pb_frame(d)
    s, p = sample_G(4, 50)
    for j, F in enumerate(fr.phis):
        m = fr.maps[j]
        for a, b in zip(s, p):
            mu = SymPoint(a, b)
            coef = recover_coefficients(F, fr, mu)
            uj = (1 + np.conj(m.alpha * m.c) * F.raw(a, b)) / math.sqrt(1 - abs(m.alpha) ** 2)
            got, other = (coef.u1, coef.u2) if j == 0 else (coef.u2, coef.u1)
            assert abs(got - uj) < 1e-12 * max(1, abs(uj))
            assert abs(other) < 1e-12
            assert check_coefficient_bound(coef)


def test_coefficient_bound_at_origin():
    # F = phi_1 with alpha_1 = 0 gives u = (1, 0) at mu = 0, exactly on the bound
    coef = ModelCoefficients(SymPoint(0, 0), 1, 0, 0.0)
    assert coef.norm_sq == 1 and check_coefficient_bound(coef, slack=0)


def test_coefficient_bound_catches_violation():
    from symbidisc.magic import model_vector_bound

    mu = SymPoint(0.3, 0.1)
    b = float(model_vector_bound(mu.s, mu.p))
    assert not check_coefficient_bound(ModelCoefficients(mu, 2 * b, 0, 0.0))


def test_recover_coefficients_not_identifiable():
    fr = pb_frame(PB)
    with pytest.raises(IdentifiabilityError, match="not identifiable"):
        recover_coefficients(fr.phis[0], fr, SymPoint(0.5, 0))


def test_coefficients_of_pb_extremals_within_bound(rng):
    for i in range(5):
        d, _, _ = rand_pb(rng)
        fr = pb_frame(d)
        F = pb_extremal(fr, rng.uniform(), psi_sample(400 + i))
        s, p = sample_G(i, 100)
        for a, b in zip(s, p):
            coef = recover_coefficients(F, fr, SymPoint(a, b))
            assert coef.residual < 1e-10 and check_coefficient_bound(coef)


def test_flat_extremal_data():
    data = flat_extremal_data(0.5, 0, 1)
    assert data.zeta == pytest.approx(0.2679492, abs=1e-7)
    assert data.target == pytest.approx(data.eta, abs=1e-15)
    data = flat_extremal_data(0.2j, 0.4, 2)
    assert abs(data.m(0.4)) < 1e-15 and data.target == data.m(data.eta)

import cmath

import numpy as np
import pytest

from symbidisc.functions import GFunction, phi_function
from symbidisc.gdomain import SymPoint, sample_G
from symbidisc.magic import phi
from symbidisc.realization import (
    BlockOperator,
    Colligation,
    GModel,
    SingularResolventError,
    canonical_model,
    cauchy_riemann_residual,
    lambda_T,
    lft_eval,
    lft_identity_residual,
    lft_identity_sweep,
    model_residual,
    opnorm,
    pick_check,
    random_colligation,
    random_contraction,
    random_lft_instance,
    random_unitary,
    random_unitary_colligation,
    schur_from_colligation,
)

SWAP = BlockOperator(np.array([[0, 1], [1, 0]]), (1, 1), (1, 1))


def points(seed, n):
    s, p = sample_G(seed, n)
    return [SymPoint(a, b) for a, b in zip(s, p)]


def test_lft_eval_examples(rng):
    for x in (0.3, -0.7j, 0.99):
        assert lft_eval(SWAP, [[x]])[0, 0] == pytest.approx(x)
    P11, P12, P21 = (random_contraction(rng, (2, 2), 0.5) for _ in range(3))
    P = BlockOperator.from_blocks(P11, P12, P21, np.zeros((2, 2)))
    X = random_contraction(rng, (2, 2), 0.8)
    assert np.allclose(lft_eval(P, X), P11 + P12 @ X @ P21, atol=1e-15)


def test_lft_eval_singular_guard():
    P = BlockOperator(np.array([[0, 1], [1, 1]]), (1, 1), (1, 1))
    with pytest.raises(SingularResolventError, match="singular"):
        lft_eval(P, [[1.0]])
    P2 = BlockOperator.from_blocks(np.zeros((1, 1)), np.zeros((1, 2)), np.zeros((2, 1)), np.eye(2))
    with pytest.raises(SingularResolventError, match="condition number"):
        lft_eval(P2, np.diag([1 - 1e-13, 0.5]))


def test_block_shape_mismatch():
    with pytest.raises(ValueError):
        BlockOperator(np.zeros((3, 3)), (1, 1), (1, 2))


def test_lft_identity_examples(rng):
    assert lft_identity_residual(SWAP, SWAP, [[0.3]], [[0.3]]) < 1e-15
    for _ in range(20):
        P, _, X, _ = random_lft_instance(rng)
        assert lft_identity_residual(P, P, X, X) < 1e-12
    worst = 0
    for _ in range(100):
        P = BlockOperator(random_contraction(rng, (8, 8), 0.9), (4, 4), (4, 4))
        Q = BlockOperator(random_contraction(rng, (8, 8), 0.9), (4, 4), (4, 4))
        X, Y = (random_contraction(rng, (4, 4), 0.95) for _ in range(2))
        worst = max(worst, lft_identity_residual(P, Q, X, Y))
    assert worst < 1e-11


def test_lft_sweep_deterministic():
    assert lft_identity_sweep(20, seed=3) == lft_identity_sweep(20, seed=3)


def test_lft_contractive(rng):
    for _ in range(500):
        P, _, X, _ = random_lft_instance(rng, x_norm=1.0)
        assert opnorm(lft_eval(P, X)) < 1


def test_cauchy_riemann(rng):
    P = BlockOperator(random_contraction(rng, (5, 5), 0.9), (2, 3), (2, 3))
    z = 0.9 * np.exp(2j * np.pi * rng.uniform(size=50)) * np.sqrt(rng.uniform(size=50))
    assert cauchy_riemann_residual(P, z) < 1e-8


def test_lambda_T_examples():
    for w in np.exp(1j * np.linspace(0, 6, 5)):
        T = np.array([[np.conj(w)]])
        assert lambda_T(0.5, 0, T)[0, 0] == pytest.approx(phi(np.conj(w), 0.5, 0), abs=1e-15)
    assert lambda_T(0.5, 0, [[1]])[0, 0] == pytest.approx(-1 / 3)
    assert np.all(lambda_T(0, 0, random_unitary(np.random.default_rng(0), 4)) == 0)


def test_lambda_T_spectrum(rng):
    for _ in range(30):
        T = random_unitary(rng, 5)
        s, p = sample_G(int(rng.integers(1000)), 1)
        ev = np.linalg.eigvals(lambda_T(s[0], p[0], T))
        want = phi(np.linalg.eigvals(T), s[0], p[0])
        # match as multisets
        for e in want:
            k = np.argmin(np.abs(ev - e))
            assert abs(ev[k] - e) < 1e-10
            ev = np.delete(ev, k)


def test_random_unitary(rng):
    U = random_unitary(rng, 6)
    assert opnorm(U.conj().T @ U - np.eye(6)) < 1e-13
    a = random_unitary(np.random.default_rng(5), 4)
    b = random_unitary(np.random.default_rng(5), 4)
    assert np.array_equal(a, b)


def test_random_colligation_norm():
    col = random_colligation(11, 3, 0.9)
    assert abs(opnorm(col.ABCD) - 0.9) < 1e-12


def test_colligation_validation(rng):
    with pytest.raises(ValueError, match="contractive"):
        Colligation(2 * np.eye(2), [[1]])
    with pytest.raises(ValueError, match="unitary"):
        Colligation(0.5 * np.eye(2), [[0.5]])
    with pytest.raises(ValueError, match="exceeds"):
        Colligation(np.zeros((66, 66)), np.eye(65))


def test_colligation_json_round_trip():
    col = random_colligation(2, 3)
    col2 = Colligation.from_json(col.to_json())
    assert np.array_equal(col.ABCD, col2.ABCD) and np.array_equal(col.T, col2.T)


def test_schur_from_colligation_examples():
    for w in np.exp(1j * np.linspace(0.1, 6, 5)):
        col = Colligation(np.array([[0, 1], [1, 0]]), [[np.conj(w)]])
        F = schur_from_colligation(col)
        s, p = sample_G(1, 100)
        assert np.max(np.abs(F.raw(s, p) - phi(np.conj(w), s, p))) < 1e-14
    a = 0.3 - 0.2j
    F = schur_from_colligation(Colligation(np.array([[a, 0], [0, 0]]), [[1]]))
    assert F(0.4, 0.1) == pytest.approx(a)


def test_schur_function_stays_in_disc():
    for seed in range(10):
        F = schur_from_colligation(random_colligation(seed, 4))
        s, p = sample_G(seed, 2000)
        assert np.max(np.abs(F.raw(s, p))) < 1


def test_schur_gradient_matches_differences():
    F = schur_from_colligation(random_colligation(4, 3))
    s, p = sample_G(9, 20)
    gs, gp = F.grad(s, p)
    h = 1e-6
    fs = (F.raw(s + h, p) - F.raw(s - h, p)) / (2 * h)
    fp = (F.raw(s, p + h) - F.raw(s, p - h)) / (2 * h)
    assert np.max(np.abs(gs - fs)) < 1e-7 and np.max(np.abs(gp - fp)) < 1e-7


def test_scalar_phi_model():
    for w in np.exp(1j * np.linspace(0, 6, 7)):
        model = GModel(np.array([[np.conj(w)]]), lambda s, p: np.ones(1))
        pts = points(3, 20)
        pairs = list(zip(pts, pts[::-1]))
        assert model_residual(model, phi_function(np.conj(w)), pairs) < 1e-14


def test_canonical_model_of_unitary_colligation():
    for seed in range(5):
        col = random_unitary_colligation(seed, 3)
        F = schur_from_colligation(col)
        pts = points(seed, 20)
        pairs = [(a, b) for a in pts[:10] for b in pts[10:]]
        assert model_residual(canonical_model(col), F, pairs) < 1e-11


def test_canonical_model_fails_for_strict_colligation():
    col = random_colligation(1, 3, 0.5)
    pts = points(1, 4)
    assert model_residual(canonical_model(col), schur_from_colligation(col), [(pts[0], pts[1])]) > 1e-6


def test_pick_single_point():
    F = phi_function(1)
    rep = pick_check(F, [SymPoint(0.3, 0.1j)])
    assert rep.min_eigenvalue == pytest.approx(1 - abs(F(0.3, 0.1j)) ** 2, rel=1e-12)


def test_pick_phi_and_colligations(rng):
    pts = points(8, 10)
    assert pick_check(phi_function(1), pts).passed
    for seed in range(5):
        assert pick_check(schur_from_colligation(random_colligation(seed, 3)), pts).passed


def test_pick_detects_non_schur():
    F = GFunction(lambda s, p: s)
    pts = [SymPoint(1.5, 0.56), SymPoint(0.2, 0), SymPoint(-1.2, 0.35)]
    rep = pick_check(F, pts)
    assert rep.min_eigenvalue < 0 and not rep.passed


def test_pick_rejects_duplicates():
    q = SymPoint(0.1, 0)
    with pytest.raises(ValueError):
        pick_check(phi_function(1), [q, q])

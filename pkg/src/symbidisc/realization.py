"""Linear fractional transformations, G-models and Schur-class functions on G.

A contractive colligation [[A, B], [C, D]] on C + C^n together with a unitary
n x n matrix T gives the Schur function

    psi(lambda) = A + B lambda_T (1 - D lambda_T)^{-1} C,
    lambda_T = (2 p T - s)(2 - s T)^{-1}.

Matrices may carry leading batch dimensions; every routine broadcasts over them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import magic
from .functions import GFunction
from .gdomain import DomainError, SymPoint, unsymmetrize

__all__ = [
    "BlockOperator",
    "Colligation",
    "GModel",
    "PickReport",
    "SingularResolventError",
    "canonical_model",
    "cauchy_riemann_residual",
    "lambda_T",
    "lft_eval",
    "lft_identity_residual",
    "lft_identity_sweep",
    "random_lft_instance",
    "model_residual",
    "opnorm",
    "pick_check",
    "random_colligation",
    "random_contraction",
    "random_unitary",
    "random_unitary_colligation",
    "schur_from_colligation",
]

COND_MAX = 1e12
MAX_DIM = 64


class SingularResolventError(np.linalg.LinAlgError):
    pass


def opnorm(M) -> float:
    """Largest singular value (of the last two axes; max over any batch)."""
    return float(np.max(np.linalg.norm(np.asarray(M), ord=2, axis=(-2, -1))))


@dataclass(frozen=True)
class BlockOperator:
    """P = [[P11, P12], [P21, P22]] : H + U -> G + V.

    ``rows`` = (dim G, dim V), ``cols`` = (dim H, dim U).
    """

    matrix: np.ndarray
    rows: tuple[int, int]
    cols: tuple[int, int]

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", M)
        if M.shape[-2:] != (sum(self.rows), sum(self.cols)):
            raise ValueError(f"block dimensions {self.rows}x{self.cols} do not match shape {M.shape}")

    @classmethod
    def from_blocks(cls, P11, P12, P21, P22) -> BlockOperator:
        P11, P12, P21, P22 = (np.asarray(b, dtype=complex) for b in (P11, P12, P21, P22))
        M = _batched_block(P11, P12, P21, P22)
        return cls(M, (P11.shape[-2], P21.shape[-2]), (P11.shape[-1], P12.shape[-1]))

    def _split(self):
        g, _ = self.rows
        h, _ = self.cols
        M = self.matrix
        return M[..., :g, :h], M[..., :g, h:], M[..., g:, :h], M[..., g:, h:]

    @property
    def blocks(self):
        return self._split()

    @property
    def adjoint(self) -> BlockOperator:
        return BlockOperator(np.conj(np.swapaxes(self.matrix, -1, -2)), self.cols, self.rows)

    def norm(self) -> float:
        return opnorm(self.matrix)


def _batched_block(P11, P12, P21, P22):
    shape = np.broadcast_shapes(P11.shape[:-2], P12.shape[:-2], P21.shape[:-2], P22.shape[:-2])
    b = [np.broadcast_to(X, shape + X.shape[-2:]) for X in (P11, P12, P21, P22)]
    return np.concatenate(
        [np.concatenate([b[0], b[1]], axis=-1), np.concatenate([b[2], b[3]], axis=-1)], axis=-2
    )


def _eye_like(M):
    return np.broadcast_to(np.eye(M.shape[-1], dtype=complex), M.shape)


def _norm1(M):
    return np.max(np.sum(np.abs(M), axis=-2), axis=-1)


def _guarded_solve(M, R, what: str, check: bool):
    """M^{-1} R, refusing matrices whose 1-norm condition number reaches COND_MAX."""
    if not check:
        return np.linalg.solve(M, R)
    try:
        Minv = np.linalg.inv(M)
    except np.linalg.LinAlgError:
        raise SingularResolventError(f"{what} is singular") from None
    cond = _norm1(M) * _norm1(Minv)
    worst = float(np.max(cond)) if np.size(cond) else 0.0
    if not worst < COND_MAX:
        raise SingularResolventError(f"{what} is near-singular (condition number {worst:.3g})")
    return Minv @ R


def lft_eval(P: BlockOperator, X, check: bool = True) -> np.ndarray:
    """F_P(X) = P11 + P12 X (I - P22 X)^{-1} P21."""
    P11, P12, P21, P22 = P.blocks
    X = np.asarray(X, dtype=complex)
    P22X = P22 @ X
    P21 = np.broadcast_to(P21, P22X.shape[:-2] + P21.shape[-2:])
    return P11 + P12 @ X @ _guarded_solve(_eye_like(P22X) - P22X, P21, "I - P22 X", check)


def _adj(M):
    return np.conj(np.swapaxes(M, -1, -2))


def lft_identity_residual(P: BlockOperator, Q: BlockOperator, X, Y) -> float:
    """Norm of the difference of the two sides of the LFT identity

    I - F_Q(Y)* F_P(X) = Q21* (I - Y* Q22*)^{-1} (I - Y* X) (I - P22 X)^{-1} P21
                         + [I, Q21* (I - Y* Q22*)^{-1} Y*] (I - Q* P) [I; X (I - P22 X)^{-1} P21].
    """
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    _, _, P21, P22 = P.blocks
    _, _, Q21, Q22 = Q.blocks
    h = P.cols[0]
    Ih = np.eye(h)
    Iv = np.eye(P.rows[1])

    lhs = Ih - _adj(lft_eval(Q, Y)) @ lft_eval(P, X)

    right = _guarded_solve(Iv - P22 @ X, P21, "I - P22 X", True)  # (I - P22 X)^{-1} P21
    left = _adj(_guarded_solve(Iv - Q22 @ Y, Q21, "I - Q22 Y", True))  # Q21* (I - Y* Q22*)^{-1}
    term1 = left @ (Iv - _adj(Y) @ X) @ right
    row = np.concatenate([Ih, left @ _adj(Y)], axis=-1)
    col = np.concatenate([Ih, X @ right], axis=-2)
    mid = np.eye(sum(P.cols)) - _adj(Q.matrix) @ P.matrix
    rhs = term1 + row @ mid @ col
    return opnorm(lhs - rhs)


def lambda_T(s, p, T) -> np.ndarray:
    """(2 p T - s)(2 - s T)^{-1}, batched over arrays s, p."""
    T = np.asarray(T, dtype=complex)
    s = np.asarray(s, dtype=complex)[..., None, None]
    p = np.asarray(p, dtype=complex)[..., None, None]
    eye = np.eye(T.shape[-1])
    # the two factors commute, so a left solve is fine
    return np.linalg.solve(2 * eye - s * T, 2 * p * T - s * eye)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar unitary: QR of a complex Ginibre matrix with R's diagonal made positive."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Qm, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Qm * (d / np.abs(d))


def random_contraction(rng: np.random.Generator, shape: tuple[int, int], norm: float) -> np.ndarray:
    M = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return M * (norm / opnorm(M))


@dataclass(frozen=True)
class Colligation:
    """Contractive colligation [[A, B], [C, D]] on C + C^n with a unitary T on C^n."""

    ABCD: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        M = np.array(self.ABCD, dtype=complex)
        T = np.array(self.T, dtype=complex)
        n = T.shape[0]
        if n > MAX_DIM:
            raise ValueError(f"state dimension {n} exceeds {MAX_DIM}")
        if M.shape != (n + 1, n + 1) or T.shape != (n, n):
            raise ValueError(f"inconsistent shapes ABCD {M.shape}, T {T.shape}")
        if opnorm(M) > 1 + 1e-12:
            raise ValueError(f"colligation is not contractive (norm {opnorm(M)!r})")
        if opnorm(T.conj().T @ T - np.eye(n)) >= 1e-12:
            raise ValueError("T is not unitary")
        M.setflags(write=False)
        T.setflags(write=False)
        object.__setattr__(self, "ABCD", M)
        object.__setattr__(self, "T", T)

    @property
    def n(self) -> int:
        return self.T.shape[0]

    @property
    def operator(self) -> BlockOperator:
        return BlockOperator(self.ABCD, (1, self.n), (1, self.n))

    def to_json(self) -> dict:
        enc = lambda M: [[[z.real, z.imag] for z in row] for row in M]  # noqa: E731
        return {"n": self.n, "ABCD": enc(self.ABCD), "T": enc(self.T)}

    @classmethod
    def from_json(cls, doc: dict) -> Colligation:
        dec = lambda rows: np.array([[complex(*z) for z in row] for row in rows])  # noqa: E731
        col = cls(dec(doc["ABCD"]), dec(doc["T"]))
        if col.n != doc["n"]:
            raise ValueError(f"declared n={doc['n']} but matrices have n={col.n}")
        return col


def random_colligation(seed: int, n: int, strictness: float = 0.9) -> Colligation:
    """Random colligation with ||[[A, B], [C, D]]|| = strictness and Haar T."""
    if not 0 < strictness <= 1:
        raise ValueError("strictness must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    M = random_contraction(rng, (n + 1, n + 1), strictness)
    return Colligation(M, random_unitary(rng, n))


def random_unitary_colligation(seed: int, n: int) -> Colligation:
    rng = np.random.default_rng(seed)
    return Colligation(random_unitary(rng, n + 1), random_unitary(rng, n))


def _state(col: Colligation, s, p, check: bool = True):
    X = lambda_T(s, p, col.T)
    _, _, C, D = col.operator.blocks
    DX = D @ X
    x = _guarded_solve(_eye_like(DX) - DX, np.broadcast_to(C, DX.shape[:-2] + C.shape), "I - D lambda_T", check)
    return X, x


def schur_from_colligation(col: Colligation) -> GFunction:
    """The Schur function of G realised by ``col``; carries its exact gradient."""
    P = col.operator
    A, B, C, D = P.blocks
    T = col.T
    eye = np.eye(col.n)

    def f(s, p):
        return lft_eval(P, lambda_T(s, p, T))[..., 0, 0]

    def grad(s, p):
        X = lambda_T(s, p, T)
        sb = np.asarray(s, dtype=complex)[..., None, None]
        R = np.linalg.inv(2 * eye - sb * T)
        dXs = (X @ T - eye) @ R
        dXp = 2 * T @ R
        right = np.linalg.solve(eye - D @ X, np.broadcast_to(C, X.shape[:-2] + C.shape))
        left = _adj(np.linalg.solve(_adj(eye - X @ D), np.broadcast_to(_adj(B), X.shape[:-2] + (col.n, 1))))
        return (left @ dXs @ right)[..., 0, 0], (left @ dXp @ right)[..., 0, 0]

    return GFunction(f, grad, label=f"psi[n={col.n}]", closed=True, params={"psi": col.to_json()})


@dataclass(frozen=True)
class GModel:
    """(C^n, T, u) with 1 - conj(phi(mu)) phi(lambda) = <(1 - mu_T* lambda_T) u(lambda), u(mu)>."""

    T: np.ndarray
    u: Callable  # (s, p) -> array (..., n)

    @property
    def n(self) -> int:
        return np.asarray(self.T).shape[0]


def canonical_model(col: Colligation) -> GModel:
    """u(lambda) = (1 - D lambda_T)^{-1} C; a G-model whenever the colligation is unitary."""
    return GModel(col.T, lambda s, p: _state(col, s, p)[1][..., 0])


def model_residual(model: GModel, F: GFunction, pairs: Sequence[tuple[SymPoint, SymPoint]]) -> float:
    worst = 0.0
    T = np.asarray(model.T, dtype=complex)
    for lam, mu in pairs:
        lhs = 1 - np.conj(F.raw(mu.s, mu.p)) * F.raw(lam.s, lam.p)
        Xl, Xm = lambda_T(lam.s, lam.p, T), lambda_T(mu.s, mu.p, T)
        ul = np.asarray(model.u(lam.s, lam.p), dtype=complex).reshape(-1)
        um = np.asarray(model.u(mu.s, mu.p), dtype=complex).reshape(-1)
        rhs = np.vdot(um, (np.eye(len(ul)) - _adj(Xm) @ Xl) @ ul)
        worst = max(worst, float(abs(lhs - rhs)))
    return worst


@dataclass(frozen=True)
class PickReport:
    min_eigenvalue: float
    phi_min_eigenvalue: float
    passed: bool


def _pick_min_eig(values, z1, z2) -> float:
    f = np.asarray(values, dtype=complex)
    num = 1 - np.conj(f)[:, None] * f[None, :]
    sz = 1 / ((1 - np.conj(z1)[:, None] * z1[None, :]) * (1 - np.conj(z2)[:, None] * z2[None, :]))
    d = np.sqrt(np.real(np.diag(sz)))
    K = num * sz / (d[:, None] * d[None, :])
    return float(np.linalg.eigvalsh((K + _adj(K)) / 2)[0])


def pick_check(F: GFunction, points: Sequence[SymPoint], n_eta: int = 16, tol: float = 1e-10) -> PickReport:
    """Kernel-positivity certificate for a Schur function on G.

    Each point is lifted to the bidisc by unsymmetrizing, and the Pick matrix
    [1 - conj(F_i) F_j] is weighted by the bidisc Szegő kernel
    1 / ((1 - conj(z_i) z_j)(1 - conj(w_i) w_j)); for a Schur function on G this
    matrix is positive semidefinite. The same matrix is formed for Phi_eta on a
    grid of eta as a reference.
    """
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise ValueError("duplicate points in pick_check")
    roots = np.array([unsymmetrize(q) for q in pts])
    s = np.array([q.s for q in pts])
    p = np.array([q.p for q in pts])
    z1, z2 = roots[:, 0], roots[:, 1]
    lam_min = _pick_min_eig(F.raw(s, p), z1, z2)
    etas = np.exp(2j * np.pi * np.arange(n_eta) / n_eta)
    phi_min = min(_pick_min_eig(magic.phi(eta, s, p), z1, z2) for eta in etas)
    return PickReport(lam_min, phi_min, lam_min >= -tol and phi_min >= -tol)


def cauchy_riemann_residual(P: BlockOperator, z, h: float = 1e-5) -> float:
    """max |d/d(conj z) F_P(z I)| over the points z, by central differences."""
    n = P.cols[1]
    if P.rows[1] != n:
        raise ValueError("F_P(z I) needs U = V")
    z = np.asarray(z, dtype=complex).reshape(-1)
    eye = np.eye(n)

    def F(w):
        return lft_eval(P, w[:, None, None] * eye)

    dx = (F(z + h) - F(z - h)) / (2 * h)
    dy = (F(z + 1j * h) - F(z - 1j * h)) / (2 * h)
    return opnorm((dx + 1j * dy) / 2)


def random_lft_instance(rng: np.random.Generator, max_block: int = 4, p_norm: float = 0.9, x_norm: float = 0.95):
    """Random (P, Q, X, Y) with matching block shapes, ||P||, ||Q|| = p_norm and ||X||, ||Y|| = x_norm."""
    g, v, h, u = (int(d) for d in rng.integers(1, max_block + 1, size=4))
    P = BlockOperator(random_contraction(rng, (g + v, h + u), p_norm), (g, v), (h, u))
    Q = BlockOperator(random_contraction(rng, (g + v, h + u), p_norm), (g, v), (h, u))
    X = random_contraction(rng, (u, v), x_norm)
    Y = random_contraction(rng, (u, v), x_norm)
    return P, Q, X, Y


def lft_identity_sweep(trials: int, seed: int = 0) -> float:
    """Largest residual of the LFT identity over random instances (block dims <= 4 each)."""
    rng = np.random.default_rng(seed)
    return max(lft_identity_residual(*random_lft_instance(rng)) for _ in range(trials))

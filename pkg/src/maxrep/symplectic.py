"""Sp(2n,R), its symmetric space of compatible complex structures, Lagrangians
and the cone of positive forms.

Conventions
-----------
The symplectic form is ``<x, y> = x^T Omega y`` with
``Omega = [[0, I], [-I, 0]]``.  A compatible complex structure ``J`` satisfies
``J^2 = -I`` and has ``Q_J = Omega J`` (the Gram matrix of ``<., J .>``)
symmetric positive definite.  The base point is ``J0 = -Omega``, for which
``Q_J0 = I``.

Two actions of ``g`` on complex structures appear: ``act_on_J(g, J) =
g^-1 J g`` (a right action) and ``push_J(g, J) = g J g^-1`` (a left action).
Complex structures built from Lagrangian triples transform by ``push_J`` when
the Lagrangians are moved by ``g``, so equivariance statements use it.

A transverse pair ``(L-, L+)`` is turned into a symplectic frame
``F = [B-, B+]`` with ``B-^T Omega B+ = I``.  In frame coordinates the
complex structures exchanging ``L-`` and ``L+`` are exactly
``[[0, -Z^-1], [Z, 0]]`` with ``Z`` positive definite, and ``Z`` is the
restriction of ``<., J .>`` to ``L-``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from maxrep import config


class SymplecticError(ValueError):
    pass


class NotTransverse(SymplecticError):
    pass


class NotInParallelSet(SymplecticError):
    pass


class NonCausal(SymplecticError):
    pass


def standard_form(n: int) -> np.ndarray:
    Z, I = np.zeros((n, n)), np.eye(n)
    return np.block([[Z, I], [-I, Z]])


def base_point(n: int) -> np.ndarray:
    """The complex structure ``J0 = -Omega`` with ``Omega J0 = I``."""
    return -standard_form(n)


def half_dim(M: np.ndarray) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise SymplecticError(f"expected a square matrix of even size, got shape {M.shape}")
    return M.shape[0] // 2


def is_symplectic(M, tol: float | None = None) -> bool:
    tol = config.TOL.symplectic if tol is None else tol
    M = np.asarray(M, dtype=float)
    n = half_dim(M)
    O = standard_form(n)
    return bool(np.abs(M.T @ O @ M - O).max() <= tol)


def sp_inverse(g: np.ndarray) -> np.ndarray:
    """``g^-1 = -Omega g^T Omega``, exact for symplectic ``g``."""
    O = standard_form(half_dim(g))
    return -O @ g.T @ O


def compatible_form(J: np.ndarray) -> np.ndarray:
    """``Q_J = Omega J``, the Gram matrix of ``<., J .>``."""
    return standard_form(half_dim(J)) @ J


def check_compatible(J, tol: float | None = None) -> np.ndarray:
    """Validate a compatible complex structure and return it as an array."""
    tol_ = config.TOL
    tol = tol_.complex_structure if tol is None else tol
    J = np.asarray(J, dtype=float)
    n = half_dim(J)
    scale = max(1.0, np.abs(J).max() ** 2)
    if np.abs(J @ J + np.eye(2 * n)).max() > tol * scale:
        raise SymplecticError("J^2 != -I")
    Q = compatible_form(J)
    if np.abs(Q - Q.T).max() > tol * max(1.0, np.abs(Q).max()):
        raise SymplecticError("<., J .> is not symmetric")
    # Q is symmetric and symplectic, so its spectrum is closed under mu -> 1/mu and
    # any negative eigenvalue has a partner of modulus >= 1; those are computed to
    # full relative accuracy while the smallest ones are lost to rounding when |Q| is large
    eig = np.linalg.eigvalsh((Q + Q.T) / 2)
    big = eig[np.abs(eig) >= 1.0]
    if big.size < n or big.min() <= tol_.posdef_min or eig[0] <= -tol * max(1.0, eig[-1]):
        raise SymplecticError("<., J .> is not positive definite")
    return J


def is_compatible(J, tol: float | None = None) -> bool:
    try:
        check_compatible(J, tol)
    except SymplecticError:
        return False
    return True


def act_on_J(g: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Right action ``g^-1 J g``; ``act_on_J(g h, J) == act_on_J(h, act_on_J(g, J))``."""
    out = sp_inverse(g) @ J @ g
    return check_compatible(out, tol=config.TOL.complex_structure * max(1.0, np.linalg.cond(g)))


def push_J(g: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Left action ``g J g^-1``, the one under which triple structures are equivariant."""
    out = g @ J @ sp_inverse(g)
    return check_compatible(out, tol=config.TOL.complex_structure * max(1.0, np.linalg.cond(g)))


def _relative_spectrum(Q1: np.ndarray, Q2: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``Q1^-1 Q2`` for symmetric positive definite ``Q1, Q2``."""
    return sla.eigh((Q2 + Q2.T) / 2, (Q1 + Q1.T) / 2, eigvals_only=True)


def d_sp(J1: np.ndarray, J2: np.ndarray) -> float:
    """``|log ||Id||_{J1,J2}| + |log ||Id||_{J2,J1}|``.

    ``||Id||_{J1,J2}`` is the operator norm of the identity from the norm of
    ``<., J1 .>`` to that of ``<., J2 .>``, i.e. ``sqrt(lambda_max(Q1^-1 Q2))``.
    """
    if np.shape(J1) != np.shape(J2):
        raise SymplecticError("dimension mismatch")
    lam = _relative_spectrum(compatible_form(J1), compatible_form(J2))
    return float(0.5 * abs(np.log(lam[-1])) + 0.5 * abs(np.log(lam[0])))


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """``expm(Omega S)`` for a random symmetric ``S``."""
    S = rng.normal(scale=scale, size=(2 * n, 2 * n))
    S = (S + S.T) / 2
    return sla.expm(standard_form(n) @ S)


def random_compatible(n: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    return push_J(random_symplectic(n, rng, scale), base_point(n))


# ----------------------------------------------------------------- Lagrangians


@dataclass(frozen=True)
class Lagrangian:
    """Lagrangian subspace with an orthonormal basis (a ``2n x n`` matrix)."""

    basis: np.ndarray
    isotropy_tol: float | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        if B.ndim != 2 or B.shape[0] != 2 * B.shape[1]:
            raise SymplecticError(f"Lagrangian basis must be 2n x n, got shape {B.shape}")
        s = np.linalg.svd(B, compute_uv=False)
        tol = config.TOL
        if s[-1] <= tol.rank_min * max(1.0, s[0]):
            raise SymplecticError("rank-deficient Lagrangian basis")
        Q, _ = np.linalg.qr(B)
        O = standard_form(B.shape[1])
        iso = tol.isotropy if self.isotropy_tol is None else self.isotropy_tol
        if np.abs(Q.T @ O @ Q).max() > iso:
            raise SymplecticError("subspace is not isotropic")
        object.__setattr__(self, "basis", Q)

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    def moved_by(self, g: np.ndarray) -> "Lagrangian":
        return Lagrangian(g @ self.basis, self.isotropy_tol)

    def distance(self, other: "Lagrangian") -> float:
        """Largest principal angle to ``other``."""
        return float(np.max(sla.subspace_angles(self.basis, other.basis)))

    def same_as(self, other: "Lagrangian", tol: float | None = None) -> bool:
        tol = config.TOL.same_lagrangian if tol is None else tol
        return self.distance(other) <= tol


def is_lagrangian(B, tol: float | None = None) -> bool:
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != 2 * B.shape[1]:
        return False
    s = np.linalg.svd(B, compute_uv=False)
    if s[-1] <= config.TOL.rank_min * max(1.0, s[0]):
        raise SymplecticError("rank-deficient basis")
    Q, _ = np.linalg.qr(B)
    tol = config.TOL.isotropy if tol is None else tol
    return bool(np.abs(Q.T @ standard_form(B.shape[1]) @ Q).max() <= tol)


def standard_pair(n: int) -> tuple[Lagrangian, Lagrangian]:
    """``(span(e_1..e_n), span(e_{n+1}..e_{2n}))`` as ``(L-, L+)``; its adapted frame is ``F = I``."""
    I = np.eye(2 * n)
    return Lagrangian(I[:, :n]), Lagrangian(I[:, n:])


def transverse(L1: Lagrangian, L2: Lagrangian, tol: float | None = None) -> bool:
    tol = config.TOL.transverse if tol is None else tol
    s = np.linalg.svd(np.hstack([L1.basis, L2.basis]), compute_uv=False)
    return bool(s[-1] > tol)


def graph_lagrangian(S: np.ndarray, frame: "Frame | None" = None) -> Lagrangian:
    """Graph ``{x + S x}`` of a map ``L- -> L+`` given in frame coordinates."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    coords = np.vstack([np.eye(n), S])
    F = np.eye(2 * n) if frame is None else frame.F
    return Lagrangian(F @ coords)


@dataclass(frozen=True)
class Frame:
    """Symplectic frame ``F = [B-, B+]`` adapted to a transverse pair."""

    minus: Lagrangian
    plus: Lagrangian
    F: np.ndarray
    Finv: np.ndarray

    @classmethod
    def from_pair(cls, minus: Lagrangian, plus: Lagrangian) -> "Frame":
        if minus.n != plus.n:
            raise SymplecticError("dimension mismatch")
        if not transverse(minus, plus):
            raise NotTransverse("frame Lagrangians are not transverse")
        n = minus.n
        O = standard_form(n)
        Bm = minus.basis
        pairing = Bm.T @ O @ plus.basis
        Bp = plus.basis @ np.linalg.inv(pairing)
        F = np.hstack([Bm, Bp])
        return cls(minus, plus, F, sp_inverse(F))

    @property
    def n(self) -> int:
        return self.minus.n

    def to_frame(self, M: np.ndarray) -> np.ndarray:
        """Matrix of the linear map ``M`` in frame coordinates."""
        return self.Finv @ M @ self.F

    def from_frame(self, M: np.ndarray) -> np.ndarray:
        return self.F @ M @ self.Finv


def graph_map(minus: Lagrangian, plus: Lagrangian, zero: Lagrangian) -> tuple[np.ndarray, np.ndarray]:
    """``(T-, T+)`` with ``L0 = {x + T- x : x in L-} = {y + T+ y : y in L+}``.

    Both maps are returned as matrices in the coordinates of the symplectic
    frame adapted to ``(L-, L+)``; ``T+`` is the inverse of ``T-``.
    """
    frame = Frame.from_pair(minus, plus)
    return _graph_maps(frame, zero)


def _graph_maps(frame: Frame, zero: Lagrangian) -> tuple[np.ndarray, np.ndarray]:
    n = frame.n
    c = frame.Finv @ zero.basis
    X, Y = c[:n], c[n:]
    tol = config.TOL.transverse
    sx = np.linalg.svd(X, compute_uv=False)
    sy = np.linalg.svd(Y, compute_uv=False)
    if sx[-1] <= tol * max(1.0, sx[0]) or sy[-1] <= tol * max(1.0, sy[0]):
        raise NotTransverse("L0 is not transverse to both L- and L+")
    T_minus = Y @ np.linalg.inv(X)
    T_plus = X @ np.linalg.inv(Y)
    return T_minus, T_plus


def triple_J(minus: Lagrangian, zero: Lagrangian, plus: Lagrangian) -> np.ndarray:
    """``J_{L0} = [[0, -T+], [T-, 0]]`` in the frame of ``(L-, L+)``, returned in standard coordinates.

    Not validated as compatible: for a non-maximal triple ``<., J .>`` is
    indefinite.  Use :func:`is_maximal_triple` to decide.
    """
    frame = Frame.from_pair(minus, plus)
    T_minus, T_plus = _graph_maps(frame, zero)
    n = frame.n
    Z = np.zeros((n, n))
    Jf = np.block([[Z, -T_plus], [T_minus, Z]])
    return frame.from_frame(Jf)


def triple_signature(minus: Lagrangian, zero: Lagrangian, plus: Lagrangian) -> int:
    """Signature of ``<., J_{L0} .>``; ranges over ``-2n, -2n+4, ..., 2n``."""
    frame = Frame.from_pair(minus, plus)
    T_minus, _ = _graph_maps(frame, zero)
    T = (T_minus + T_minus.T) / 2
    w = np.linalg.eigvalsh(T)
    # in frame coordinates <., J .> = diag(T-, T+) and T+ = (T-)^-1
    return int(2 * (np.sum(w > 0) - np.sum(w < 0)))


def is_maximal_triple(minus: Lagrangian, zero: Lagrangian, plus: Lagrangian) -> tuple[bool, int]:
    sig = triple_signature(minus, zero, plus)
    return sig == 2 * minus.n, sig


# -------------------------------------------------------- positive cone model


def check_posdef(Z, tol: float | None = None) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise SymplecticError(f"expected a square matrix, got shape {Z.shape}")
    if np.abs(Z - Z.T).max() > 1e-10 * max(1.0, np.abs(Z).max()):
        raise SymplecticError("form is not symmetric")
    tol = config.TOL.posdef_min if tol is None else tol
    if np.linalg.eigvalsh((Z + Z.T) / 2)[0] <= tol:
        raise SymplecticError("form is not positive definite")
    return (Z + Z.T) / 2


def y_frame_J(Z: np.ndarray) -> np.ndarray:
    """``[[0, -Z^-1], [Z, 0]]``, the complex structure of ``Z`` in frame coordinates."""
    n = Z.shape[0]
    O = np.zeros((n, n))
    return np.block([[O, -np.linalg.inv(Z)], [Z, O]])


def y_embed(Z, frame: Frame | None = None) -> np.ndarray:
    """Complex structure exchanging ``L-`` and ``L+`` whose form on ``L-`` is ``Z``."""
    Z = check_posdef(Z)
    Jf = y_frame_J(Z)
    return Jf if frame is None else frame.from_frame(Jf)


def y_project(J, frame: Frame | None = None, tol: float | None = None) -> np.ndarray:
    """Inverse of :func:`y_embed`; rejects ``J`` that do not exchange the frame Lagrangians."""
    J = np.asarray(J, dtype=float)
    n = half_dim(J)
    Jf = J if frame is None else frame.to_frame(J)
    tol = config.TOL.y_block if tol is None else tol
    off = max(np.abs(Jf[:n, :n]).max(), np.abs(Jf[n:, n:]).max())
    if off > tol * max(1.0, np.abs(Jf).max()):
        raise NotInParallelSet(f"J does not exchange L- and L+ (diagonal block mass {off:.3e})")
    Z = Jf[n:, :n]
    return check_posdef((Z + Z.T) / 2)


def gl_embed(A: np.ndarray) -> np.ndarray:
    """``A -> diag(A, A^-T)``, the embedding of GL(L-) in Sp(V) (frame coordinates)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    O = np.zeros((n, n))
    return np.block([[A, O], [O, np.linalg.inv(A).T]])


def gl_act(A: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """``A^T Z A``."""
    out = A.T @ Z @ A
    return (out + out.T) / 2


def _cone_spectrum(Z: np.ndarray, Z2: np.ndarray) -> np.ndarray:
    return sla.eigh((Z2 + Z2.T) / 2, (Z + Z.T) / 2, eigvals_only=True)


def d_y(Z: np.ndarray, Z2: np.ndarray) -> float:
    """Distance on positive forms induced from ``d_sp``: ``log max(lmax(Z^-1 Z'), lmax(Z'^-1 Z))``."""
    lam = _cone_spectrum(Z, Z2)
    return float(max(np.log(lam[-1]), -np.log(lam[0])))


def d_proof(Z: np.ndarray, Z2: np.ndarray) -> float:
    """``|log lmax| + |log lmin|`` of ``Z^-1 Z'``: the evaluation used in the causal length argument."""
    lam = _cone_spectrum(Z, Z2)
    return float(abs(np.log(lam[-1])) + abs(np.log(lam[0])))


def congruence_extremes(Z: np.ndarray, B: np.ndarray, Binv: np.ndarray | None = None) -> tuple[float, float]:
    """``(lambda_min, lambda_max)`` of ``Z^-1 (B^T Z B)``, accurate even for huge ``B``.

    With ``Z = L L^T`` the spectrum is that of ``K K^T`` for ``K = L^-1 B^T L``,
    so the extremes are ``|K|^2`` and ``|K^-1|^-2`` (spectral norms), both
    computed to full relative precision.
    """
    Z = check_posdef(Z)
    L = np.linalg.cholesky(Z)
    Binv = np.linalg.inv(B) if Binv is None else Binv
    K = sla.solve_triangular(L, B.T @ L, lower=True)
    Kinv = sla.solve_triangular(L, Binv.T @ L, lower=True)
    return float(np.linalg.norm(Kinv, 2) ** -2), float(np.linalg.norm(K, 2) ** 2)


def d_y_moved(Z: np.ndarray, B: np.ndarray, Binv: np.ndarray | None = None) -> float:
    """``d_y(Z, B^T Z B)`` through :func:`congruence_extremes`."""
    lo, hi = congruence_extremes(Z, B, Binv)
    return float(max(np.log(hi), -np.log(lo)))


METRICS: dict[str, Callable[[np.ndarray, np.ndarray], float]] = {"d_y": d_y, "d_proof": d_proof}


def in_cone(Z: np.ndarray, Z2: np.ndarray, margin: float | None = None) -> bool:
    """``Z' - Z`` positive definite."""
    margin = config.TOL.cone_margin if margin is None else margin
    D = np.asarray(Z2) - np.asarray(Z)
    return bool(np.linalg.eigvalsh((D + D.T) / 2)[0] > margin)


@dataclass(frozen=True)
class CausalCurve:
    """Piecewise-linear curve of positive forms, strictly increasing in the cone order."""

    samples: tuple[np.ndarray, ...]

    def __post_init__(self):
        samples = tuple(check_posdef(Z) for Z in self.samples)
        if len(samples) < 2:
            raise SymplecticError("a causal curve needs at least two samples")
        for i, (Z0, Z1) in enumerate(zip(samples, samples[1:])):
            if not in_cone(Z0, Z1):
                raise NonCausal(f"samples {i} and {i + 1} are not in cone order")
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        return self.samples[0].shape[0]

    def concat(self, other: "CausalCurve") -> "CausalCurve":
        if np.abs(self.samples[-1] - other.samples[0]).max() > 1e-12 * max(1.0, np.abs(other.samples[0]).max()):
            raise SymplecticError("curves do not meet")
        return CausalCurve(self.samples + other.samples[1:])


def _refine(samples: Sequence[np.ndarray], depth: int) -> list[np.ndarray]:
    k = 2 ** depth
    out = [samples[0]]
    for Z0, Z1 in zip(samples, samples[1:]):
        for j in range(1, k + 1):
            t = j / k
            out.append((1 - t) * Z0 + t * Z1)
    return out


def causal_length(curve: CausalCurve, metric: str | Callable = "d_y", max_depth: int = 10,
                  rtol: float = 1e-12) -> tuple[float, int]:
    """Length as the limit of inscribed polygon sums over dyadic refinements.

    Refinement stops once a level adds less than ``rtol`` relative length, or
    at ``max_depth``.  Returns ``(length, depth_used)``.
    """
    dist = METRICS[metric] if isinstance(metric, str) else metric
    prev = None
    for depth in range(max_depth + 1):
        pts = _refine(curve.samples, depth)
        total = sum(dist(a, b) for a, b in zip(pts, pts[1:]))
        if prev is not None and total - prev <= rtol * max(1.0, abs(total)):
            return max(total, prev), depth
        prev = total
    return prev, max_depth


@dataclass(frozen=True)
class CausalBoundReport:
    metric: str
    length: float
    bound: float
    margin: float
    depth: int
    passed: bool


def check_causal_bound(curve: CausalCurve, metric: str = "d_y", tol: float = 1e-9) -> CausalBoundReport:
    """Compare the length of a causal curve with ``n`` times the endpoint distance."""
    length, depth = causal_length(curve, metric)
    dist = METRICS[metric]
    bound = curve.n * dist(curve.samples[0], curve.samples[-1])
    margin = bound - length
    return CausalBoundReport(metric, length, bound, margin, depth, margin >= -tol)


def random_causal_curve(n: int, rng: np.random.Generator, max_samples: int = 16) -> CausalCurve:
    """Random piecewise-linear causal curve with 2..max_samples samples."""
    k = int(rng.integers(2, max_samples + 1))
    A = rng.normal(size=(n, n))
    Z = A @ A.T + 0.1 * np.eye(n)
    samples = [Z]
    for _ in range(k - 1):
        B = rng.normal(size=(n, n))
        step = B @ B.T + 1e-3 * np.eye(n)
        Z = Z + step * rng.uniform(0.05, 2.0)
        samples.append(Z)
    return CausalCurve(tuple(samples))


# --------------------------------------------------------------- polar parts


def unitary_part(g: np.ndarray) -> tuple[np.ndarray, complex]:
    """Orthogonal polar factor ``U`` of ``g`` and ``det`` of ``U`` as a unitary matrix.

    For symplectic ``g`` the factor ``U`` commutes with ``J0``, so it has the
    block form ``[[X, -Y], [Y, X]]`` and corresponds to ``X + iY`` in U(n).
    """
    g = np.asarray(g, dtype=float)
    n = half_dim(g)
    W, s, Vt = np.linalg.svd(g)
    if s[-1] <= 0 or not np.all(np.isfinite(s)):
        raise SymplecticError("polar decomposition failed on a singular matrix")
    U = W @ Vt
    detc = complex(np.linalg.det(U[:n, :n] + 1j * U[n:, :n]))
    return U, detc

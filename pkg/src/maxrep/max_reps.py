"""Maximal representations of surface groups into Sp(2n,R).

Representations are built by composing a hyperbolization with an embedding
SL(2,R) -> Sp(2n,R): ``n`` diagonal copies, or the irreducible action on
binary forms of degree ``2n-1``.  This module computes the Toledo invariant
as a winding number, the boundary map and the complex structures ``J(u)``
attached to unit tangent vectors, and translation lengths in the symmetric
space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize

from maxrep import config, tables
from maxrep.hyperbolic import Hyperbolization, TangentTriple, evaluate_h, fixed_points, frame_matrix
from maxrep.surface_group import Word, WordError, generators, relator
from maxrep.symplectic import (
    Frame,
    Lagrangian,
    check_compatible,
    half_dim,
    is_maximal_triple,
    is_symplectic,
    random_symplectic,
    sp_inverse,
    standard_form,
    triple_J,
    unitary_part,
)


class RepresentationError(ValueError):
    pass


class ToledoError(RuntimeError):
    pass


class NotProximal(ValueError):
    pass


class UnsupportedConstruction(ValueError):
    pass


class NonMaximalTriple(RuntimeError):
    pass


class MinimizerError(RuntimeError):
    pass


DEFAULT_STARTS = 20


# ------------------------------------------------------------------ embeddings


def _binary_power(p: np.ndarray, q: np.ndarray, i: int, j: int) -> np.ndarray:
    """Coefficients of ``p^i q^j`` for linear forms given as ``[coef X, coef Y]``."""
    out = np.array([1.0])
    for _ in range(i):
        out = np.convolve(out, p)
    for _ in range(j):
        out = np.convolve(out, q)
    return out


class Embedding:
    """Homomorphism SL(2,R) -> Sp(2n,R) with an equivariant boundary map."""

    tag = ""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        self.n = int(n)

    def __call__(self, M: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def boundary(self, x: float) -> np.ndarray:
        """Basis (``2n x n``) of the Lagrangian attached to the boundary point ``x``."""
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.n == other.n

    def __hash__(self):
        return hash((self.tag, self.n))

    def __repr__(self):
        return f"{type(self).__name__}({self.n})"


class DiagonalEmbedding(Embedding):
    """``M -> M (x) I_n``: ``n`` copies of SL(2,R) acting on the pairs ``(q_i, p_i)``."""

    tag = "diagonal"

    def __call__(self, M):
        return np.kron(np.asarray(M, dtype=float), np.eye(self.n))

    def boundary(self, x):
        v = np.array([1.0, 0.0]) if math.isinf(x) else np.array([x, 1.0])
        return np.kron(v.reshape(2, 1), np.eye(self.n))


class IrreducibleEmbedding(Embedding):
    """Action of SL(2,R) on binary forms of degree ``m = 2n-1``.

    A form ``sum_k c_k X^(m-k) Y^k`` is the coefficient vector ``(c_0..c_m)``;
    ``g = [[a, b], [c, d]]`` substitutes ``X -> aX + cY``, ``Y -> bX + dY``.
    The invariant pairing is ``B[k, m-k] = (-1)^k / C(m, k)``.  The basis change
    ``P`` sends ``q_k -> u_k`` and ``p_k -> e (-1)^k C(m, k) u_(m-k)`` for
    ``k < n`` with ``e = (-1)^(n+1)``; it turns ``B`` into ``e * Omega`` and the
    sign ``e`` makes the osculating flags of the rational normal curve a
    positively oriented (maximal) family.
    """

    tag = "irreducible"

    def __init__(self, n: int):
        super().__init__(n)
        m = 2 * self.n - 1
        sign = (-1) ** (self.n + 1)
        P = np.zeros((m + 1, 2 * self.n))
        for k in range(self.n):
            P[k, k] = 1.0
            P[m - k, self.n + k] = sign * (-1) ** k * math.comb(m, k)
        self.m = m
        self.P = P
        self.Pinv = np.linalg.inv(P)

    def symmetric_power(self, M) -> np.ndarray:
        a, b, c, d = np.asarray(M, dtype=float).ravel()
        S = np.empty((self.m + 1, self.m + 1))
        for k in range(self.m + 1):
            S[:, k] = _binary_power(np.array([a, c]), np.array([b, d]), self.m - k, k)
        return S

    def __call__(self, M):
        return self.Pinv @ self.symmetric_power(M) @ self.P

    def boundary(self, x):
        # forms divisible by L^n with L = sX + tY the unit linear form vanishing at x;
        # the basis L^(m-j) L'^j with L' perpendicular to L stays well conditioned as x grows
        if math.isinf(x):
            s, t = 1.0, 0.0
        else:
            r = math.hypot(x, 1.0)
            s, t = x / r, 1.0 / r
        L, Lp = np.array([s, t]), np.array([-t, s])
        cols = [_binary_power(L, Lp, self.m - j, j) for j in range(self.n)]
        return self.Pinv @ np.array(cols).T


EMBEDDINGS: dict[str, type[Embedding]] = {"diagonal": DiagonalEmbedding, "irreducible": IrreducibleEmbedding}


def diagonal_embedding(n: int) -> DiagonalEmbedding:
    return DiagonalEmbedding(n)


def irreducible_embedding(n: int) -> IrreducibleEmbedding:
    return IrreducibleEmbedding(n)


def embedding_from_tag(tag: str, n: int) -> Embedding:
    try:
        return EMBEDDINGS[tag](n)
    except KeyError:
        raise UnsupportedConstruction(f"unknown embedding {tag!r}; choose from {sorted(EMBEDDINGS)}") from None


# ------------------------------------------------------------- representations


@dataclass(frozen=True)
class MaximalRep:
    """Generator images of a representation of the genus-``genus`` surface group.

    ``construction`` is ``diagonal``, ``irreducible`` or ``user``.  For the
    first two the base hyperbolization and the embedding are kept; words are
    then evaluated as ``embedding(h(w))``, which equals the product of the
    generator images and is much better conditioned for the irreducible
    embedding.
    """

    images: Mapping[int, np.ndarray]
    n: int
    genus: int
    construction: str = "user"
    toledo_cache: int | None = None
    base_hyperbolization: Hyperbolization | None = field(default=None, compare=False)
    embedding: Embedding | None = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        gens = generators(self.genus)
        if sorted(self.images) != gens:
            raise RepresentationError(f"images must be given for generators {gens}")
        for g in gens:
            M = np.asarray(self.images[g], dtype=float)
            if M.shape != (2 * self.n, 2 * self.n):
                raise RepresentationError(f"image of generator {g} has shape {M.shape}, expected {(2 * self.n,) * 2}")
            # entries grow quickly for the irreducible embedding; roundoff scales with |M|^2
            if not is_symplectic(M, config.TOL.symplectic * max(1.0, np.abs(M).max() ** 2)):
                raise RepresentationError(f"image of generator {g} is not symplectic")
        if self.toledo_cache is not None and abs(self.toledo_cache) > milnor_wood_bound(self.n, self.genus):
            raise RepresentationError(f"Toledo {self.toledo_cache} exceeds the Milnor-Wood bound")

    def __call__(self, w: Word) -> np.ndarray:
        return evaluate(self, w)

    def relator_residual(self) -> float:
        return float(np.abs(evaluate(self, relator(self.genus)) - np.eye(2 * self.n)).max())

    def images_residual(self) -> float:
        """Relator residual of the plain product of generator images."""
        return float(np.abs(_product(self.images, relator(self.genus).letters, self.n) - np.eye(2 * self.n)).max())

    def to_table(self) -> str:
        entries = {tables.index_to_label(g): tables.format_matrix(self.images[g]) for g in generators(self.genus)}
        meta = {"genus": str(self.genus), "n": str(self.n), "construction": self.construction}
        if self.name:
            meta["name"] = self.name
        if self.toledo_cache is not None:
            meta["toledo"] = str(self.toledo_cache)
        return tables.format_table(entries, meta)


def _letter_image(images: Mapping[int, np.ndarray], x: int) -> np.ndarray:
    M = np.asarray(images[abs(x)], dtype=float)
    return M if x > 0 else sp_inverse(M)


def _product(images: Mapping[int, np.ndarray], letters, n: int) -> np.ndarray:
    out = np.eye(2 * n)
    for x in letters:
        out = out @ _letter_image(images, x)
    return out


def evaluate(rep: MaximalRep, w: Word) -> np.ndarray:
    if w.genus != rep.genus:
        raise WordError(f"word genus {w.genus} does not match representation genus {rep.genus}")
    if rep.base_hyperbolization is not None and rep.embedding is not None:
        return rep.embedding(evaluate_h(rep.base_hyperbolization, w))
    return _product(rep.images, w.letters, rep.n)


def _check_residual(rep: MaximalRep) -> MaximalRep:
    resid = rep.relator_residual()
    if resid > config.TOL.relator_rep:
        raise RepresentationError(f"relator residual {resid:.3e} exceeds {config.TOL.relator_rep:g}")
    return rep


def compose_rep(h: Hyperbolization, e: Embedding, compute_toledo: bool = True) -> MaximalRep:
    """``e o h`` with the relator residual checked and the Toledo invariant cached."""
    h.validate()
    images = {g: e(h.images[g]) for g in generators(h.genus)}
    rep = MaximalRep(images, e.n, h.genus, e.tag, None, h, e, name=f"{h.name}-{e.tag}{e.n}")
    _check_residual(rep)
    if compute_toledo:
        rep = replace(rep, toledo_cache=toledo(rep))
    return rep


def trivial_rep(n: int, genus: int = 2) -> MaximalRep:
    return MaximalRep({g: np.eye(2 * n) for g in generators(genus)}, n, genus, "user", name="trivial")


def conjugate_rep(rep: MaximalRep, g: np.ndarray) -> MaximalRep:
    """``s -> g rho(s) g^-1`` as a user representation."""
    ginv = sp_inverse(g)
    images = {s: g @ M @ ginv for s, M in rep.images.items()}
    return MaximalRep(images, rep.n, rep.genus, "user", name=f"{rep.name}-conj")


def direct_sum(rep1: MaximalRep, rep2: MaximalRep) -> MaximalRep:
    """Block sum on ``V1 + V2`` with coordinates ordered ``(q1, q2, p1, p2)``."""
    if rep1.genus != rep2.genus:
        raise RepresentationError("genus mismatch")
    n1, n2 = rep1.n, rep2.n
    n = n1 + n2
    idx1 = list(range(n1)) + list(range(n, n + n1))
    idx2 = list(range(n1, n)) + list(range(n + n1, 2 * n))
    images = {}
    for s in generators(rep1.genus):
        M = np.zeros((2 * n, 2 * n))
        M[np.ix_(idx1, idx1)] = rep1.images[s]
        M[np.ix_(idx2, idx2)] = rep2.images[s]
        images[s] = M
    return MaximalRep(images, n, rep1.genus, "user", name=f"{rep1.name}+{rep2.name}")


def load_rep(path: str | Path) -> MaximalRep:
    table = tables.read_table(path)
    try:
        genus = int(table.meta["genus"])
        n = int(table.meta["n"])
    except KeyError as exc:
        raise tables.TableError(f"{path}: missing metadata {exc}") from None
    images = {tables.label_to_index(k): tables.parse_matrix(v, 2 * n) for k, v in table.entries.items()}
    rep = MaximalRep(images, n, genus, "user", name=table.meta.get("name", Path(path).stem))
    return _check_residual(rep)


def dump_rep(rep: MaximalRep, path: str | Path) -> None:
    Path(path).write_text(rep.to_table())


# ----------------------------------------------------------------------- Toledo


def milnor_wood_bound(n: int, genus: int) -> int:
    """``n |chi| = n (2g - 2)``, the largest possible Toledo invariant."""
    return n * (2 * genus - 2)


def _polar_path(g: np.ndarray) -> Callable[[float], np.ndarray]:
    """Path from I to ``g``: rotate along the unitary factor, stretch along the positive one.

    With ``g = U P``, ``U`` is written ``Z diag(e^(i theta)) Z*`` as a unitary
    ``W = X + iY`` (Schur form, angles in ``(-pi, pi]``) and the path is
    ``U_t exp(t log P)``.
    """
    n = half_dim(g)
    U, _ = unitary_part(g)
    P = U.T @ g
    w, V = np.linalg.eigh((P + P.T) / 2)
    W = U[:n, :n] + 1j * U[n:, :n]
    T, Zs = sla.schur(W, output="complex")
    theta = np.angle(np.diag(T))
    Zh = Zs.conj().T

    def path(t: float) -> np.ndarray:
        Wt = (Zs * np.exp(1j * t * theta)) @ Zh
        Ut = np.block([[Wt.real, -Wt.imag], [Wt.imag, Wt.real]])
        return Ut @ ((V * w ** t) @ V.T)

    return path


def _detour_path(g: np.ndarray, r: np.ndarray) -> Callable[[float], np.ndarray]:
    """Path from I to ``g`` passing through ``r``."""
    first, second = _polar_path(r), _polar_path(np.linalg.solve(r, g))

    def path(t: float) -> np.ndarray:
        return first(2 * t) if t <= 0.5 else r @ second(2 * t - 1)

    return path


def complex_form(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(P, Q)`` with ``g(z) = P z + Q conj(z)`` on ``C^n`` (``z = x + i y``).

    For symplectic ``g`` the matrix ``P`` is invertible and ``arg det P`` is the
    argument of ``det_C`` of the unitary polar factor.
    """
    n = half_dim(g)
    A, B, C, D = g[:n, :n], g[:n, n:], g[n:, :n], g[n:, n:]
    return 0.5 * ((A + D) + 1j * (C - B)), 0.5 * ((A - D) + 1j * (C + B))


def _arg_det(g: np.ndarray) -> float:
    return float(np.angle(np.linalg.det(complex_form(g)[0])))


def _cocycle(Z: np.ndarray, g: np.ndarray) -> tuple[float, np.ndarray]:
    """Correction term and new disc point when a prefix with disc point ``Z`` is extended by ``g``.

    ``P_(hg) = P_h (I + Z conj(Q_g) P_g^-1) P_g`` with ``Z = P_h^-1 Q_h`` of norm
    below one, so the middle factor has a continuous argument, the sum of
    ``Arg(1 + mu)`` over its eigenvalues.  The prefix itself is never formed,
    which keeps long products of large matrices out of the computation.
    """
    P, Q = complex_form(g)
    W = np.conj(Q) @ np.linalg.inv(P)
    mu = np.linalg.eigvals(Z @ W)
    eta = float(np.sum(np.angle(1.0 + mu)))
    Znew = np.linalg.solve(P + Z @ np.conj(Q), Q + Z @ np.conj(P))
    return eta, Znew


@dataclass(frozen=True)
class WindingResult:
    winding: float
    max_steps: int
    endpoint_residual: float


def _path_angle(piece: Callable[[float], np.ndarray], initial_steps: int, max_steps: int) -> tuple[float, int]:
    """Continuous change of ``arg det_C`` along ``piece`` on ``[0, 1]``."""
    steps = initial_steps
    while True:
        ts = np.linspace(0.0, 1.0, steps + 1)
        args = np.array([_arg_det(piece(t)) for t in ts])
        d = (np.diff(args) + np.pi) % (2 * np.pi) - np.pi
        if np.abs(d).max() < np.pi / 4 or steps >= max_steps:
            break
        steps *= 2
    if np.abs(d).max() >= np.pi / 4:
        raise ToledoError(f"argument jumps by {np.abs(d).max():.3f} even at {steps} steps")
    return float(d.sum()), steps


def winding_number(images: Mapping[int, np.ndarray], letters, n: int,
                   rng: np.random.Generator | None = None,
                   initial_steps: int = 16, max_steps: int = 1 << 14) -> WindingResult:
    """Winding of ``det_C`` of the unitary factor along the lifted word path.

    Each letter contributes a path from I to its image (inverse letters use
    the reversed inverse path) left-multiplied by the product so far.  Along
    ``prefix * path(t)`` the argument splits into the argument along
    ``path(t)``, tracked by sampling doubled until consecutive values differ
    by less than ``pi/4``, plus a bounded continuous correction depending on
    the prefix only through its point in the Siegel disc.  With ``rng`` given
    every generator path takes a random detour, which must not change the
    result on a closed loop.
    """
    paths = {}
    for s in sorted({abs(x) for x in letters}):
        g = np.asarray(images[s], dtype=float)
        if rng is None:
            paths[s] = _polar_path(g)
        else:
            paths[s] = _detour_path(g, random_symplectic(n, rng, scale=0.8))
    Z = np.zeros((n, n), dtype=complex)
    total = 0.0
    used = 0
    prefix = np.eye(2 * n)
    for x in letters:
        path = paths[abs(x)]
        g = _letter_image(images, x)
        if x > 0:
            piece = path
        else:
            def piece(t, path=path, g=g):
                # path(1 - t) g^-1 runs from I to g^-1
                return path(1.0 - t) @ g
        angle, steps = _path_angle(piece, initial_steps, max_steps)
        eta, Z = _cocycle(Z, g)
        total += angle + eta
        used = max(used, steps)
        prefix = prefix @ g
    resid = float(np.abs(prefix - np.eye(2 * n)).max())
    return WindingResult(total / (2 * np.pi), used, resid)


@dataclass(frozen=True)
class ToledoResult:
    value: int
    winding: float
    integrality_residual: float
    steps: int
    bound: int


def toledo_details(rep: MaximalRep, rng: np.random.Generator | None = None) -> ToledoResult:
    """Toledo invariant ``-2 * winding`` of the relator loop.

    The normalization makes the Fuchsian octagon group at ``n = 1`` give
    ``2g - 2``; the relator loop closes up because every generator occurs in
    the relator with total exponent zero, so the value does not depend on the
    chosen paths.
    """
    tol = config.TOL
    resid = rep.relator_residual()
    if resid > tol.relator_rep:
        raise ToledoError(f"relator residual {resid:.3e} exceeds {tol.relator_rep:g}")
    wr = winding_number(rep.images, relator(rep.genus).letters, rep.n, rng)
    value = -2.0 * wr.winding
    k = int(round(value))
    off = abs(value - k)
    if off > tol.winding_integral:
        raise ToledoError(f"winding {wr.winding!r} is not a half-integer within {tol.winding_integral:g}")
    return ToledoResult(k, wr.winding, off, wr.max_steps, milnor_wood_bound(rep.n, rep.genus))


def toledo(rep: MaximalRep, rng: np.random.Generator | None = None) -> int:
    if rng is None and rep.toledo_cache is not None:
        return rep.toledo_cache
    return toledo_details(rep, rng).value


def is_maximal(rep: MaximalRep) -> bool:
    return abs(toledo(rep)) == milnor_wood_bound(rep.n, rep.genus)


# ------------------------------------------------------ Lagrangians from spectra


def _check_proximal(M: np.ndarray) -> None:
    margin = config.TOL.proximal_margin
    mods = np.abs(np.linalg.eigvals(M))
    close = np.abs(mods - 1.0)
    if close.min() <= margin:
        raise NotProximal(f"eigenvalue of modulus {mods[close.argmin()]!r} is within {margin:g} of the unit circle")


def attracting_lagrangian(M: np.ndarray) -> Lagrangian:
    """Sum of the generalized eigenspaces of ``M`` with ``|lambda| > 1``."""
    M = np.asarray(M, dtype=float)
    n = half_dim(M)
    _check_proximal(M)
    _, Zs, k = sla.schur(M, output="real", sort="ouc")
    if k != n:
        raise NotProximal(f"{k} eigenvalues outside the unit circle, expected {n}")
    return Lagrangian(Zs[:, :k], isotropy_tol=1e-8)


def repelling_lagrangian(M: np.ndarray) -> Lagrangian:
    return attracting_lagrangian(sp_inverse(np.asarray(M, dtype=float)))


def axis_frame(M: np.ndarray) -> Frame:
    """Frame adapted to ``(repelling, attracting)`` Lagrangians of ``M``."""
    return Frame.from_pair(repelling_lagrangian(M), attracting_lagrangian(M))


def contracting_block(M: np.ndarray, frame: Frame | None = None) -> np.ndarray:
    """Block ``A`` of ``M`` on ``L-``: in the adapted frame ``M = diag(A, A^-T)``."""
    frame = axis_frame(M) if frame is None else frame
    Mf = frame.to_frame(M)
    n = frame.n
    off = max(np.abs(Mf[:n, n:]).max(), np.abs(Mf[n:, :n]).max())
    scale = max(1.0, np.abs(Mf).max())
    if off > 1e-6 * scale:
        raise NotProximal(f"M does not preserve its spectral Lagrangians (off-block {off:.3e})")
    return Mf[:n, :n]


def has_factored_axes(rep: MaximalRep) -> bool:
    return rep.embedding is not None and rep.base_hyperbolization is not None


def exact_axis(rep: MaximalRep, w: Word) -> tuple[Frame, np.ndarray]:
    """Adapted frame and contracting block of ``rho(w)`` for a composed representation.

    With ``S`` sending ``0, inf`` to the repelling and attracting fixed points
    of ``h(w)``, ``S^-1 h(w) S = diag(mu, 1/mu)`` and ``rho(w)`` is conjugate by
    ``e(S)`` to the diagonal matrix ``e(diag(mu, 1/mu))``.  The frame
    ``e(S) [[0, -I], [I, 0]]`` puts ``L-`` first, and the block is exact even
    when ``rho(w)`` itself is too large to decompose reliably.
    """
    if not has_factored_axes(rep):
        raise UnsupportedConstruction("exact axes need a composed representation")
    Mh = evaluate_h(rep.base_hyperbolization, w)
    x_minus, x_plus = fixed_points(Mh)
    S = frame_matrix(x_minus, x_plus)
    tr = float(np.trace(Mh))
    ell = 2.0 * math.acosh(abs(tr) / 2.0)
    mu = math.copysign(math.exp(ell / 2.0), tr)
    n = rep.n
    F = rep.embedding(S) @ (-standard_form(n))
    frame = Frame(Lagrangian(F[:, :n]), Lagrangian(F[:, n:]), F, sp_inverse(F))
    A = rep.embedding(np.diag([mu, 1.0 / mu]))[n:, n:]
    return frame, A


# ------------------------------------------------------------------ boundary map


@dataclass(frozen=True)
class BoundaryMap:
    """Equivariant map from the circle to Lagrangians: ``phi = e_hat o phi_Fuchs``."""

    rep: MaximalRep

    def __call__(self, x: float) -> Lagrangian:
        return Lagrangian(self.rep.embedding.boundary(x))

    def basis(self, x: float) -> np.ndarray:
        return self.rep.embedding.boundary(x)


def boundary_map(rep: MaximalRep) -> BoundaryMap:
    if rep.embedding is None or rep.construction not in EMBEDDINGS:
        raise UnsupportedConstruction(
            f"no computable boundary map for construction {rep.construction!r}; "
            "only diagonal and irreducible compositions carry one")
    return BoundaryMap(rep)


def j_of_u(rep: MaximalRep, phi: BoundaryMap, u: TangentTriple) -> np.ndarray:
    """``J(u)``: the complex structure of the Lagrangian triple ``phi(u-), phi(u0), phi(u+)``."""
    Lm, L0, Lp = phi(u.minus), phi(u.zero), phi(u.plus)
    ok, sig = is_maximal_triple(Lm, L0, Lp)
    if not ok:
        raise NonMaximalTriple(f"triple at {tuple(u)} has signature {sig}, expected {2 * rep.n}")
    J = triple_J(Lm, L0, Lp)
    return check_compatible(J, tol=1e-7 * max(1.0, np.abs(J).max()))


def j_frame(phi: BoundaryMap, u: TangentTriple) -> Frame:
    return Frame.from_pair(phi(u.minus), phi(u.plus))


# ----------------------------------------------------------- translation length


def _sym_from(v: np.ndarray, n: int) -> np.ndarray:
    S = np.zeros((n, n))
    S[np.triu_indices(n)] = v
    return S + S.T - np.diag(np.diag(S))


def _sym_to(S: np.ndarray) -> np.ndarray:
    return S[np.triu_indices(S.shape[0])]


def _expm_sym(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, V = np.linalg.eigh((S + S.T) / 2)
    return (V * np.exp(w)) @ V.T, (V * np.exp(-w)) @ V.T


def y_displacement(A: np.ndarray, S: np.ndarray, Ainv: np.ndarray | None = None) -> float:
    """``d_y(Z, A^T Z A)`` at ``Z = exp(S)``.

    With ``K = Z^(1/2) A Z^(-1/2)`` the relative spectrum of the pair is that
    of ``K^T K``, so the value is ``2 max(log s_max(K), -log s_min(K))``.
    """
    E, Ei = _expm_sym(S / 2)
    Ainv = np.linalg.inv(A) if Ainv is None else Ainv
    # s_min(K) = 1 / s_max(K^-1); largest singular values carry full relative precision
    return float(2.0 * max(np.log(np.linalg.norm(E @ A @ Ei, 2)), np.log(np.linalg.norm(E @ Ainv @ Ei, 2))))


def spectral_start(A: np.ndarray) -> np.ndarray:
    """``log Z`` for ``Z = (P P^T)^-1`` with ``P`` a real eigenbasis of ``A``.

    In this metric ``A`` is normal, so the displacement there equals the
    spectral lower bound whenever ``A`` is diagonalizable.
    """
    n = A.shape[0]
    w, V = np.linalg.eig(A)
    cols = []
    i = 0
    order = np.argsort(-np.abs(w))
    w, V = w[order], V[:, order]
    used = np.zeros(n, dtype=bool)
    for i in range(n):
        if used[i]:
            continue
        if abs(w[i].imag) > 1e-12 * max(1.0, abs(w[i])):
            j = next((j for j in range(i + 1, n) if not used[j] and abs(w[j] - np.conj(w[i])) < 1e-8 * max(1.0, abs(w[i]))), None)
            cols.extend([V[:, i].real, V[:, i].imag])
            used[i] = True
            if j is not None:
                used[j] = True
        else:
            cols.append(V[:, i].real)
            used[i] = True
    P = np.array(cols[:n]).T
    if P.shape != (n, n) or np.linalg.cond(P) > 1e12:
        return np.zeros((n, n))
    Zinv = P @ P.T
    wz, Vz = np.linalg.eigh((Zinv + Zinv.T) / 2)
    return -(Vz * np.log(wz)) @ Vz.T


@dataclass(frozen=True)
class MinimizeResult:
    value: float
    argmin: np.ndarray
    starts_used: int
    evaluations: int


def _patient_nelder_mead(f, x0, improvement: float, patience: int, maxiter: int):
    """Nelder-Mead stopped once ``patience`` iterations bring less than ``improvement``."""
    state = {"best": np.inf, "stale": 0}

    def callback(intermediate_result):
        fx = intermediate_result.fun
        if fx < state["best"] - improvement:
            state["best"], state["stale"] = fx, 0
        else:
            state["stale"] += 1
            if state["stale"] >= patience:
                raise StopIteration

    return minimize(f, x0, method="Nelder-Mead", callback=callback,
                    options=dict(xatol=1e-12, fatol=1e-14, maxiter=maxiter, adaptive=x0.size > 4))


def minimize_y_displacement(A: np.ndarray, rng: np.random.Generator, starts: int | None = None,
                            stop_at: float | None = None, maxiter: int = 4000) -> MinimizeResult:
    """Multi-start simplex descent of ``S -> y_displacement(A, S)`` over symmetric ``S``.

    Starts: ``S = 0``, the spectral start, then random symmetric matrices.
    If ``stop_at`` is given (a certified lower bound), the search ends as soon
    as a value within ``minimizer_improvement`` of it is found.
    """
    tol = config.TOL
    starts = DEFAULT_STARTS if starts is None else starts
    n = A.shape[0]
    Ainv = np.linalg.inv(A)
    f = lambda v: y_displacement(A, _sym_from(v, n), Ainv)
    candidates = [np.zeros(n * (n + 1) // 2), _sym_to(spectral_start(A))]
    best_val, best_x, nfev = np.inf, candidates[0], 0
    used = 0
    for s in range(starts):
        x0 = candidates[s] if s < len(candidates) else rng.normal(scale=1.0, size=n * (n + 1) // 2)
        r = _patient_nelder_mead(f, x0, tol.minimizer_improvement, tol.minimizer_patience, maxiter)
        used += 1
        nfev += r.nfev
        val = min(r.fun, f(x0))
        if val < best_val:
            best_val, best_x = val, (r.x if r.fun <= f(x0) else x0)
        if stop_at is not None and best_val <= stop_at + tol.minimizer_improvement:
            break
    return MinimizeResult(float(best_val), _sym_from(best_x, n), used, nfev)


@dataclass(frozen=True)
class TranslationLength:
    """Best displacement found and two certified lower bounds.

    ``lower_bound`` is ``(1/n) |log det(A^T A)|``; ``spectral_bound`` is
    ``2 log`` of the spectral radius, which bounds every displacement from
    below since operator norms dominate spectral radii.
    """

    value: float
    lower_bound: float
    spectral_bound: float
    starts_used: int

    @property
    def gap(self) -> float:
        return self.value - self.spectral_bound


def translation_length_matrix(M: np.ndarray, rng: np.random.Generator | None = None,
                              starts: int | None = None, early_stop: bool = True,
                              block: np.ndarray | None = None) -> TranslationLength:
    """``inf_J d_sp(J, M J)`` for proximal ``M``, computed on the parallel set of its axis.

    ``block`` may supply the contracting block ``A`` directly (in any frame
    adapted to the axis); otherwise it is computed from the spectrum of ``M``.
    """
    M = np.asarray(M, dtype=float)
    n = half_dim(M)
    if block is None and np.abs(M - np.eye(2 * n)).max() <= config.TOL.symplectic:
        return TranslationLength(0.0, 0.0, 0.0, 0)
    rng = np.random.default_rng(0) if rng is None else rng
    A = contracting_block(M) if block is None else np.asarray(block, dtype=float)
    lower = abs(np.linalg.slogdet(A.T @ A)[1]) / n
    ev = np.abs(np.linalg.eigvals(A))
    spectral = float(2.0 * max(np.log(ev.max()), -np.log(ev.min())))
    res = minimize_y_displacement(A, rng, starts, stop_at=spectral if early_stop else None)
    if res.value < lower - config.TOL.lower_bound_slack:
        raise MinimizerError(f"minimum {res.value!r} undercuts the determinant bound {lower!r}")
    return TranslationLength(res.value, float(lower), spectral, res.starts_used)


def translation_length_sp(rep: MaximalRep, w: Word, rng: np.random.Generator | None = None,
                          starts: int | None = None, early_stop: bool = True) -> TranslationLength:
    if w.is_trivial():
        return TranslationLength(0.0, 0.0, 0.0, 0)
    block = None
    if has_factored_axes(rep):
        block = exact_axis(rep, w)[1]
    return translation_length_matrix(evaluate(rep, w), rng, starts, early_stop, block)


def translation_length_closed_form(M: np.ndarray) -> float:
    """``2 log`` of the spectral radius of ``M``."""
    return float(2.0 * np.log(np.abs(np.linalg.eigvals(np.asarray(M, dtype=float))).max()))


def _unrestricted_params(n: int) -> int:
    return n * (n + 1)


def unrestricted_displacement(Minv: np.ndarray, v: np.ndarray) -> float:
    """``d_sp(J, M J)`` at ``J = g J0 g^-1``, ``g = exp(X/2)``, ``X = [[a, b], [b, -a]]``.

    ``X`` is symmetric and Hamiltonian, so these ``J`` exhaust the symmetric
    space; the distance is ``|log s_max(K)| + |log s_min(K)|`` for
    ``K = exp(X/2) M^-1 exp(-X/2)``.
    """
    n = Minv.shape[0] // 2
    k = n * (n + 1) // 2
    a, b = _sym_from(v[:k], n), _sym_from(v[k:], n)
    E, Ei = _expm_sym(np.block([[a, b], [b, -a]]) / 2)
    # s_min(K) = 1 / s_max(K^-1) and K^-1 = exp(X/2) M exp(-X/2); both norms are >= 1
    M = sp_inverse(Minv)
    return float(np.log(np.linalg.norm(E @ Minv @ Ei, 2)) + np.log(np.linalg.norm(E @ M @ Ei, 2)))


def unrestricted_point(v: np.ndarray, n: int) -> np.ndarray:
    """The complex structure parameterized by ``v`` in :func:`unrestricted_displacement`."""
    k = n * (n + 1) // 2
    a, b = _sym_from(v[:k], n), _sym_from(v[k:], n)
    E, Ei = _expm_sym(np.block([[a, b], [b, -a]]) / 2)
    return Ei @ (-standard_form(n)) @ E


def minimize_unrestricted(M: np.ndarray, rng: np.random.Generator, starts: int = 8,
                          restarts: int = 3, maxiter: int = 3000) -> MinimizeResult:
    """Displacement of ``M`` minimized over the whole symmetric space.

    Starts from the base point and random points; each start is restarted
    from its own optimum until a restart stops helping.  The search ends
    early once it reaches ``2 log`` of the spectral radius, which no point can
    beat.
    """
    M = np.asarray(M, dtype=float)
    n = half_dim(M)
    Minv = sp_inverse(M)
    floor = translation_length_closed_form(M)
    f = lambda v: unrestricted_displacement(Minv, v)
    tol = config.TOL
    dim = _unrestricted_params(n)
    best_val, best_x, nfev, used = np.inf, np.zeros(dim), 0, 0
    for s in range(starts):
        x = np.zeros(dim) if s == 0 else rng.normal(scale=1.0, size=dim)
        used += 1
        prev = f(x)
        for _ in range(restarts):
            r = minimize(f, x, method="Nelder-Mead",
                         options=dict(xatol=1e-10, fatol=1e-13, maxiter=maxiter, adaptive=True))
            nfev += r.nfev
            if r.fun < best_val:
                best_val, best_x = r.fun, r.x
            if r.fun >= prev - tol.minimizer_improvement or r.fun <= floor + tol.minimizer_improvement:
                break
            x, prev = r.x, r.fun
        if best_val <= floor + tol.minimizer_improvement:
            break
    return MinimizeResult(float(best_val), best_x, used, nfev)

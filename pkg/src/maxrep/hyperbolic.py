"""Hyperbolic plane, hyperbolizations and translation lengths.

The upper half-plane model is used throughout: interior points are complex
numbers with positive imaginary part, boundary points are floats with
``math.inf`` standing for the point at infinity, and isometries are 2x2 real
matrices of determinant one acting by Moebius transformations.

Cyclic orientation of boundary triples follows the convention under which the
boundary map ``x -> span(x, 1)`` sends positively oriented triples to maximal
Lagrangian triples: ``(0, x, inf)`` is positive exactly when ``x < 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, NamedTuple

import numpy as np

from maxrep import config, tables
from maxrep.surface_group import Word, WordError, generators, relator

INF = math.inf


class NotHyperbolic(ValueError):
    pass


class HyperbolizationError(ValueError):
    pass


def as_sl2(M, tol: float | None = None) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {M.shape}")
    tol = config.TOL.sl2_det if tol is None else tol
    # the determinant of a product carries roundoff of order |M|^2
    if abs(np.linalg.det(M) - 1.0) > tol * max(1.0, np.abs(M).max() ** 2):
        raise ValueError(f"matrix is not unimodular (det = {np.linalg.det(M)!r})")
    return M


def _check_interior(z: complex):
    if not (np.isfinite(z) and z.imag > 0):
        raise ValueError(f"{z!r} is not in the open upper half-plane")


def disk_distance(p: complex, q: complex) -> float:
    """Hyperbolic distance between two points of the upper half-plane."""
    p, q = complex(p), complex(q)
    _check_interior(p)
    _check_interior(q)
    arg = 1.0 + abs(p - q) ** 2 / (2.0 * p.imag * q.imag)
    return float(np.arccosh(max(arg, 1.0)))


def mobius(M, z: complex) -> complex:
    a, b, c, d = np.asarray(M, dtype=float).ravel()
    return (a * z + b) / (c * z + d)


def act_boundary(M, x: float) -> float:
    """Moebius action on the boundary ``R u {inf}``."""
    a, b, c, d = np.asarray(M, dtype=float).ravel()
    if math.isinf(x):
        return INF if c == 0 else a / c
    den = c * x + d
    if den == 0:
        return INF
    return (a * x + b) / den


def translation_length_h(M) -> float:
    """``inf_p d(p, M p)``: ``2 arcosh(|tr M| / 2)`` for hyperbolic ``M``, else 0."""
    M = as_sl2(M)
    t = abs(np.trace(M))
    if t <= 2.0:
        return 0.0
    return float(2.0 * np.arccosh(t / 2.0))


def is_hyperbolic(M, margin: float | None = None) -> bool:
    margin = config.TOL.hyperbolic_margin if margin is None else margin
    return abs(np.trace(np.asarray(M, dtype=float))) > 2.0 + margin


def fixed_points(M) -> tuple[float, float]:
    """``(repelling, attracting)`` boundary fixed points of a hyperbolic ``M``."""
    M = as_sl2(M)
    if not is_hyperbolic(M):
        raise NotHyperbolic(f"trace {np.trace(M)!r} is not hyperbolic")
    a, b, c, d = M.ravel()
    if c == 0:
        finite = float(b / (d - a)) + 0.0
        # z -> (a/d) z + b/d expands at infinity when |a| > |d|
        return (finite, INF) if abs(a) > abs(d) else (INF, finite)
    disc = math.sqrt((a + d) ** 2 - 4.0)
    roots = [((a - d) + disc) / (2 * c), ((a - d) - disc) / (2 * c)]
    # derivative of the Moebius map at a fixed point x is (c x + d)^-2
    roots.sort(key=lambda x: abs(c * x + d))
    return float(roots[0]) + 0.0, float(roots[1]) + 0.0


def frame_matrix(x_minus: float, x_plus: float) -> np.ndarray:
    """SL(2,R) matrix sending 0 -> x_minus and inf -> x_plus."""
    v_plus = np.array([1.0, 0.0]) if math.isinf(x_plus) else np.array([x_plus, 1.0])
    v_minus = np.array([1.0, 0.0]) if math.isinf(x_minus) else np.array([x_minus, 1.0])
    S = np.column_stack([v_plus, v_minus])
    det = np.linalg.det(S)
    if det == 0:
        raise ValueError("boundary points coincide")
    if det < 0:
        S[:, 1] *= -1
        det = -det
    return S / math.sqrt(det)


def is_positively_oriented(x: float, y: float, z: float) -> bool:
    """Cyclic orientation of three distinct boundary points."""
    if len({x, y, z}) < 3:
        return False
    S = frame_matrix(x, z)
    y_norm = act_boundary(np.linalg.inv(S), y)
    return y_norm < 0


class TangentTriple(NamedTuple):
    minus: float
    zero: float
    plus: float

    def validate(self) -> "TangentTriple":
        if not is_positively_oriented(*self):
            raise ValueError(f"triple {tuple(self)} is not positively oriented")
        return self

    def moved_by(self, M) -> "TangentTriple":
        return TangentTriple(*(act_boundary(M, x) for x in self))


def axis_tangent_triple(M, base_point: complex = 1j) -> TangentTriple:
    """Unit tangent vector to the axis of ``M`` as a boundary triple.

    The foot point on the axis is the projection of ``base_point``; the middle
    entry is the endpoint of the perpendicular geodesic through that point on
    the side that makes the triple positively oriented.
    """
    x_minus, x_plus = fixed_points(M)
    S = frame_matrix(x_minus, x_plus)
    # in normalized coordinates the axis is the imaginary half-line
    s = abs(mobius(np.linalg.inv(S), complex(base_point)))
    x0 = float(act_boundary(S, -s)) + 0.0
    return TangentTriple(x_minus, x0, x_plus).validate()


def axis_point(M, base_point: complex = 1j) -> complex:
    """Projection of ``base_point`` to the axis of ``M``."""
    x_minus, x_plus = fixed_points(M)
    S = frame_matrix(x_minus, x_plus)
    s = abs(mobius(np.linalg.inv(S), complex(base_point)))
    return mobius(S, 1j * s)


@dataclass(frozen=True)
class Hyperbolization:
    """Generator images in SL(2,R) of a discrete faithful surface group action."""

    images: Mapping[int, np.ndarray]
    genus: int
    name: str = ""

    def __post_init__(self):
        gens = generators(self.genus)
        if sorted(self.images) != gens:
            raise HyperbolizationError(f"images must be given for generators {gens}")
        for g in gens:
            as_sl2(self.images[g])

    def validate(self) -> "Hyperbolization":
        tol = config.TOL
        R = evaluate_h(self, relator(self.genus))
        resid = min(np.abs(R - np.eye(2)).max(), np.abs(R + np.eye(2)).max())
        if resid > tol.relator_h:
            raise HyperbolizationError(f"relator residual {resid:.3e} exceeds {tol.relator_h:g}")
        for g, M in self.images.items():
            if not is_hyperbolic(M):
                raise HyperbolizationError(f"generator {g} is not hyperbolic (trace {np.trace(M)!r})")
        return self

    def relator_residual(self) -> float:
        R = evaluate_h(self, relator(self.genus))
        return float(min(np.abs(R - np.eye(2)).max(), np.abs(R + np.eye(2)).max()))

    def __call__(self, w: Word) -> np.ndarray:
        return evaluate_h(self, w)

    def translation_length(self, w: Word) -> float:
        return translation_length_h(evaluate_h(self, w))

    def to_table(self) -> str:
        entries = {tables.index_to_label(g): tables.format_matrix(self.images[g]) for g in generators(self.genus)}
        meta = {"genus": str(self.genus), "kind": "hyperbolization"}
        if self.name:
            meta["name"] = self.name
        return tables.format_table(entries, meta)


def evaluate_h(h: Hyperbolization, w: Word) -> np.ndarray:
    if w.genus != h.genus:
        raise WordError(f"word genus {w.genus} does not match hyperbolization genus {h.genus}")
    out = np.eye(2)
    for x in w.letters:
        M = h.images[abs(x)]
        if x < 0:
            a, b, c, d = M.ravel()
            M = np.array([[d, -b], [-c, a]])
        out = out @ M
    return out


def _rotation(theta: float) -> np.ndarray:
    """Rotation about ``i`` by angle ``theta`` (counterclockwise)."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, s], [-s, c]])


def octagon_hyperbolization() -> Hyperbolization:
    """Genus-2 Fuchsian group of the regular octagon with angles pi/4.

    The octagon is centred at ``i`` with side ``j`` facing direction
    ``j pi/4``.  Its inradius ``d`` satisfies ``cosh d = cot(pi/8)``.  The
    isometry carrying side ``j`` onto side ``k`` (with the octagon landing on
    the far side of ``k``) is ``R(k pi/4) T R(pi) R(-j pi/4)`` where ``T``
    translates by ``2d`` along the geodesic through ``i``.  Sides are paired
    ``0<->2, 1<->3, 4<->6, 5<->7``, matching the pattern of the commutator
    relator.
    """
    d = math.acosh(1.0 / math.tan(math.pi / 8))
    T = np.diag([math.exp(d), math.exp(-d)])

    def pairing(j: int, k: int) -> np.ndarray:
        return _rotation(k * math.pi / 4) @ T @ _rotation(math.pi) @ _rotation(-j * math.pi / 4)

    def inv(M):
        a, b, c, d_ = M.ravel()
        return np.array([[d_, -b], [-c, a]])

    images = {
        1: inv(pairing(0, 2)),
        2: pairing(1, 3),
        3: inv(pairing(4, 6)),
        4: pairing(5, 7),
    }
    return Hyperbolization(images, 2, name="octagon").validate()


def load_hyperbolization(path: str | Path) -> Hyperbolization:
    table = tables.read_table(path)
    genus = int(table.meta["genus"])
    images = {tables.label_to_index(k): tables.parse_matrix(v, 2) for k, v in table.entries.items()}
    return Hyperbolization(images, genus, name=table.meta.get("name", Path(path).stem)).validate()

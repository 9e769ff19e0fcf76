"""Experiments comparing translation lengths of maximal representations with
hyperbolic lengths, and probes of length growth along mapping class orbits.

Every random choice flows from an integer seed: task ``i`` of stream ``s``
uses ``numpy.random.default_rng([seed, s, i])``, so results do not depend on
how tasks are spread over worker processes.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from maxrep import config
from maxrep.hyperbolic import (
    INF,
    Hyperbolization,
    TangentTriple,
    axis_tangent_triple,
    is_hyperbolic,
    translation_length_h,
)
from maxrep.max_reps import (
    MaximalRep,
    boundary_map,
    exact_axis,
    j_of_u,
    minimize_unrestricted,
    translation_length_sp,
)
from maxrep.surface_group import Automorphism, CurveSystem, Word, WordError
from maxrep.symplectic import (
    check_causal_bound,
    congruence_extremes,
    d_y_moved,
    push_J,
    random_causal_curve,
    y_project,
)

# stream identifiers for derived seeds
STREAM_WORDS, STREAM_CONE, STREAM_EQUIV, STREAM_CAUSAL, STREAM_ATTAIN, STREAM_TRLEN = range(6)

EQUIVARIANCE_CASES = 100


def task_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), stream, index])


def parallel_map(fn: Callable, tasks: Sequence, workers: int = 1) -> list:
    """``[fn(t) for t in tasks]``, optionally across processes; order is preserved."""
    if workers <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


# ------------------------------------------------------------------- sampling


def random_cyclic_word(genus: int, length: int, rng: np.random.Generator) -> Word:
    """Uniform random cyclically reduced word of the given length."""
    letters: list[int] = []
    gens = 2 * genus
    while len(letters) < length:
        x = int(rng.integers(1, gens + 1)) * (1 if rng.integers(2) else -1)
        if letters and letters[-1] == -x:
            continue
        if len(letters) == length - 1 and length > 1 and letters[0] == -x:
            continue
        letters.append(x)
    return Word(tuple(letters), genus)


def _trace_key(t: float) -> str:
    return f"{abs(t):.10g}"


def sample_words(h: Hyperbolization, count: int, max_length: int = 8, seed: int = 0,
                 max_attempts: int | None = None) -> list[Word]:
    """Random hyperbolic words with pairwise distinct ``|tr h(w)|``.

    Conjugate words have equal traces, so this keeps at most one word per
    conjugacy class.  Sampling is sequential: a larger ``count`` with the same
    seed returns a superset.
    """
    rng = task_rng(seed, STREAM_WORDS, 0)
    margin = config.TOL.hyperbolic_margin
    seen: set[str] = set()
    out: list[Word] = []
    attempts = 0
    max_attempts = 1000 * count if max_attempts is None else max_attempts
    while len(out) < count and attempts < max_attempts:
        attempts += 1
        length = int(rng.integers(1, max_length + 1))
        w = random_cyclic_word(h.genus, length, rng)
        M = h(w)
        if not is_hyperbolic(M, margin):
            continue
        key = _trace_key(np.trace(M))
        if key in seen:
            continue
        seen.add(key)
        out.append(w)
    return out


# -------------------------------------------------------------- length vectors


@dataclass(frozen=True)
class LengthVector:
    values: tuple[float, ...]
    labels: tuple[str, ...]
    source: str

    def __post_init__(self):
        if not all(math.isfinite(v) and v >= 0 for v in self.values):
            raise ValueError("length vector entries must be finite and nonnegative")

    @property
    def total(self) -> float:
        return float(sum(self.values))


def word_length(source: Hyperbolization | MaximalRep, w: Word, seed: int = 0, index: int = 0) -> float:
    if isinstance(source, Hyperbolization):
        return translation_length_h(source(w))
    return translation_length_sp(source, w, task_rng(seed, STREAM_TRLEN, index)).value


def length_vector(source: Hyperbolization | MaximalRep, system: CurveSystem, seed: int = 0) -> LengthVector:
    if source.genus != system.genus:
        raise WordError("genus mismatch between source and curve system")
    vals = tuple(word_length(source, w, seed, i) for i, w in enumerate(system.words))
    kind = "hyperbolization" if isinstance(source, Hyperbolization) else "representation"
    return LengthVector(vals, system.labels, f"{kind}:{getattr(source, 'name', '')}")


# ---------------------------------------------------------------- comparisons


@dataclass(frozen=True)
class ComparisonRecord:
    word: str
    tr_h: float
    tr_rho: float
    d_J: float


def _compare_task(args) -> ComparisonRecord:
    rep, h, w, seed, index = args
    tr_rho = translation_length_sp(rep, w, task_rng(seed, STREAM_TRLEN, index)).value
    phi = boundary_map(rep)
    u = axis_tangent_triple(h(w))
    d_J = _axis_displacement(rep, phi, u, w)
    return ComparisonRecord(str(w), translation_length_h(h(w)), tr_rho, d_J)


def axis_forms(rep: MaximalRep, phi, u: TangentTriple, w: Word) -> tuple[np.ndarray, np.ndarray]:
    """``(Z, A)``: the form of ``J(u)`` and the block of ``rho(w)`` on ``phi(u-)``.

    ``u`` must lie on the axis of ``h(w)``.  Both are expressed in the exact
    axis frame, in which moving ``J(u)`` by ``rho(w)`` sends ``Z`` to
    ``A^-T Z A^-1``.
    """
    frame, A = exact_axis(rep, w)
    Z = y_project(j_of_u(rep, phi, u), frame, tol=1e-7)
    return Z, A


def _axis_displacement(rep, phi, u: TangentTriple, w: Word) -> float:
    """``d_sp(J(u), rho(w) J(u))`` computed in the parallel set of the axis."""
    Z, A = axis_forms(rep, phi, u, w)
    return d_y_moved(Z, np.linalg.inv(A), A)


def compare_words(rep: MaximalRep, h: Hyperbolization, words: Sequence[Word], seed: int = 0,
                  workers: int = 1) -> list[ComparisonRecord]:
    tasks = [(rep, h, w, seed, i) for i, w in enumerate(words)]
    return parallel_map(_compare_task, tasks, workers)


@dataclass(frozen=True)
class UpperLipschitz:
    L: float
    B0: float
    generator_estimate: float
    samples: int


def displacement_at_base(g: np.ndarray) -> float:
    """``d_sp(J0, g J0)``: ``|log s_max(g)| + |log s_min(g)|``."""
    s = np.linalg.svd(np.asarray(g, dtype=float), compute_uv=False)
    return float(abs(np.log(s[0])) + abs(np.log(s[-1])))


def upper_lipschitz(rep: MaximalRep, h: Hyperbolization, words: Sequence[Word] | None = None,
                    seed: int = 0) -> UpperLipschitz:
    """Smallest ``L`` with ``tr_rho(w) <= L tr_h(w)`` on the sample, and a generator estimate.

    ``generator_estimate`` is ``max_s d_sp(J0, rho(s) J0) / min_s tr_h(s)``,
    the crude constant obtained from moving the base point by generators.
    """
    if words is None:
        words = sample_words(h, 50, 8, seed)
    gens = [Word.generator(s, h.genus) for s in range(1, 2 * h.genus + 1)]
    gen_est = max(displacement_at_base(rep(g)) for g in gens) / min(translation_length_h(h(g)) for g in gens)
    pairs = [(translation_length_h(h(w)), translation_length_sp(rep, w, task_rng(seed, STREAM_TRLEN, i)).value)
             for i, w in enumerate(words)]
    L = max((y / x for x, y in pairs), default=0.0)
    B0 = max((max(0.0, y - L * x) for x, y in pairs), default=0.0)
    return UpperLipschitz(float(L), float(B0), float(gen_est), len(pairs))


@dataclass(frozen=True)
class QIEstimate:
    A: float
    B: float
    samples: int
    max_lower_violation: float
    max_upper_violation: float
    skipped: int = 0
    ratio_min: float = math.nan
    ratio_max: float = math.nan
    records: tuple[ComparisonRecord, ...] = field(default=(), repr=False)


def fit_qi(pairs: Iterable[tuple[float, float]]) -> tuple[float, float]:
    """``A = max(1, y/x, x/y)`` over the sample, then the least ``B >= 0`` that still works.

    Fitting ``A`` first makes ``B`` absorb only rounding, and both constants
    are maxima over the sample, hence monotone in it.
    """
    pairs = list(pairs)
    A = max([1.0] + [max(y / x, x / y) for x, y in pairs if x > 0 and y > 0])
    B = max([0.0] + [max(x / A - y, y - A * x) for x, y in pairs])
    return float(A), float(B)


def qi_estimate(rep: MaximalRep, h: Hyperbolization, word_budget: int = 50, max_length: int = 8,
                seed: int = 0, workers: int = 1) -> QIEstimate:
    """Fit ``A^-1 tr_h - B <= tr_rho <= A tr_h + B`` on sampled words.

    Also reports the extremes of ``d_D(p, gamma p) / d_sp(J(u), rho(gamma) J(u))``
    for ``u`` the unit tangent vector at the point ``p`` of the axis.
    """
    boundary_map(rep)  # the comparison needs J(u); unsupported constructions fail here
    words = sample_words(h, word_budget, max_length, seed)
    records, skipped = [], 0
    for rec in compare_words(rep, h, words, seed, workers):
        if rec is None:
            skipped += 1
        else:
            records.append(rec)
    pairs = [(r.tr_h, r.tr_rho) for r in records]
    A, B = fit_qi(pairs)
    lower = max((x / A - B - y for x, y in pairs), default=0.0)
    upper = max((y - A * x - B for x, y in pairs), default=0.0)
    ratios = [r.tr_h / r.d_J for r in records if r.d_J > 0]
    return QIEstimate(A, B, len(records), float(lower), float(upper), skipped,
                      float(min(ratios, default=math.nan)), float(max(ratios, default=math.nan)), tuple(records))


# --------------------------------------------------------------- orbit probes


@dataclass(frozen=True)
class OrbitProbe:
    label: str
    ks: tuple[int, ...]
    sums: tuple[float, ...]
    per_curve: tuple[tuple[float, ...], ...]
    curve_labels: tuple[str, ...]
    k0: int | None
    doubled: bool

    def __post_init__(self):
        if any(s < 0 for s in self.sums):
            raise ValueError("orbit sums must be nonnegative")

    @property
    def eventually_increasing(self) -> bool:
        return self.k0 is not None

    @property
    def diverges(self) -> bool:
        return self.eventually_increasing and self.doubled


def _increasing_from(sums: Sequence[float]) -> int | None:
    """Smallest ``k`` with ``sums[k:]`` strictly increasing and at least two long."""
    k = len(sums) - 1
    while k > 0 and sums[k - 1] < sums[k]:
        k -= 1
    return k if k < len(sums) - 1 else None


def orbit_probe(source: Hyperbolization | MaximalRep, psi: Automorphism, system: CurveSystem,
                k_max: int = 10, seed: int = 0, workers: int = 1) -> OrbitProbe:
    """Lengths of ``psi^-k(gamma_i)`` for ``k = 0..k_max``.

    These are the lengths of the curves for the representation moved by
    ``psi^k`` (``gamma -> rho(psi^-k gamma)``).  Words are produced by
    iterating the inverse automorphism; a word beyond the length guard aborts
    with :class:`~maxrep.surface_group.WordGrowthError`.
    """
    if psi.genus != system.genus:
        raise WordError("genus mismatch between automorphism and curve system")
    inv = psi.inverse()
    current = list(system.words)
    tasks = []
    for k in range(k_max + 1):
        for i, w in enumerate(current):
            tasks.append((source, w, seed, k * len(current) + i))
        if k < k_max:
            current = [inv(w) for w in current]
    values = parallel_map(_length_task, tasks, workers)
    m = len(system.words)
    per_curve = tuple(tuple(values[k * m:(k + 1) * m]) for k in range(k_max + 1))
    sums = tuple(float(sum(row)) for row in per_curve)
    return OrbitProbe(psi.label or "psi", tuple(range(k_max + 1)), sums, per_curve, system.labels,
                      _increasing_from(sums), sums[-1] >= 2 * sums[0])


def _length_task(args) -> float:
    source, w, seed, index = args
    return word_length(source, w, seed, index)


# ---------------------------------------------------------------- lemma suite


def _random_base_point(rng: np.random.Generator) -> complex:
    return complex(rng.normal(scale=0.5), math.exp(rng.normal(scale=0.5)))


def _cone_task(args) -> dict:
    """Cone and monotonicity checks for one word and one unit tangent vector on its axis.

    With ``A`` the block of ``rho(gamma)`` on ``phi(u-)``, moving ``J(u)`` by
    ``rho(gamma)^i`` sends the form ``Z`` to ``Z_i = A^-iT Z A^-i``.  The cone
    condition is ``lambda_min(Z^-1 Z_1) > 1``; growth is checked on the extreme
    eigenvalues of ``Z^-1 Z_i`` (the whole spectrum when ``n = 2``), which are
    computed without forming ``Z_i``.
    """
    rep, h, w, seed, index, steps = args
    rng = task_rng(seed, STREAM_CONE, index)
    phi = boundary_map(rep)
    u = axis_tangent_triple(h(w), _random_base_point(rng))
    Z, A = axis_forms(rep, phi, u, w)
    Ai = np.linalg.inv(A)
    lows, highs = [1.0], [1.0]
    for i in range(1, steps + 1):
        lo, hi = congruence_extremes(Z, np.linalg.matrix_power(Ai, i), np.linalg.matrix_power(A, i))
        lows.append(lo)
        highs.append(hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        growth = np.concatenate([np.diff(np.log(lows)), np.diff(np.log(highs))])
    log_margin = float(np.log(lows[1]))
    monotone_margin = float(np.nanmin(growth)) if np.all(np.isfinite(growth)) else -math.inf
    cone_ok = log_margin > 0 and lows[1] - 1.0 > config.TOL.cone_margin
    mono_ok = monotone_margin > 0
    return {
        "word": str(w),
        "triple": list(u),
        "cone_margin": float(lows[1] - 1.0),
        "log_margin": log_margin,
        "monotone_margin": monotone_margin,
        "cone_pass": bool(cone_ok),
        "monotone_pass": bool(mono_ok),
        "reproducer": None if cone_ok and mono_ok else {
            "seed": seed, "index": index, "word": str(w), "triple": list(u),
            "Z": Z.tolist(), "A": A.tolist()},
    }


def _random_positive_triple(rng: np.random.Generator, spread: float = 0.3) -> TangentTriple:
    """A random unit tangent vector near ``i``: the standard triple at ``i``
    moved by a random rotation about ``i`` and a transvection of length ``~ spread``."""
    theta = rng.uniform(0.0, math.pi)
    t = rng.normal(scale=spread)
    c, s = math.cos(theta), math.sin(theta)
    g = np.array([[c, -s], [s, c]]) @ np.diag([math.exp(t / 2), math.exp(-t / 2)])
    # (0, x, inf) is positively oriented exactly when x < 0
    return TangentTriple(0.0, -1.0, INF).moved_by(g).validate()


def _sl2_sqrt(M: np.ndarray) -> np.ndarray:
    """Square root of a hyperbolic element of PSL(2, R) (trace made positive first)."""
    M = np.asarray(M, dtype=float)
    if np.trace(M) < 0:
        M = -M
    return (M + np.eye(2)) / math.sqrt(np.trace(M) + 2.0)


def _equivariance_task(args) -> dict:
    """``J(gamma u) = rho(gamma) J(u)`` for a random triple centred on the axis of ``gamma``.

    A generic triple is squeezed onto the attracting fixed point by ``gamma``,
    and the Lagrangians of a squeezed triple are nearly coincident.  Taking
    ``u = gamma^-1/2 u0`` with ``u0`` near ``i`` keeps both ``u`` and
    ``gamma u = gamma^1/2 u0`` half a translation away from ``u0``.  Rounding
    in ``M J M^-1`` is bounded by ``eps |M| |J| |M^-1|``, which is the scale
    the residual is measured on; the plain relative residual is reported too.
    """
    rep, h, w, seed, index = args
    rng = task_rng(seed, STREAM_EQUIV, index)
    phi = boundary_map(rep)
    u = _random_positive_triple(rng).moved_by(np.linalg.inv(_sl2_sqrt(h(w))))
    M = rep(w)
    Ju = j_of_u(rep, phi, u)
    lhs = j_of_u(rep, phi, u.moved_by(h(w)))
    rhs = push_J(M, Ju)
    diff = float(np.abs(lhs - rhs).max())
    scale = float(np.abs(M).max() * np.abs(Ju).max() * np.abs(np.linalg.inv(M)).max())
    resid = diff / max(1.0, scale)
    return {"word": str(w), "triple": list(u), "residual": resid,
            "plain_residual": diff / max(1.0, float(np.abs(rhs).max())), "pass": resid <= 1e-7}


def _causal_task(args) -> dict:
    seed, index, n, max_samples = args
    curve = random_causal_curve(n, task_rng(seed, STREAM_CAUSAL, index), max_samples)
    out = {}
    for metric in ("d_y", "d_proof"):
        r = check_causal_bound(curve, metric)
        out[metric] = {"length": r.length, "bound": r.bound, "margin": r.margin, "pass": r.passed}
    return out


def _attainment_task(args) -> dict:
    rep, w, seed, index = args
    M = rep(w)
    y = translation_length_sp(rep, w, task_rng(seed, STREAM_TRLEN, index)).value
    x = minimize_unrestricted(M, task_rng(seed, STREAM_ATTAIN, index)).value
    return {"word": str(w), "y_min": y, "x_min": x, "gap": abs(x - y), "pass": abs(x - y) <= 1e-3}


def causal_suite(count: int, n: int = 3, max_samples: int = 16, seed: int = 0, workers: int = 1) -> dict:
    results = parallel_map(_causal_task, [(seed, i, n, max_samples) for i in range(count)], workers)
    report = {"count": count, "n": n}
    for metric in ("d_y", "d_proof"):
        margins = [r[metric]["margin"] for r in results]
        report[metric] = {"passed": sum(r[metric]["pass"] for r in results),
                          "worst_margin": float(min(margins))}
    report["pass"] = all(report[m]["passed"] == count for m in ("d_y", "d_proof"))
    return report


def cone_suite(rep: MaximalRep, h: Hyperbolization, words: Sequence[Word], seed: int = 0,
               steps: int = 8, workers: int = 1) -> dict:
    results = parallel_map(_cone_task, [(rep, h, w, seed, i, steps) for i, w in enumerate(words)], workers)
    return {
        "count": len(results),
        "cone_passed": sum(r["cone_pass"] for r in results),
        "monotone_passed": sum(r["monotone_pass"] for r in results),
        "worst_cone_margin": float(min(r["cone_margin"] for r in results)),
        "worst_log_margin": float(min(r["log_margin"] for r in results)),
        "worst_monotone_margin": float(min(r["monotone_margin"] for r in results)),
        "failures": [r["reproducer"] for r in results if r["reproducer"] is not None],
        "pass": all(r["cone_pass"] and r["monotone_pass"] for r in results),
    }


def attainment_suite(rep: MaximalRep, words: Sequence[Word], seed: int = 0, workers: int = 1) -> dict:
    results = parallel_map(_attainment_task, [(rep, w, seed, i) for i, w in enumerate(words)], workers)
    return {
        "count": len(results),
        "passed": sum(r["pass"] for r in results),
        "worst_gap": float(max(r["gap"] for r in results)),
        "records": results,
        "pass": all(r["pass"] for r in results),
    }


def lemma_suite(rep: MaximalRep, h: Hyperbolization, sample_size: int | None = None,
                seed: int = 0, sampling: config.Sampling | None = None, workers: int | None = None) -> dict:
    """Run every comparison check on one representation and collect a report.

    Sub-suites: cone membership and monotone growth along axes, equivariance
    of ``J``, the displacement comparison with fitted ``B''``, the causal
    length bound under both metric conventions, and attainment of the
    translation length on the parallel set.  Failures are data: they are
    counted and come with reproducers, never raised.
    """
    sampling = config.Sampling() if sampling is None else sampling
    sample_size = sampling.lemma_samples if sample_size is None else sample_size
    workers = sampling.workers if workers is None else workers
    boundary_map(rep)
    words = sample_words(h, sample_size, sampling.max_word_length, seed)
    report: dict = {"seed": seed, "n": rep.n, "representation": rep.name, "samples": len(words)}

    report["cone"] = cone_suite(rep, h, words, seed, 8, workers)

    short = [w for w in words if len(w) <= 3] or words
    eq = parallel_map(_equivariance_task,
                      [(rep, h, short[i % len(short)], seed, i) for i in range(EQUIVARIANCE_CASES)], workers)
    report["equivariance"] = {"count": len(eq), "words": len(short), "passed": sum(r["pass"] for r in eq),
                              "worst_residual": float(max((r["residual"] for r in eq), default=0.0)),
                              "worst_plain_residual": float(max((r["plain_residual"] for r in eq), default=0.0)),
                              "pass": all(r["pass"] for r in eq)}

    comps = compare_words(rep, h, words, seed, workers)
    excess = [c.d_J - rep.n * c.tr_rho for c in comps]
    B2 = max(0.0, max(excess, default=0.0) / 2)
    ratios = [c.tr_h / c.d_J for c in comps if c.d_J > 0]
    report["displacement"] = {
        "A_double_prime": rep.n,
        "B_double_prime_fit": float(B2),
        "max_excess": float(max(excess, default=0.0)),
        "A_prime_ratio_min": float(min(ratios, default=math.nan)),
        "A_prime_ratio_max": float(max(ratios, default=math.nan)),
        "pass": True,
    }

    report["causal"] = causal_suite(sampling.lemma_samples, sampling.causal_n, sampling.causal_max_samples,
                                    seed, workers)
    report["attainment"] = attainment_suite(rep, words[:sampling.attainment_words], seed, workers)
    keys = ("cone", "equivariance", "displacement", "causal", "attainment")
    report["checks_passed"] = sum(bool(report[k]["pass"]) for k in keys)
    report["checks_total"] = len(keys)
    report["pass"] = report["checks_passed"] == len(keys)
    return report


# -------------------------------------------------------------------- writers


def write_orbit_csv(probe: OrbitProbe, path: str | Path) -> None:
    """Columns: ``k``, ``sum``, then one column per curve (lengths in hyperbolic units)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "sum", *probe.curve_labels])
        for k, s, row in zip(probe.ks, probe.sums, probe.per_curve):
            writer.writerow([k, repr(s), *(repr(v) for v in row)])


def write_qi_csv(est: QIEstimate, path: str | Path) -> None:
    """Columns: ``word``, ``tr_h``, ``tr_rho``, ``d_J``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "tr_h", "tr_rho", "d_J"])
        for r in est.records:
            writer.writerow([r.word, repr(r.tr_h), repr(r.tr_rho), repr(r.d_J)])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(data, path: str | Path) -> None:
    Path(path).write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")


def qi_summary(est: QIEstimate) -> dict:
    d = asdict(est)
    d.pop("records")
    return d

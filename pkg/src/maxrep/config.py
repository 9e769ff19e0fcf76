"""Tolerances and run configuration.

All numerical thresholds used across the package live in one
:class:`Tolerances` record.  Functions read the module-level ``TOL`` at call
time, so a configuration file loaded by the command line front end changes
them everywhere at once.

Configuration files are INI-style with four sections::

    [tolerances]
    symplectic = 1e-9
    relator_rep = 1e-7

    [sampling]
    seed = 7
    word_count = 50
    max_word_length = 8

    [curves]
    file = path/to/curves.txt        ; optional user curve system

    [twists]
    a1 = builtin                     ; or a path to a table file

Unknown keys are rejected.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path


@dataclass(frozen=True)
class Tolerances:
    # SL(2,R) and hyperbolizations
    sl2_det: float = 1e-9
    hyperbolic_margin: float = 1e-9
    relator_h: float = 1e-8
    # Sp(2n,R) and its symmetric space
    symplectic: float = 1e-9
    complex_structure: float = 1e-9
    posdef_min: float = 1e-12
    isotropy: float = 1e-9
    rank_min: float = 1e-10
    transverse: float = 1e-8
    same_lagrangian: float = 1e-8
    y_block: float = 1e-8
    cone_margin: float = 1e-12
    # representations
    relator_rep: float = 1e-7
    proximal_margin: float = 1e-6
    winding_integral: float = 1e-3
    # translation length minimizer
    minimizer_improvement: float = 1e-9
    minimizer_patience: int = 50
    lower_bound_slack: float = 1e-6


@dataclass(frozen=True)
class Sampling:
    seed: int = 0
    word_count: int = 50
    max_word_length: int = 8
    lemma_samples: int = 200
    attainment_words: int = 20
    causal_curves: int = 1000
    causal_n: int = 3
    causal_max_samples: int = 16
    minimizer_starts: int = 20
    k_max: int = 10
    workers: int = 1


@dataclass(frozen=True)
class Config:
    tolerances: Tolerances = field(default_factory=Tolerances)
    sampling: Sampling = field(default_factory=Sampling)
    curves: dict = field(default_factory=dict)
    twists: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


TOL = Tolerances()


def set_tolerances(tol: Tolerances) -> None:
    """Install ``tol`` as the process-wide tolerance record."""
    global TOL
    TOL = tol


def get_tolerances() -> Tolerances:
    return TOL


class ConfigError(ValueError):
    pass


def _coerce(record_type, section: dict, name: str):
    known = {f.name: f for f in fields(record_type)}
    values = {}
    for key, raw in section.items():
        if key not in known:
            raise ConfigError(f"unknown key {key!r} in [{name}]")
        ftype = int if isinstance(getattr(record_type(), key), int) else float
        try:
            values[key] = ftype(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {name}.{key}: {raw!r}") from exc
    return record_type(**values)


def load_config(path: str | Path | None = None) -> Config:
    """Read an INI configuration file; ``None`` gives the defaults."""
    if path is None:
        return Config()
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    allowed = {"tolerances", "sampling", "curves", "twists"}
    extra = set(parser.sections()) - allowed
    if extra:
        raise ConfigError(f"unknown config sections: {sorted(extra)}")
    tol = _coerce(Tolerances, dict(parser["tolerances"]) if parser.has_section("tolerances") else {}, "tolerances")
    samp = _coerce(Sampling, dict(parser["sampling"]) if parser.has_section("sampling") else {}, "sampling")
    curves = dict(parser["curves"]) if parser.has_section("curves") else {}
    twists = dict(parser["twists"]) if parser.has_section("twists") else {}
    return Config(tolerances=tol, sampling=samp, curves=curves, twists=twists)

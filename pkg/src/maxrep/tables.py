"""Plain-text table format.

Automorphisms, curve systems, hyperbolizations and representations are all
stored as small line-oriented tables::

    # comment lines and blank lines are ignored
    @construction: diagonal          metadata, one ``@key: value`` per line
    a1: a1                           one entry per line, ``key: value``
    b1: b1,a1

For words the value is a comma-separated list of signed generator labels.
A label is ``a<i>`` or ``b<i>`` with ``1 <= i <= genus``; the inverse is
written ``-a1`` (``a1^-1`` is accepted on input).  The empty word is written
``e`` or left blank.

For matrices the value is the row-major list of entries separated by commas,
``a1: m11,m12,m21,m22`` for a 2x2 matrix and ``4 n^2`` entries for a
``2n x 2n`` matrix.

Grammar::

    table    := { line }
    line     := blank | comment | meta | entry
    comment  := "#" any*
    meta     := "@" key ":" any*
    entry    := key ":" value
    key      := [A-Za-z0-9_()']+
    word     := "e" | "" | label { "," label }
    label    := ["-"] ("a" | "b") int [ "^-1" ]
    matrix   := float { "," float }
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

_KEY = re.compile(r"^[A-Za-z0-9_()']+$")
_LABEL = re.compile(r"^(-?)([ab])(\d+)(\^-1)?$")


class TableError(ValueError):
    pass


@dataclass
class Table:
    entries: dict[str, str] = field(default_factory=dict)
    meta: dict[str, str] = field(default_factory=dict)


def parse_table(text: str) -> Table:
    table = Table()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        is_meta = line.startswith("@")
        if is_meta:
            line = line[1:]
        if ":" not in line:
            raise TableError(f"line {lineno}: expected 'key: value', got {raw!r}")
        key, value = (part.strip() for part in line.split(":", 1))
        if not _KEY.match(key):
            raise TableError(f"line {lineno}: bad key {key!r}")
        target = table.meta if is_meta else table.entries
        if key in target:
            raise TableError(f"line {lineno}: duplicate key {key!r}")
        target[key] = value
    return table


def read_table(path: str | Path) -> Table:
    return parse_table(Path(path).read_text())


def format_table(entries: dict[str, str], meta: dict[str, str] | None = None,
                 header: str | None = None) -> str:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    for key, value in (meta or {}).items():
        lines.append(f"@{key}: {value}")
    for key, value in entries.items():
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def label_to_index(label: str) -> int:
    """``'a1' -> 1``, ``'b1' -> 2``, ``'-a2' -> -3``."""
    m = _LABEL.match(label.strip())
    if not m:
        raise TableError(f"bad generator label {label!r}")
    neg, kind, idx, caret = m.groups()
    i = int(idx)
    if i < 1:
        raise TableError(f"bad generator label {label!r}")
    if neg and caret:
        raise TableError(f"doubly inverted label {label!r}")
    gen = 2 * i - 1 if kind == "a" else 2 * i
    return -gen if (neg or caret) else gen


def index_to_label(letter: int) -> str:
    gen = abs(letter)
    kind = "a" if gen % 2 == 1 else "b"
    name = f"{kind}{(gen + 1) // 2}"
    return name if letter > 0 else "-" + name


def parse_letters(value: str) -> tuple[int, ...]:
    value = value.strip()
    if value in ("", "e"):
        return ()
    return tuple(label_to_index(tok) for tok in value.split(","))


def format_letters(letters) -> str:
    if len(letters) == 0:
        return "e"
    return ",".join(index_to_label(x) for x in letters)


def parse_matrix(value: str, size: int | None = None) -> np.ndarray:
    try:
        nums = [float(tok) for tok in value.split(",")]
    except ValueError as exc:
        raise TableError(f"bad matrix entry list {value!r}") from exc
    k = int(round(np.sqrt(len(nums))))
    if k * k != len(nums) or (size is not None and k != size):
        raise TableError(f"matrix has {len(nums)} entries, not a square of the expected size")
    return np.array(nums).reshape(k, k)


def format_matrix(m: np.ndarray) -> str:
    return ",".join(repr(float(x)) for x in np.asarray(m).ravel())

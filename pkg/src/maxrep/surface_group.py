"""Symbolic model of the closed surface group of genus g.

Generators are numbered ``a_i -> 2i-1`` and ``b_i -> 2i``; a negative index
is the inverse letter.  The single relator is the product of commutators
``[a_1,b_1] ... [a_g,b_g]`` with ``[x,y] = x y x^-1 y^-1``.

Everything here is exact: words are tuples of signed integers kept freely
reduced, and automorphisms are substitution tables that carry a certificate
showing the relator is sent to a conjugate of itself (or of its inverse).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from maxrep import tables

MAX_WORD_LETTERS = 10**6


class WordError(ValueError):
    pass


class NoConjugatorFound(Exception):
    """The substituted relator is not a short conjugate of the relator."""

    def __init__(self, max_length: int, detail: str = ""):
        self.max_length = max_length
        msg = f"no conjugator of length <= {max_length}"
        super().__init__(msg + (f": {detail}" if detail else ""))


class UnsupportedGenus(ValueError):
    pass


class WordGrowthError(RuntimeError):
    pass


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """Freely reduced word in the generators of the genus-``genus`` group."""

    letters: tuple[int, ...]
    genus: int

    def __post_init__(self):
        if self.genus < 1:
            raise WordError(f"genus must be positive, got {self.genus}")
        letters = tuple(int(x) for x in self.letters)
        bound = 2 * self.genus
        for x in letters:
            if x == 0 or abs(x) > bound:
                raise WordError(f"letter {x} out of range for genus {self.genus}")
        if len(letters) > MAX_WORD_LETTERS:
            raise WordGrowthError(f"word of {len(letters)} letters exceeds {MAX_WORD_LETTERS}")
        object.__setattr__(self, "letters", _reduce(letters))

    @classmethod
    def parse(cls, text: str, genus: int) -> "Word":
        return cls(tables.parse_letters(text), genus)

    @classmethod
    def identity(cls, genus: int) -> "Word":
        return cls((), genus)

    @classmethod
    def generator(cls, index: int, genus: int) -> "Word":
        return cls((index,), genus)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        self._check_genus(other)
        return Word(self.letters + other.letters, self.genus)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)), self.genus)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k), self.genus)

    def conjugate(self, by: "Word") -> "Word":
        """``by * self * by^-1``."""
        return by * self * by.inverse()

    def is_trivial(self) -> bool:
        return not self.letters

    def cyclic_core(self) -> tuple["Word", "Word"]:
        """Split ``self = u * core * u^-1`` with ``core`` cyclically reduced."""
        w = self.letters
        i, j = 0, len(w) - 1
        while i < j and w[i] == -w[j]:
            i += 1
            j -= 1
        return Word(w[:i], self.genus), Word(w[i:j + 1], self.genus)

    def _check_genus(self, other: "Word"):
        if other.genus != self.genus:
            raise WordError(f"genus mismatch: {self.genus} vs {other.genus}")

    def __str__(self):
        return tables.format_letters(self.letters)


def free_reduce(w: Word | Sequence[int], genus: int | None = None) -> Word:
    """Freely reduced representative.  Accepts a :class:`Word` or raw letters."""
    if isinstance(w, Word):
        return Word(w.letters, w.genus)
    if genus is None:
        raise WordError("genus required for raw letter sequences")
    return Word(tuple(w), genus)


def relator(genus: int) -> Word:
    letters = []
    for i in range(1, genus + 1):
        a, b = 2 * i - 1, 2 * i
        letters += [a, b, -a, -b]
    return Word(tuple(letters), genus)


def generators(genus: int) -> list[int]:
    return list(range(1, 2 * genus + 1))


def substitute(images: Mapping[int, Word], w: Word) -> Word:
    out: list[int] = []
    for x in w.letters:
        img = images[abs(x)].letters
        piece = img if x > 0 else tuple(-y for y in reversed(img))
        for y in piece:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
        if len(out) > MAX_WORD_LETTERS:
            raise WordGrowthError(f"substitution exceeded {MAX_WORD_LETTERS} letters")
    return Word(tuple(out), w.genus)


def _find_conjugator(image: Word, genus: int) -> tuple[Word, int] | None:
    """Shortest ``c`` and sign with ``image == c R^sign c^-1`` in the free group.

    A word is conjugate to the cyclically reduced relator exactly when its
    cyclic core is a rotation of it, and the conjugator is then read off from
    the peeled prefix and the rotation offset.  This enumerates every
    conjugator, so it is equivalent to an exhaustive search.
    """
    u, core = image.cyclic_core()
    best: tuple[Word, int] | None = None
    for sign in (1, -1):
        r = relator(genus) if sign == 1 else relator(genus).inverse()
        m = len(r)
        if len(core) != m:
            continue
        for k in range(m):
            if core.letters == r.letters[k:] + r.letters[:k]:
                head = Word(r.letters[:k], genus)
                c = u * head.inverse()
                if best is None or len(c) < len(best[0]):
                    best = (c, sign)
    return best


@dataclass(frozen=True)
class Automorphism:
    """Certified automorphism of the surface group.

    ``images[i]`` is the image of generator ``i``; the certificate states
    ``substitute(images, R) == conjugator * R^exponent * conjugator^-1``.
    ``exponent == +1`` marks an orientation-preserving (mapping class) element.
    """

    images: Mapping[int, Word]
    conjugator: Word
    exponent: int
    genus: int
    label: str = ""

    @property
    def orientation_preserving(self) -> bool:
        return self.exponent == 1

    def __call__(self, w: Word) -> Word:
        return apply_automorphism(self, w)

    def compose(self, other: "Automorphism", max_conjugator_length: int | None = None) -> "Automorphism":
        """``self o other``: first ``other``, then ``self``."""
        images = {g: substitute(self.images, other.images[g]) for g in generators(self.genus)}
        bound = max_conjugator_length
        if bound is None:
            # psi(phi(R)) = psi(c_phi) c_psi R^+-1 c_psi^-1 psi(c_phi)^-1
            bound = max(8, _max_len(self.images) * len(other.conjugator) + len(self.conjugator))
        return verify_automorphism(images, self.genus, bound, label=f"{self.label}*{other.label}")

    def power(self, k: int) -> "Automorphism":
        base = self if k >= 0 else self.inverse()
        result = identity_automorphism(self.genus)
        for _ in range(abs(k)):
            result = base.compose(result)
        return result

    def inverse(self) -> "Automorphism":
        images = nielsen_inverse(self.images, self.genus)
        # psi^-1(R) = psi^-1(c)^-1 R^+-1 psi^-1(c)
        bound = max(8, _max_len(images) * len(self.conjugator))
        label = self.label + "^-1" if self.label else ""
        return verify_automorphism(images, self.genus, bound, label=label)

    def to_table(self) -> str:
        entries = {tables.index_to_label(g): str(self.images[g]) for g in generators(self.genus)}
        meta = {"genus": str(self.genus)}
        if self.label:
            meta["label"] = self.label
        return tables.format_table(entries, meta)


def _max_len(images: Mapping[int, Word]) -> int:
    return max((len(w) for w in images.values()), default=0)


def verify_automorphism(images: Mapping, genus: int | None = None,
                        max_conjugator_length: int = 8, label: str = "") -> Automorphism:
    """Certify a substitution table as an automorphism.

    ``images`` maps generator indices (or labels such as ``'b1'``) to words
    (or label strings).  Raises :class:`NoConjugatorFound` if the substituted
    relator is not conjugate to the relator or its inverse by a word of
    length at most ``max_conjugator_length``.
    """
    norm = _normalize_images(images, genus)
    if not norm:
        raise WordError("empty substitution table")
    genus = next(iter(norm.values())).genus
    missing = set(generators(genus)) - set(norm)
    if missing:
        raise WordError(f"images missing for generators {sorted(missing)}")
    image = substitute(norm, relator(genus))
    found = _find_conjugator(image, genus)
    if found is None:
        raise NoConjugatorFound(max_conjugator_length, f"relator image {image} is not a conjugate of the relator")
    conj, sign = found
    if len(conj) > max_conjugator_length:
        raise NoConjugatorFound(max_conjugator_length, f"shortest conjugator has length {len(conj)}")
    return Automorphism(images=norm, conjugator=conj, exponent=sign, genus=genus, label=label)


def _normalize_images(images: Mapping, genus: int | None) -> dict[int, Word]:
    out: dict[int, Word] = {}
    for key, val in images.items():
        g = tables.label_to_index(key) if isinstance(key, str) else int(key)
        if g <= 0:
            raise WordError(f"images must be keyed by positive generators, got {key!r}")
        if isinstance(val, Word):
            w = val
        else:
            if genus is None:
                raise WordError("genus required when images are not Word objects")
            w = Word.parse(val, genus) if isinstance(val, str) else Word(tuple(val), genus)
        out[g] = w
    genera = {w.genus for w in out.values()}
    if len(genera) > 1:
        raise WordError(f"images have mixed genera {sorted(genera)}")
    if genus is not None and genera and genera != {genus}:
        raise WordError(f"images have genus {genera}, expected {genus}")
    for g in out:
        if g > 2 * next(iter(genera)):
            raise WordError(f"generator {g} out of range")
    return out


def identity_automorphism(genus: int) -> Automorphism:
    images = {g: Word.generator(g, genus) for g in generators(genus)}
    return verify_automorphism(images, genus, label="id")


def apply_automorphism(psi: Automorphism, w: Word) -> Word:
    if not isinstance(psi, Automorphism):
        raise TypeError("apply_automorphism needs a certified Automorphism (see verify_automorphism)")
    if w.genus != psi.genus:
        raise WordError(f"genus mismatch: word {w.genus}, automorphism {psi.genus}")
    return substitute(psi.images, w)


def nielsen_inverse(images: Mapping[int, Word], genus: int, max_steps: int = 100000) -> dict[int, Word]:
    """Invert a substitution table by greedy Nielsen reduction.

    The image tuple is shortened by elementary moves ``u_i <- u_i u_j^+-1`` or
    ``u_j^+-1 u_i`` while tracking the same moves on the generators, until
    every image is a single letter.  Raises :class:`WordError` if the greedy
    reduction stalls, which cannot happen for tables built from products of
    Dehn twists about the standard curves.
    """
    gens = generators(genus)
    u = [images[g] for g in gens]
    t = [Word.generator(g, genus) for g in gens]
    for _ in range(max_steps):
        improved = False
        for i in range(len(u)):
            for j in range(len(u)):
                if i == j:
                    continue
                for e in (1, -1):
                    uj = u[j] if e == 1 else u[j].inverse()
                    tj = t[j] if e == 1 else t[j].inverse()
                    for left in (False, True):
                        cand = uj * u[i] if left else u[i] * uj
                        if len(cand) < len(u[i]):
                            u[i] = cand
                            t[i] = tj * t[i] if left else t[i] * tj
                            improved = True
        if not improved:
            break
    if any(len(w) != 1 for w in u):
        raise WordError("Nielsen reduction stalled; table may not be an automorphism of the free group")
    inv: dict[int, Word] = {}
    for ui, ti in zip(u, t):
        x = ui.letters[0]
        inv[abs(x)] = ti if x > 0 else ti.inverse()
    if sorted(inv) != gens:
        raise WordError("Nielsen reduction did not reach a permutation of the generators")
    return inv


def _data_path(name: str) -> Path:
    return Path(str(resources.files("maxrep") / "data" / name))


def load_automorphism(path: str | Path, genus: int | None = None,
                      max_conjugator_length: int = 8) -> Automorphism:
    """Load and certify an automorphism table (see :mod:`maxrep.tables`)."""
    table = tables.read_table(path)
    g = int(table.meta.get("genus", genus or 0))
    if g < 1:
        raise WordError(f"{path}: genus not given")
    images = {key: Word.parse(val, g) for key, val in table.entries.items()}
    label = table.meta.get("label", Path(path).stem)
    return verify_automorphism(images, g, max_conjugator_length, label=label)


BUILTIN_TWISTS = {2: ["twist_a1", "twist_b1", "twist_a2", "twist_b2"]}


def builtin_twists(genus: int) -> list[Automorphism]:
    """Certified Dehn twists along each ``a_i`` and ``b_i`` (genus 2 only)."""
    if genus not in BUILTIN_TWISTS:
        raise UnsupportedGenus(f"no built-in twist tables for genus {genus}; load user tables instead")
    return [load_automorphism(_data_path(f"{name}_genus{genus}.txt")) for name in BUILTIN_TWISTS[genus]]


def builtin_twist(label: str, genus: int = 2) -> Automorphism:
    """Load one shipped twist table by label, e.g. ``'a1'`` or ``'sep'``."""
    path = _data_path(f"twist_{label}_genus{genus}.txt")
    if not path.exists():
        raise UnsupportedGenus(f"no built-in twist {label!r} for genus {genus}")
    return load_automorphism(path)


@dataclass(frozen=True)
class CurveSystem:
    words: tuple[Word, ...]
    labels: tuple[str, ...]
    genus: int = field(default=2)

    def __post_init__(self):
        expected = 9 * self.genus - 9
        if len(self.words) != expected:
            raise WordError(f"curve system needs {expected} words at genus {self.genus}, got {len(self.words)}")
        if len(self.labels) != len(self.words):
            raise WordError("labels and words differ in length")
        for lab, w in zip(self.labels, self.words):
            if w.genus != self.genus:
                raise WordError(f"curve {lab} has genus {w.genus}")
            if w.is_trivial():
                raise WordError(f"curve {lab} is trivial")

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(zip(self.labels, self.words))


def curve_system(genus: int, words: Sequence[Word] | None = None,
                 labels: Sequence[str] | None = None) -> CurveSystem:
    """The ``9g-9`` curves: pants curves, seams, and seams twisted along pants curves.

    With ``words`` given, they are validated and returned as is.  Otherwise
    the shipped genus-2 data are used and the twisted seams are computed with
    the shipped twist tables.
    """
    if words is not None:
        words = tuple(words)
        if labels is None:
            labels = tuple(f"c{i + 1}" for i in range(len(words)))
        return CurveSystem(words, tuple(labels), genus)
    if genus != 2:
        raise UnsupportedGenus(f"no built-in curve system for genus {genus}; pass words explicitly")
    return load_curve_system(_data_path("curves_genus2.txt"))


def load_curve_system(path: str | Path) -> CurveSystem:
    table = tables.read_table(path)
    genus = int(table.meta["genus"])
    k = 3 * genus - 3
    alphas = [Word.parse(table.entries[f"alpha{i}"], genus) for i in range(1, k + 1)]
    betas = [Word.parse(table.entries[f"beta{i}"], genus) for i in range(1, k + 1)]
    twist_names = [s.strip() for s in table.meta["twists"].split(",")]
    if len(twist_names) != k:
        raise WordError(f"{path}: need {k} twist tables, got {len(twist_names)}")
    base = Path(path).parent
    twisted = []
    for name, alpha, beta in zip(twist_names, alphas, betas):
        psi = load_automorphism(base / f"{name}_genus{genus}.txt")
        # the table must fix its own pants curve up to conjugacy
        if psi(alpha).cyclic_core()[1] != alpha.cyclic_core()[1]:
            raise WordError(f"twist {name} does not fix its pants curve {alpha}")
        twisted.append(psi(beta))
    labels = ([f"alpha{i}" for i in range(1, k + 1)] + [f"beta{i}" for i in range(1, k + 1)]
              + [f"T(beta{i})" for i in range(1, k + 1)])
    return CurveSystem(tuple(alphas + betas + twisted), tuple(labels), genus)

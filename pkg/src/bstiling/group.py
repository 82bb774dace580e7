"""Exact arithmetic in the Baumslag-Solitar group BS(m, n) = <a, b | a^m b = b a^n>.

Words are plain strings over the letters ``a``, ``A`` (a^-1), ``b`` and
``B`` (b^-1); the empty string is the identity.  Group elements are kept
as :class:`NormalForm` values, which are hashable and canonical, so they
can be used directly as keys for Cayley-graph positions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

LETTERS = "aAbB"
_INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class GroupParams:
    m: int
    n: int

    def __post_init__(self):
        if not (isinstance(self.m, int) and isinstance(self.n, int)):
            raise TypeError("m and n must be integers")
        if self.m < 1 or self.n < 1:
            raise ValueError(f"BS(m,n) needs m, n >= 1, got ({self.m},{self.n})")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.m, self.n)

    def __str__(self):
        return f"BS({self.m},{self.n})"


BS32 = GroupParams(3, 2)


def check_word(w: str) -> str:
    bad = set(w) - set(LETTERS)
    if bad:
        raise WordError(f"invalid letters {sorted(bad)!r} in word {w!r}; use a, A, b, B")
    return w


def inverse_word(w: str) -> str:
    return "".join(_INVERSE[x] for x in reversed(w))


def free_reduce(w: str) -> str:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[str] = []
    for x in check_word(w):
        if out and out[-1] == _INVERSE[x]:
            out.pop()
        else:
            out.append(x)
    return "".join(out)


def contribution(w: Union[str, "NormalForm"], x: str) -> int:
    """Number of occurrences of ``x`` minus occurrences of its inverse."""
    if isinstance(w, NormalForm):
        return w.contribution(x)
    check_word(w)
    return w.count(x) - w.count(_INVERSE[x])


# -- syllable representation --------------------------------------------------
#
# A word is stored as [e0, s1, e1, s2, e2, ..., sk, ek]: a^e0 b^s1 a^e1 ... b^sk a^ek
# with s_i = +1 / -1.  Exponents are Python ints (arbitrary precision); they
# grow by a factor m/n or n/m for every b-letter they are pushed across.


def _syllables(w: str) -> list[int]:
    syl = [0]
    for x in w:
        if x == "a":
            syl[-1] += 1
        elif x == "A":
            syl[-1] -= 1
        else:
            syl.append(1 if x == "b" else -1)
            syl.append(0)
    return syl


def _expand(syl: Iterable[int]) -> str:
    parts = []
    for i, e in enumerate(syl):
        if i % 2:
            parts.append("b" if e > 0 else "B")
        elif e:
            parts.append(("a" if e > 0 else "A") * abs(e))
    return "".join(parts)


def _push(syl: list[int], x: str, m: int, n: int) -> None:
    """Right-multiply a normal form (in syllable form, mutated) by one letter.

    a^z b   = a^(z mod m) b a^(n (z div m))
    a^z b^-1 = a^(z mod n) b^-1 a^(m (z div n))
    A pinch b^-1 a^(km) b -> a^(kn) or b a^(kn) b^-1 -> a^(km) can only occur
    against the last b-letter, so one check per letter keeps the form
    Britton-reduced.  Each step either appends one b-letter or removes one,
    so the fold terminates after len(w) steps.
    """
    if x == "a":
        syl[-1] += 1
        return
    if x == "A":
        syl[-1] -= 1
        return
    s = 1 if x == "b" else -1
    mod, other = (m, n) if s == 1 else (n, m)
    e = syl[-1]
    if len(syl) > 1 and syl[-2] == -s and e % mod == 0:
        syl.pop()
        syl.pop()
        syl[-1] += (e // mod) * other
        return
    q, r = divmod(e, mod)
    syl[-1] = r
    syl.append(s)
    syl.append(q * other)


class NormalForm:
    """Canonical representative of an element of BS(m, n).

    Freely reduced, pinch-free, and every a-power standing before ``b``
    (resp. ``B``) has exponent in [0, m) (resp. [0, n)).  Only the trailing
    a-power is unrestricted.  Two words give equal normal forms exactly when
    they name the same group element.
    """

    __slots__ = ("params", "syllables", "_hash", "_word")

    def __init__(self, params: GroupParams, syllables: tuple[int, ...]):
        self.params = params
        self.syllables = tuple(syllables)
        self._hash = hash((params, self.syllables))
        self._word = None

    @property
    def word(self) -> str:
        if self._word is None:
            self._word = _expand(self.syllables)
        return self._word

    @property
    def letters(self) -> str:
        return self.word

    def __str__(self):
        return self.word

    def __repr__(self):
        return f"NormalForm({self.params.m},{self.params.n}: {self.word or 'e'!s})"

    def __eq__(self, other):
        if not isinstance(other, NormalForm):
            return NotImplemented
        return self.params == other.params and self.syllables == other.syllables

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "NormalForm"):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return self.word

    def __len__(self):
        # word length of the normal form (not the geodesic length)
        return sum(abs(e) for e in self.syllables[::2]) + len(self.syllables) // 2

    @property
    def is_identity(self) -> bool:
        return self.syllables == (0,)

    @property
    def b_count(self) -> int:
        """Number of b-letters (either sign) in the normal form."""
        return len(self.syllables) // 2

    @property
    def height(self) -> int:
        return -sum(self.syllables[1::2])

    def contribution(self, x: str) -> int:
        if x in "aA":
            total = sum(self.syllables[::2])
        elif x in "bB":
            total = sum(self.syllables[1::2])
        else:
            raise WordError(f"unknown letter {x!r}")
        return total if x in "ab" else -total

    def __mul__(self, other: "NormalForm") -> "NormalForm":
        return multiply(self.params, self, other)


def _as_word(w: Union[str, NormalForm]) -> str:
    return w.word if isinstance(w, NormalForm) else check_word(w)


def normalize(p: GroupParams, w: Union[str, NormalForm]) -> NormalForm:
    if isinstance(w, NormalForm):
        if w.params == p:
            return w
        w = w.word
    syl = [0]
    for x in check_word(w):
        _push(syl, x, p.m, p.n)
    return NormalForm(p, tuple(syl))


def identity(p: GroupParams) -> NormalForm:
    return NormalForm(p, (0,))


def multiply(p: GroupParams, u: Union[str, NormalForm], v: Union[str, NormalForm]) -> NormalForm:
    syl = list(normalize(p, u).syllables)
    for x in _as_word(v):
        _push(syl, x, p.m, p.n)
    return NormalForm(p, tuple(syl))


def invert(p: GroupParams, u: Union[str, NormalForm]) -> NormalForm:
    return normalize(p, inverse_word(_as_word(u)))


def equal(p: GroupParams, u: Union[str, NormalForm], v: Union[str, NormalForm]) -> bool:
    return multiply(p, u, inverse_word(_as_word(v))).is_identity


def power(p: GroupParams, u: Union[str, NormalForm], k: int) -> NormalForm:
    w = _as_word(u)
    if k < 0:
        w, k = inverse_word(w), -k
    syl = [0]
    for _ in range(k):
        for x in w:
            _push(syl, x, p.m, p.n)
    return NormalForm(p, tuple(syl))


def britton_reduce(p: GroupParams, w: str) -> str:
    """Free reduction plus pinch removal, leftmost pinch first, to a fixpoint.

    Rewrites b^-1 a^(km) b -> a^(kn) and b a^(kn) b^-1 -> a^(km).  Unlike
    :func:`normalize` this does not move a-powers across b-letters, so the
    result is pinch-free but not canonical.  It is the identity iff it is
    the empty word.
    """
    syl = _syllables(free_reduce(w))
    changed = True
    while changed:
        changed = False
        for i in range(1, len(syl) - 2, 2):
            s, e, t = syl[i], syl[i + 1], syl[i + 2]
            if s == -t:
                mod, other = (p.m, p.n) if s == -1 else (p.n, p.m)
                if e % mod == 0:
                    merged = syl[i - 1] + (e // mod) * other + syl[i + 3]
                    syl[i - 1:i + 4] = [merged]
                    changed = True
                    break
    return _expand(syl)


def psi(p: GroupParams, w: Union[str, NormalForm]) -> Fraction:
    """Horizontal coordinate: psi(w.a) = psi(w) + (m/n)^||w||_b, exactly."""
    syl = w.syllables if isinstance(w, NormalForm) else _syllables(check_word(w))
    total = Fraction(0)
    k = 0
    for i, e in enumerate(syl):
        if i % 2:
            k += e
        elif e:
            total += e * _ratio_power(p, k)
    return total


def _ratio_power(p: GroupParams, k: int) -> Fraction:
    if k >= 0:
        return Fraction(p.m ** k, p.n ** k)
    return Fraction(p.n ** -k, p.m ** -k)


@dataclass(frozen=True)
class PlanePoint:
    alpha: Fraction
    beta: int

    def __iter__(self):
        yield self.alpha
        yield self.beta


def project(p: GroupParams, w: Union[str, NormalForm]) -> PlanePoint:
    """The plane projection (psi(w), ||w||_{b^-1}); independent of the word chosen."""
    return PlanePoint(psi(p, w), contribution(w, "B"))


def neighbors(p: GroupParams, g: Union[str, NormalForm]) -> list[tuple[str, NormalForm]]:
    g = normalize(p, g)
    return [(x, multiply(p, g, x)) for x in LETTERS]


def ball(p: GroupParams, r: int) -> tuple[NormalForm, ...]:
    """All elements at word distance <= r from the identity, sorted by normal form."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    start = identity(p)
    seen = {start: 0}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        d = seen[g]
        if d == r:
            continue
        for _, h in neighbors(p, g):
            if h not in seen:
                seen[h] = d + 1
                queue.append(h)
    return tuple(sorted(seen, key=NormalForm.sort_key))


def same_level(p: GroupParams, u: Union[str, NormalForm], v: Union[str, NormalForm]) -> bool:
    """True iff u^-1 v is a power of a, i.e. u and v lie on the same coset g<a>."""
    return multiply(p, invert(p, u), v).b_count == 0

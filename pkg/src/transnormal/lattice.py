"""Integer 2x2 matrices: GL(2,Z) arithmetic, Nielsen-Thurston types of torus
mapping classes, RL words and conjugacy decisions.

Hyperbolic classes are handled through the continued fraction of the
attracting fixed point of the Moebius action ``z -> (az+b)/(cz+d)``.  The
purely periodic part of that expansion is the cyclic word in
``R = (1 1; 0 1)`` and ``L = (1 0; 1 1)``; ``R^a L^b = (a 1; 1 0)(b 1; 1 0)``.
Every factorisation is certified by rebuilding the input matrix exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

import numpy as np

from .qfield import QuadraticNumber

SL = "SL"
GL = "GL"


class NotInvertibleError(ValueError):
    pass


class OrientationReversingError(ValueError):
    pass


@dataclass(frozen=True)
class IntMat2:
    """Row-major integer matrix ``(a b; c d)``."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def identity(cls) -> "IntMat2":
        return cls(1, 0, 0, 1)

    @classmethod
    def of(cls, entries) -> "IntMat2":
        if isinstance(entries, IntMat2):
            return entries
        a, b, c, d = (int(e) for e in entries)
        return cls(a, b, c, d)

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "IntMat2") -> "IntMat2":
        return IntMat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "IntMat2":
        return IntMat2(-self.a, -self.b, -self.c, -self.d)

    def apply(self, v):
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def trace(self) -> int:
        return self.a + self.d

    def transpose(self) -> "IntMat2":
        return IntMat2(self.a, self.c, self.b, self.d)

    def is_unimodular(self) -> bool:
        return self.det() in (1, -1)

    def inverse(self) -> "IntMat2":
        det = self.det()
        if det not in (1, -1):
            raise NotInvertibleError(f"{self.as_tuple()} is not invertible over integers")
        return IntMat2(det * self.d, -det * self.b, -det * self.c, det * self.a)

    def __pow__(self, n: int) -> "IntMat2":
        base = self if n >= 0 else self.inverse()
        result = IntMat2.identity()
        for _ in range(abs(n)):
            result = result @ base
        return result

    def conjugate_by(self, h: "IntMat2") -> "IntMat2":
        return h @ self @ h.inverse()


R = IntMat2(1, 1, 0, 1)
L = IntMat2(1, 0, 1, 1)
SWAP = IntMat2(0, 1, 1, 0)
I2 = IntMat2.identity()


def mat2_arithmetic(x: IntMat2, y: IntMat2) -> dict:
    """Product, inverse, determinant and trace in one call.

    The inverse entry raises when ``x`` is not unimodular.
    """
    return {
        "product": x @ y,
        "inverse_of_x": x.inverse(),
        "det_x": x.det(),
        "trace_x": x.trace(),
    }


# -- Nielsen-Thurston typing ---------------------------------------------------


@dataclass(frozen=True)
class Periodic:
    order: int


@dataclass(frozen=True)
class Reducible:
    twist: int
    sign: int


@dataclass(frozen=True)
class Anosov:
    lam: float
    trace: int


NTType = Union[Periodic, Reducible, Anosov]

_ELLIPTIC_ORDER = {0: 4, 1: 6, -1: 3}


def _primitive(v):
    g = math.gcd(v[0], v[1])
    return (v[0] // g, v[1] // g)


def parabolic_invariant(m: IntMat2) -> tuple[int, int]:
    """Return ``(sign, n)`` with ``m`` SL-conjugate to ``sign * (1 n; 0 1)``.

    ``m - sign*I`` equals ``n * (-pr, p^2; -r^2, pr)`` for the first column
    ``(p, r)`` of a conjugator, which pins both ``|n|`` and its sign.
    """
    sign = 1 if m.trace() > 0 else -1
    u = m if sign > 0 else -m
    nb, nc = u.b, u.c
    size = math.gcd(math.gcd(u.a - 1, nb), math.gcd(nc, u.d - 1))
    if size == 0:
        raise ValueError("identity has no parabolic invariant")
    n = size if (nb > 0 or (nb == 0 and nc < 0)) else -size
    return sign, n


def nt_type(m: IntMat2) -> NTType:
    if m.det() != 1:
        raise OrientationReversingError("orientation-reversing class: NT typing undefined here")
    t = m.trace()
    if m == I2:
        return Periodic(1)
    if m == -I2:
        return Periodic(2)
    if abs(t) < 2:
        return Periodic(_ELLIPTIC_ORDER[t])
    if abs(t) == 2:
        sign, n = parabolic_invariant(m)
        return Reducible(twist=n, sign=sign)
    return Anosov(lam=(abs(t) + math.sqrt(t * t - 4)) / 2, trace=t)


def matrix_order(m: IntMat2, limit: int = 12) -> int | None:
    """Multiplicative order of ``m`` if it is at most ``limit``."""
    p = m
    for k in range(1, limit + 1):
        if p == I2:
            return k
        p = p @ m
    return None


class AnosovEigen(NamedTuple):
    lam: float
    mu1: QuadraticNumber
    mu2: QuadraticNumber
    v1: tuple[QuadraticNumber, QuadraticNumber]
    v2: tuple[QuadraticNumber, QuadraticNumber]


def anosov_eigen(m: IntMat2) -> AnosovEigen:
    """Exact eigen-data of an Anosov class in Q(sqrt(trace^2 - 4)).

    ``mu1`` is the expanding eigenvalue (sign of the trace, modulus ``lam``),
    ``mu2 = 1/mu1``; ``v_i`` are normalised to first coordinate 1.
    """
    kind = nt_type(m)
    if not isinstance(kind, Anosov):
        raise ValueError(f"{m.as_tuple()} is not Anosov (got {kind})")
    t = m.trace()
    d = t * t - 4
    sgn = 1 if t > 0 else -1
    mu1 = QuadraticNumber(Fraction(t, 2), Fraction(sgn, 2), d)
    mu2 = QuadraticNumber(Fraction(t, 2), Fraction(-sgn, 2), d)

    def vec(mu):
        return (QuadraticNumber.rational(1, d), (mu - m.a) / m.b)

    return AnosovEigen(kind.lam, mu1, mu2, vec(mu1), vec(mu2))


# -- continued fractions of quadratic irrationals ------------------------------


def _floor_qi(p: int, s: int, q: int) -> int:
    """floor((p + sqrt(D)) / q) where ``s = isqrt(D)`` and D is not a square."""
    if q > 0:
        return (p + s) // q
    return (-p - s - 1) // (-q)


def _cf_expansion(p: int, disc: int, q: int):
    """Partial quotients of (p + sqrt(disc))/q until the state cycle closes.

    Returns ``(terms, preperiod, period)``.  Requires ``q | disc - p^2``.
    """
    s = math.isqrt(disc)
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    while (p, q) not in seen:
        seen[(p, q)] = len(terms)
        n = _floor_qi(p, s, q)
        terms.append(n)
        p = n * q - p
        q = (disc - p * p) // q
    start = seen[(p, q)]
    return terms, start, len(terms) - start


def _flip(n: int) -> IntMat2:
    return IntMat2(n, 1, 1, 0)


def _word_matrix(seq) -> IntMat2:
    out = I2
    for n in seq:
        out = out @ _flip(n)
    return out


class HyperbolicData(NamedTuple):
    sign: int
    sequence: tuple[int, ...]
    conjugator: IntMat2


def hyperbolic_sequence(m: IntMat2) -> HyperbolicData:
    """Factor ``m = sign * h * W * h^-1`` with ``W = prod (c_i 1; 1 0)``, ``det h = 1``.

    ``m`` must be unimodular with real irrational eigenvalues (``|tr| > 2``
    for det 1, ``tr != 0`` for det -1).
    """
    det, t = m.det(), m.trace()
    disc = t * t - 4 * det
    if det not in (1, -1):
        raise NotInvertibleError(f"{m.as_tuple()} is not invertible over integers")
    r = math.isqrt(disc) if disc >= 0 else -1
    if disc <= 0 or r * r == disc:
        raise ValueError(f"{m.as_tuple()} has no RL factorization")
    sign = 1 if t > 0 else -1
    # attracting fixed point (a - d + sign*sqrt(disc)) / (2c)
    if sign > 0:
        p, q = m.a - m.d, 2 * m.c
    else:
        p, q = m.d - m.a, -2 * m.c
    terms, start, period = _cf_expansion(p, disc, q)
    base = start if start % 2 == 0 else start + 1

    def term(i):
        return terms[i] if i < len(terms) else terms[start + (i - start) % period]

    h = _word_matrix(term(i) for i in range(base))
    block = tuple(term(base + i) for i in range(period))
    e = _word_matrix(block)
    power, n = e, 1
    while abs(power.trace()) <= abs(t):
        candidate = power.conjugate_by(h)
        if (candidate if sign > 0 else -candidate) == m:
            return HyperbolicData(sign, block * n, h)
        power, n = power @ e, n + 1
    raise ArithmeticError(f"continued-fraction factorisation failed for {m.as_tuple()}")


# -- RL words and word moves ---------------------------------------------------


@dataclass(frozen=True)
class RLWord:
    """Cyclic word ``R^{r1} L^{l1} ... R^{rk} L^{lk}`` of a positive-trace hyperbolic class.

    ``sign`` is -1 when the source matrix had negative trace and the word
    describes ``-m``.
    """

    exponents: tuple[tuple[int, int], ...]
    sign: int = 1

    def matrix(self) -> IntMat2:
        out = I2
        for r, l in self.exponents:
            out = out @ (R ** r) @ (L ** l)
        return out if self.sign > 0 else -out

    def letters(self) -> tuple[int, ...]:
        return tuple(e for pair in self.exponents for e in pair)

    def __str__(self):
        body = "".join(f"R^{r}L^{l}" for r, l in self.exponents)
        return body if self.sign > 0 else f"-{body}"


def _pairs(seq) -> tuple[tuple[int, int], ...]:
    return tuple((seq[i], seq[i + 1]) for i in range(0, len(seq), 2))


def _rotations(seq, step: int):
    return [seq[i:] + seq[:i] for i in range(0, len(seq), step)]


def rotate_word(word: RLWord, k: int = 1) -> RLWord:
    """Cyclic rotation by ``k`` pairs (SL conjugation)."""
    n = len(word.exponents)
    k %= n
    return RLWord(word.exponents[k:] + word.exponents[:k], word.sign)


def swap_word(word: RLWord) -> RLWord:
    """Exchange R and L (conjugation by the swap matrix, det -1)."""
    seq = word.letters()
    return RLWord(_pairs(seq[1:] + seq[:1]), word.sign)


def reverse_swap_word(word: RLWord) -> RLWord:
    """Reverse the letter order and exchange R and L (inversion up to SL conjugacy)."""
    return RLWord(_pairs(tuple(reversed(word.letters()))), word.sign)


def canonical_rotation(word: RLWord) -> RLWord:
    return RLWord(min(rotate_word(word, k).exponents for k in range(len(word.exponents))), word.sign)


def rl_canonical_form(m: IntMat2) -> RLWord:
    if m.det() != 1 or abs(m.trace()) <= 2:
        raise ValueError(f"{m.as_tuple()} has no RL factorization")
    data = hyperbolic_sequence(m)
    return canonical_rotation(RLWord(_pairs(data.sequence), data.sign))


# -- conjugacy -----------------------------------------------------------------


def _orientation(m: IntMat2) -> int:
    # det(v, m v) keeps one sign for elliptic m; v = e1 gives c
    return 1 if m.c > 0 else -1


def _fixed_lattice_index(m: IntMat2) -> int:
    """|det| of primitive +1 and -1 eigenvectors of an integral reflection."""

    def kernel(n: IntMat2):
        for row in ((n.a, n.b), (n.c, n.d)):
            if row != (0, 0):
                return _primitive((row[1], -row[0]))
        raise ValueError("zero matrix")

    plus = kernel(IntMat2(m.a - 1, m.b, m.c, m.d - 1))
    minus = kernel(IntMat2(m.a + 1, m.b, m.c, m.d + 1))
    return abs(plus[0] * minus[1] - plus[1] * minus[0])


def conjugacy_token(m: IntMat2, group: str = SL, allow_inverse: bool = False) -> tuple:
    """Hashable complete invariant of the class of ``m`` under the chosen relation."""
    det, t = m.det(), m.trace()
    if det not in (1, -1):
        raise NotInvertibleError(f"{m.as_tuple()} is not invertible over integers")
    loose = group == GL or allow_inverse
    if det == 1:
        if m == I2:
            return ("identity",)
        if m == -I2:
            return ("minus_identity",)
        if abs(t) < 2:
            return ("elliptic", t, 0 if loose else _orientation(m))
        if abs(t) == 2:
            sign, n = parabolic_invariant(m)
            return ("parabolic", sign, abs(n) if loose else n)
    elif t == 0:
        return ("reflection", _fixed_lattice_index(m))
    data = hyperbolic_sequence(m)
    seq = data.sequence
    step = 1 if group == GL else 2
    candidates = [(data.sign, s) for s in _rotations(seq, step)]
    if allow_inverse:
        inv_sign = data.sign if det == 1 else -data.sign
        rev = tuple(reversed(seq))
        candidates += [(inv_sign, s) for s in _rotations(rev, step)]
    return ("hyperbolic", det) + min(candidates)


def conj_equivalent(x: IntMat2, y: IntMat2, group: str = SL, allow_inverse: bool = False) -> bool:
    """True iff ``y = h x^{+-1} h^-1`` for some ``h`` in SL(2,Z) or GL(2,Z)."""
    x, y = IntMat2.of(x), IntMat2.of(y)
    if x.det() != y.det():
        return False
    return conjugacy_token(x, group, allow_inverse) == conjugacy_token(y, group, allow_inverse)


def canonical_representative(m: IntMat2, group: str = GL, allow_inverse: bool = True) -> IntMat2:
    """A fixed matrix in the class of ``m``; equal for equivalent inputs."""
    token = conjugacy_token(m, group, allow_inverse)
    kind = token[0]
    if kind == "identity":
        return I2
    if kind == "minus_identity":
        return -I2
    if kind == "elliptic":
        _, t, orient = token
        reps = {0: IntMat2(0, -1, 1, 0), 1: IntMat2(1, -1, 1, 0), -1: IntMat2(0, -1, 1, -1)}
        rep = reps[t]
        return rep if orient >= 0 else rep.inverse()
    if kind == "parabolic":
        _, sign, n = token
        u = IntMat2(1, n, 0, 1)
        return u if sign > 0 else -u
    if kind == "reflection":
        return IntMat2(1, 0, 0, -1) if token[1] == 1 else SWAP
    _, _det, sign, seq = token
    w = _word_matrix(seq)
    return w if sign > 0 else -w


# -- bounded brute-force oracle ------------------------------------------------


@lru_cache(maxsize=None)
def _conjugators(bound: int, group: str):
    rng = np.arange(-bound, bound + 1, dtype=np.int64)
    a, b, c, d = (g.ravel() for g in np.meshgrid(rng, rng, rng, rng, indexing="ij"))
    det = a * d - b * c
    keep = det == 1 if group == SL else np.abs(det) == 1
    a, b, c, d, det = a[keep], b[keep], c[keep], d[keep], det[keep]
    h = np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)
    hinv = np.stack([np.stack([det * d, -det * b], -1), np.stack([-det * c, det * a], -1)], -2)
    return h, hinv


def bounded_conjugates(x: IntMat2, bound: int, group: str = SL, allow_inverse: bool = False) -> set:
    """Every ``h x^{+-1} h^-1`` with entries of ``h`` in ``[-bound, bound]``."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    h, hinv = _conjugators(bound, group)
    sources = [x] + ([x.inverse()] if allow_inverse else [])
    out = set()
    for s in sources:
        xm = np.array([[s.a, s.b], [s.c, s.d]], dtype=np.int64)
        conj = h @ xm @ hinv
        out.update(map(tuple, conj.reshape(-1, 4).tolist()))
    return out


def brute_conjugacy_oracle(
    x: IntMat2, y: IntMat2, bound: int, allow_inverse: bool = False, group: str = SL
) -> bool:
    """Exhaustive search for a conjugator with entries in ``[-bound, bound]``."""
    x, y = IntMat2.of(x), IntMat2.of(y)
    return y.as_tuple() in bounded_conjugates(x, bound, group, allow_inverse)


def unimodular_matrices(bound: int) -> list[IntMat2]:
    """All matrices with entries in ``[-bound, bound]`` and determinant +-1."""
    rng = range(-bound, bound + 1)
    return [
        IntMat2(a, b, c, d)
        for a in rng
        for b in rng
        for c in rng
        for d in rng
        if a * d - b * c in (1, -1)
    ]

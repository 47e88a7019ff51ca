"""Exact rational scalars, vectors, and covectors.

The computational core of this package is float-free: every scalar is a
``fractions.Fraction`` and every norm, pairing, and comparison below is
computed exactly.  ``Vector`` models a point of an N-section of a sup-norm
sequence space, ``Covector`` a functional on it (whose natural norm is the
l1 coefficient sum).  Coordinate accessors are 1-based, matching the usual
sequence-space indexing x_1, x_2, ...

Serialization: rationals travel as the exact string ``p/q`` (``q`` omitted
when it is 1), vectors and covectors as ordered lists of such strings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

Rational = Fraction

RationalInput = Union[Rational, int, str]

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def rat(p: int, q: int = 1) -> Rational:
    """Reduced rational p/q with positive denominator; rejects q = 0."""
    return Fraction(p, q)


def as_rational(value: RationalInput) -> Rational:
    """Coerce an int, Fraction, or ``p/q`` string to an exact rational.

    Floats are rejected on purpose: admitting one would silently poison the
    exactness guarantee everything downstream relies on.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rational scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise TypeError(
            f"refusing float {value!r}: the core is exact; pass a Fraction, "
            "int, or 'p/q' string"
        )
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(value: Rational) -> str:
    """Exact wire format ``p/q``, with ``/q`` omitted when q = 1."""
    return str(as_rational(value))


def parse_rational(text: str) -> Rational:
    """Inverse of :func:`format_rational`; accepts only ``p`` or ``p/q``."""
    if not isinstance(text, str) or not _RATIONAL_RE.match(text.strip()):
        raise ValueError(f"not an exact rational literal: {text!r}")
    return Fraction(text.strip())


def _coerce_coords(values: Iterable[RationalInput], kind: str) -> tuple[Rational, ...]:
    coords = tuple(as_rational(v) for v in values)
    if not coords:
        raise ValueError(f"a {kind} needs at least one coordinate")
    return coords


@dataclass(frozen=True)
class Vector:
    """Immutable point of an N-section, N = len(coords)."""

    coords: tuple[Rational, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", _coerce_coords(self.coords, "vector"))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[Rational]:
        return iter(self.coords)

    def coord(self, j: int) -> Rational:
        """1-based coordinate x_j."""
        if not 1 <= j <= len(self.coords):
            raise IndexError(f"coordinate {j} outside 1..{len(self.coords)}")
        return self.coords[j - 1]

    def replace_coord(self, j: int, value: RationalInput) -> "Vector":
        if not 1 <= j <= len(self.coords):
            raise IndexError(f"coordinate {j} outside 1..{len(self.coords)}")
        coords = list(self.coords)
        coords[j - 1] = as_rational(value)
        return Vector(tuple(coords))

    def embed(self, n: int) -> "Vector":
        """Zero-pad into the n-section (n >= current length)."""
        if n < len(self.coords):
            raise ValueError(f"cannot embed a {len(self.coords)}-vector into {n} coordinates")
        return Vector(self.coords + (Fraction(0),) * (n - len(self.coords)))

    def __add__(self, other: "Vector") -> "Vector":
        _check_same_length(self, other)
        return Vector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Vector") -> "Vector":
        _check_same_length(self, other)
        return Vector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Vector":
        return Vector(tuple(-a for a in self.coords))

    def __rmul__(self, scalar: RationalInput) -> "Vector":
        c = as_rational(scalar)
        return Vector(tuple(c * a for a in self.coords))

    def serialize(self) -> list[str]:
        return [format_rational(c) for c in self.coords]


@dataclass(frozen=True)
class Covector:
    """Immutable functional on an N-section; acts by the exact dot product."""

    coeffs: tuple[Rational, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _coerce_coords(self.coeffs, "covector"))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[Rational]:
        return iter(self.coeffs)

    def coeff(self, j: int) -> Rational:
        """1-based coefficient g_j."""
        if not 1 <= j <= len(self.coeffs):
            raise IndexError(f"coefficient {j} outside 1..{len(self.coeffs)}")
        return self.coeffs[j - 1]

    def replace_coeff(self, j: int, value: RationalInput) -> "Covector":
        if not 1 <= j <= len(self.coeffs):
            raise IndexError(f"coefficient {j} outside 1..{len(self.coeffs)}")
        coeffs = list(self.coeffs)
        coeffs[j - 1] = as_rational(value)
        return Covector(tuple(coeffs))

    def __call__(self, x: Vector) -> Rational:
        return evaluate(self, x)

    def serialize(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]


def _check_same_length(a, b) -> None:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")


def vector(values: Iterable[RationalInput]) -> Vector:
    return Vector(tuple(values))


def covector(values: Iterable[RationalInput]) -> Covector:
    return Covector(tuple(values))


def zero_vector(n: int) -> Vector:
    if n < 1:
        raise ValueError("sections have dimension >= 1")
    return Vector((Fraction(0),) * n)


def basis_vector(j: int, n: int) -> Vector:
    """e_j in the n-section (1-based)."""
    if not 1 <= j <= n:
        raise ValueError(f"basis index {j} outside 1..{n}")
    return Vector(tuple(Fraction(1 if i == j else 0) for i in range(1, n + 1)))


def sup_norm(x: Vector) -> Rational:
    """max_j |x_j| — the norm of the ambient sup-norm section."""
    return max(abs(c) for c in x.coords)


def dual_norm_l1(g: Covector) -> Rational:
    """sum_j |g_j| — the exact functional norm on a sup-norm section."""
    return sum((abs(c) for c in g.coeffs), Fraction(0))


def evaluate(g: Covector, x: Vector) -> Rational:
    """Exact pairing g(x) = sum_j g_j x_j; lengths must agree."""
    _check_same_length(g, x)
    return sum((a * b for a, b in zip(g.coeffs, x.coords)), Fraction(0))

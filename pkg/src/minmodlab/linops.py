"""Structured linear operators on N-sections.

Operators are immutable trees built from six node kinds: ``Dense``,
``Identity``, ``Diagonal``, ``RankOne``, ``Sum``, ``Scaled``.  Application
is structure-aware (a rank-one node applies in O(N) without ever forming
its matrix); ``materialize`` flattens any tree to its dense matrix, and
the sup-operator norm is the maximal row l1 sum of that matrix, together
with a sign-vector witness attaining it.

All nodes are square: dimension discipline is strict and mismatches raise
``ValueError`` instead of broadcasting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactnum import (
    Covector,
    Rational,
    RationalInput,
    Vector,
    as_rational,
    evaluate,
)

Row = tuple[Rational, ...]
Matrix = tuple[Row, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Operator:
    """Base class for operator nodes; not instantiated directly."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def apply(self, x: Vector) -> Vector:
        raise NotImplementedError

    def rows(self) -> Matrix:
        raise NotImplementedError

    def _check_arg(self, x: Vector) -> None:
        if len(x) != self.dim:
            raise ValueError(f"dimension mismatch: operator is {self.dim}, vector is {len(x)}")


@dataclass(frozen=True)
class Dense(Operator):
    """Explicit square matrix, stored row-major."""

    entries: Matrix

    def __post_init__(self) -> None:
        rows = tuple(tuple(as_rational(e) for e in row) for row in self.entries)
        n = len(rows)
        if n == 0:
            raise ValueError("a dense operator needs at least one row")
        for row in rows:
            if len(row) != n:
                raise ValueError(f"dense operator must be square: got a row of length {len(row)} in dimension {n}")
        object.__setattr__(self, "entries", rows)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def apply(self, x: Vector) -> Vector:
        self._check_arg(x)
        return Vector(
            tuple(sum((a * b for a, b in zip(row, x.coords)), _ZERO) for row in self.entries)
        )

    def rows(self) -> Matrix:
        return self.entries


@dataclass(frozen=True)
class Identity(Operator):
    """x -> x on the n-section."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("sections have dimension >= 1")

    @property
    def dim(self) -> int:
        return self.n

    def apply(self, x: Vector) -> Vector:
        self._check_arg(x)
        return x

    def rows(self) -> Matrix:
        return tuple(
            tuple(_ONE if i == j else _ZERO for j in range(self.n)) for i in range(self.n)
        )


@dataclass(frozen=True)
class Diagonal(Operator):
    """Coordinatewise multiplication by a fixed vector."""

    diag: Vector

    @property
    def dim(self) -> int:
        return len(self.diag)

    def apply(self, x: Vector) -> Vector:
        self._check_arg(x)
        return Vector(tuple(d * c for d, c in zip(self.diag.coords, x.coords)))

    def rows(self) -> Matrix:
        n = self.dim
        return tuple(
            tuple(self.diag.coords[i] if i == j else _ZERO for j in range(n)) for i in range(n)
        )


@dataclass(frozen=True)
class RankOne(Operator):
    """x -> functional(x) * direction; applies in O(N)."""

    direction: Vector
    functional: Covector

    def __post_init__(self) -> None:
        if len(self.direction) != len(self.functional):
            raise ValueError(
                f"dimension mismatch: direction is {len(self.direction)}, "
                f"functional is {len(self.functional)}"
            )

    @property
    def dim(self) -> int:
        return len(self.direction)

    def apply(self, x: Vector) -> Vector:
        self._check_arg(x)
        s = evaluate(self.functional, x)
        return Vector(tuple(s * u for u in self.direction.coords))

    def rows(self) -> Matrix:
        g = self.functional.coeffs
        return tuple(tuple(u * gj for gj in g) for u in self.direction.coords)


@dataclass(frozen=True)
class Sum(Operator):
    """Pointwise sum of same-dimension operators."""

    parts: tuple[Operator, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("a sum needs at least one part")
        dims = {p.dim for p in self.parts}
        if len(dims) != 1:
            raise ValueError(f"dimension mismatch in sum: {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def apply(self, x: Vector) -> Vector:
        self._check_arg(x)
        out = self.parts[0].apply(x)
        for p in self.parts[1:]:
            out = out + p.apply(x)
        return out

    def rows(self) -> Matrix:
        acc = [list(row) for row in self.parts[0].rows()]
        for p in self.parts[1:]:
            for i, row in enumerate(p.rows()):
                for j, e in enumerate(row):
                    acc[i][j] += e
        return tuple(tuple(row) for row in acc)


@dataclass(frozen=True)
class Scaled(Operator):
    """factor * inner."""

    factor: Rational
    inner: Operator

    def __post_init__(self) -> None:
        object.__setattr__(self, "factor", as_rational(self.factor))

    @property
    def dim(self) -> int:
        return self.inner.dim

    def apply(self, x: Vector) -> Vector:
        return self.factor * self.inner.apply(x)

    def rows(self) -> Matrix:
        return tuple(tuple(self.factor * e for e in row) for row in self.inner.rows())


def add(*operators: Operator) -> Operator:
    """Lazy sum node; dimensions must agree."""
    if len(operators) == 1:
        return operators[0]
    return Sum(tuple(operators))


def scale(factor: RationalInput, operator: Operator) -> Operator:
    return Scaled(as_rational(factor), operator)


def zero_operator(n: int) -> Dense:
    return Dense(tuple((_ZERO,) * n for _ in range(n)))


def materialize(operator: Operator) -> Dense:
    """Flatten to a dense matrix; already-dense operators pass through."""
    if isinstance(operator, Dense):
        return operator
    return Dense(operator.rows())


def op_norm_sup(operator: Operator) -> Rational:
    """Exact operator norm for the sup norm: max row l1 sum."""
    return op_norm_witness(operator)[0]


def op_norm_witness(operator: Operator) -> tuple[Rational, Vector]:
    """(norm, x) with sup_norm(x) = 1 and sup_norm(T x) = norm.

    x is the sign vector of the first row attaining the maximal l1 sum
    (zero entries get +1), which makes the witness deterministic.
    """
    rows = materialize(operator).entries
    best = None
    best_row = None
    for i, row in enumerate(rows):
        s = sum((abs(e) for e in row), _ZERO)
        if best is None or s > best:
            best = s
            best_row = row
    signs = tuple(_ONE if e >= 0 else -_ONE for e in best_row)
    return best, Vector(signs)

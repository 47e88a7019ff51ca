"""Shared test helpers: exact random generators and an independent
vertex-enumeration optimum used to cross-check the simplex.

Everything stays rational; random draws go through ``random.Random`` with
explicit seeds so failures replay.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Optional

from minmodlab.exactnum import Vector
from minmodlab.linops import Dense, Diagonal, Identity, Operator, RankOne, Scaled, Sum
from minmodlab.lpsolve import LinearProgram, LPStatus, Relation, linear_program, solve


def small_fraction(rng: random.Random, span: int = 8) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.choice((1, 2, 4, 8)))


def random_sphere_point(rng: random.Random, n: int, denominator: int = 64) -> Vector:
    """Exact random point with sup norm exactly 1."""
    coords = [Fraction(rng.randint(-denominator, denominator), denominator) for _ in range(n)]
    pin = rng.randrange(n)
    coords[pin] = Fraction(rng.choice((-1, 1)))
    return Vector(tuple(coords))


def random_structured_operator(rng: random.Random, n: int, depth: int = 2) -> Operator:
    """Random operator tree mixing every node kind."""
    kinds = ["dense", "diagonal", "rankone", "identity"]
    if depth > 0:
        kinds += ["sum", "scaled"]
    kind = rng.choice(kinds)
    if kind == "dense":
        return Dense(tuple(tuple(small_fraction(rng, 4) for _ in range(n)) for _ in range(n)))
    if kind == "diagonal":
        return Diagonal(Vector(tuple(small_fraction(rng, 4) for _ in range(n))))
    if kind == "rankone":
        u = Vector(tuple(small_fraction(rng, 4) for _ in range(n)))
        from minmodlab.exactnum import Covector

        g = Covector(tuple(small_fraction(rng, 4) for _ in range(n)))
        return RankOne(u, g)
    if kind == "identity":
        return Identity(n)
    if kind == "sum":
        return Sum(
            (
                random_structured_operator(rng, n, depth - 1),
                random_structured_operator(rng, n, depth - 1),
            )
        )
    return Scaled(small_fraction(rng, 3), random_structured_operator(rng, n, depth - 1))


def solve_square(rows: list[list[Fraction]], rhs: list[Fraction]) -> Optional[list[Fraction]]:
    """Exact Gaussian elimination; None when the system is singular."""
    n = len(rows)
    a = [list(row) + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col]
        a[col] = [e / inv for e in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [e - f * p for e, p in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def enumerate_box_lp_optimum(lp: LinearProgram) -> Optional[tuple[Fraction, tuple]]:
    """Exact optimum of a fully-boxed program by vertex enumeration.

    Requires every variable bound finite (the feasible set is compact, so
    the optimum sits at a vertex: n linearly independent active
    conditions).  Returns None when no feasible vertex exists, which for a
    compact region means the program is infeasible.
    """
    n = lp.num_vars
    assert all(b is not None for b in lp.lower + lp.upper)
    conditions: list[tuple[list[Fraction], Fraction]] = []
    for con in lp.constraints:
        conditions.append((list(con.coeffs), con.rhs))
    for j in range(n):
        unit = [Fraction(1 if t == j else 0) for t in range(n)]
        conditions.append((unit, lp.lower[j]))
        conditions.append((unit, lp.upper[j]))

    def feasible(point) -> bool:
        for j in range(n):
            if point[j] < lp.lower[j] or point[j] > lp.upper[j]:
                return False
        for con in lp.constraints:
            lhs = sum(c * x for c, x in zip(con.coeffs, point))
            if con.relation is Relation.LE and lhs > con.rhs:
                return False
            if con.relation is Relation.GE and lhs < con.rhs:
                return False
            if con.relation is Relation.EQ and lhs != con.rhs:
                return False
        return True

    best: Optional[tuple[Fraction, tuple]] = None
    for combo in itertools.combinations(range(len(conditions)), n):
        rows = [conditions[i][0] for i in combo]
        rhs = [conditions[i][1] for i in combo]
        point = solve_square(rows, rhs)
        if point is None or not feasible(point):
            continue
        value = sum(c * x for c, x in zip(lp.objective, point))
        if best is None or value < best[0]:
            best = (value, tuple(point))
    return best


def random_boxed_lp(rng: random.Random, n: int) -> LinearProgram:
    """Random program with finite box bounds (compact feasible set)."""
    objective = [small_fraction(rng, 4) for _ in range(n)]
    bounds = []
    for _ in range(n):
        lo = Fraction(rng.randint(-4, 0), rng.choice((1, 2)))
        up = lo + Fraction(rng.randint(1, 6), rng.choice((1, 2)))
        bounds.append((lo, up))
    constraints = []
    for _ in range(rng.randint(0, 3)):
        coeffs = [small_fraction(rng, 3) for _ in range(n)]
        relation = rng.choice(("<=", ">=", "="))
        rhs = small_fraction(rng, 4)
        constraints.append((coeffs, relation, rhs))
    return linear_program(objective, constraints, bounds)


def lp_agrees_with_enumeration(lp: LinearProgram) -> bool:
    """True when the simplex and the vertex enumeration tell the same story."""
    result = solve(lp)
    reference = enumerate_box_lp_optimum(lp)
    if result.status is LPStatus.INFEASIBLE:
        return reference is None
    if result.status is not LPStatus.OPTIMAL:
        return False  # boxed programs cannot be unbounded
    return reference is not None and result.value == reference[0]

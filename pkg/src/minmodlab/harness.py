"""Experiment harness: studies, diagnostics, search, and report emission.

Four experiments over the exact core:

* ``convergence_study`` — per-section minimum moduli against the closed
  form, with witness-tail statistics and the gap to the limit 1/2;
* ``non_attainment_profile`` — the shape every exact minimizer is forced
  into (first coordinate pinned at modulus 1, tail strictly inside);
* ``weak_null_test`` — coordinatewise verdict on a finite vector family:
  an exact not-weakly-null certificate when one exists, a conservative
  weakly-null heuristic otherwise;
* ``rank_one_search`` — seeded deterministic coordinate ascent for a
  norm-capped rank-one perturbation that lifts the minimum modulus.

Reports are byte-identical for identical inputs: no timestamps unless
asked, rationals in exact ``p/q`` form, approximations only as clearly
labeled opt-in extra columns.
"""

from __future__ import annotations

import enum
import io
import json
import random
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .constructions import c0_family, closed_form_min_modulus
from .exactnum import (
    Covector,
    Rational,
    RationalInput,
    Vector,
    as_rational,
    format_rational,
    sup_norm,
)
from .linops import Operator, RankOne, add, op_norm_sup, zero_operator
from .minmod import min_modulus_sup

SCHEMA_VERSION = 1

_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)


class InvariantViolation(AssertionError):
    """An exact relation the harness promises was observed to fail."""


@dataclass(frozen=True)
class HarnessConfig:
    """Knobs shared by the studies; defaults suit desk-scale sections."""

    lp_dimension_budget: int = 64
    oracle_point_budget: int = 500_000
    search_iterations: int = 200
    search_initial_step: Rational = Fraction(1, 2)
    search_min_step: Rational = Fraction(1, 64)


DEFAULT_CONFIG = HarnessConfig()


# ---------------------------------------------------------------------------
# convergence of the truncation law


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    value: Rational
    closed_form: Rational
    witness_min_tail: Rational
    witness_max_tail: Rational
    gap: Rational


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    n_min: int
    n_max: int
    partial: bool

    def to_report(self) -> "Report":
        header = [
            ("n_min", str(self.n_min)),
            ("n_max", str(self.n_max)),
            ("partial", "true" if self.partial else "false"),
        ]
        return Report(
            kind="convergence",
            header=tuple(header),
            columns=("N", "m_N", "closed_form", "witness_min_tail", "witness_max_tail", "gap"),
            rows=tuple(
                (r.n, r.value, r.closed_form, r.witness_min_tail, r.witness_max_tail, r.gap)
                for r in self.rows
            ),
        )


def convergence_study(
    n_min: int, n_max: int, *, config: HarnessConfig = DEFAULT_CONFIG
) -> ConvergenceReport:
    """Exact m(T) per section against the closed form 1/(2 - 2^(1-N)).

    Every row re-proves the exact relations (value equals the closed form,
    0 < gap <= 2^-N, gaps strictly decrease); violations raise
    :class:`InvariantViolation` rather than producing a quiet bad row.
    Sections beyond ``config.lp_dimension_budget`` are not attempted: the
    report comes back flagged partial with every completed row intact.
    """
    if n_min < 2:
        raise ValueError("the study starts at dimension 2 (dimension 1 has no tail)")
    if n_max < n_min:
        raise ValueError("empty study range")
    limit = min(n_max, config.lp_dimension_budget)
    rows = []
    previous_gap: Optional[Rational] = None
    for n in range(n_min, limit + 1):
        family = c0_family(n)
        result = min_modulus_sup(family.operator)
        expected = closed_form_min_modulus(n)
        if result.value != expected:
            raise InvariantViolation(f"m at N={n} is {result.value}, closed form {expected}")
        tail = [abs(c) for c in result.witness.coords[1:]]
        gap = result.value - _HALF
        if gap <= 0 or gap > Fraction(1, 2**n):
            raise InvariantViolation(f"gap at N={n} out of range: {gap}")
        if previous_gap is not None and gap >= previous_gap:
            raise InvariantViolation(f"gap failed to shrink at N={n}")
        previous_gap = gap
        rows.append(
            ConvergenceRow(
                n=n,
                value=result.value,
                closed_form=expected,
                witness_min_tail=min(tail),
                witness_max_tail=max(tail),
                gap=gap,
            )
        )
    return ConvergenceReport(
        rows=tuple(rows), n_min=n_min, n_max=n_max, partial=limit < n_max
    )


# ---------------------------------------------------------------------------
# non-attainment profile


@dataclass(frozen=True)
class ProfileRow:
    n: int
    first_modulus: Rational
    tail_min: Rational
    tail_max: Rational
    tail_clearance: Rational  # how far the tail sits above the limit 1/2


@dataclass(frozen=True)
class ProfileReport:
    rows: tuple[ProfileRow, ...]

    def to_report(self) -> "Report":
        return Report(
            kind="non-attainment-profile",
            header=(),
            columns=("N", "first_modulus", "tail_min", "tail_max", "tail_clearance"),
            rows=tuple(
                (r.n, r.first_modulus, r.tail_min, r.tail_max, r.tail_clearance)
                for r in self.rows
            ),
        )


def non_attainment_profile(
    n_values: Iterable[int], *, config: HarnessConfig = DEFAULT_CONFIG
) -> ProfileReport:
    """Shape statistics of the exact minimizers across sections.

    Any minimizer must pin its first coordinate at modulus 1 while the
    tail stays strictly between 1/2 and 1 — the tension that prevents a
    limiting minimizer from existing.  A witness outside that shape raises
    :class:`InvariantViolation`.
    """
    rows = []
    for n in n_values:
        if n < 2:
            raise ValueError("profiles need dimension >= 2")
        if n > config.lp_dimension_budget:
            raise ValueError(f"dimension {n} exceeds the LP budget {config.lp_dimension_budget}")
        result = min_modulus_sup(c0_family(n).operator)
        first = abs(result.witness.coord(1))
        if first != _ONE:
            raise InvariantViolation(f"minimizer at N={n} has |x_1| = {first} != 1")
        tail = [abs(c) for c in result.witness.coords[1:]]
        tail_min = min(tail)
        tail_max = max(tail)
        if not (_HALF < tail_min and tail_max < _ONE):
            raise InvariantViolation(f"minimizer tail at N={n} escapes (1/2, 1)")
        rows.append(
            ProfileRow(
                n=n,
                first_modulus=first,
                tail_min=tail_min,
                tail_max=tail_max,
                tail_clearance=tail_min - _HALF,
            )
        )
    return ProfileReport(rows=tuple(rows))


# ---------------------------------------------------------------------------
# weak-null diagnostics


class WeakNullStatus(enum.Enum):
    WEAKLY_NULL = "weakly-null"
    NOT_WEAKLY_NULL = "not-weakly-null"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CoordinateStat:
    coordinate: int
    min_modulus: Rational
    max_modulus: Rational
    last_modulus: Rational


@dataclass(frozen=True)
class WeakNullVerdict:
    status: WeakNullStatus
    coordinate: Optional[int]  # certificate coordinate for not-weakly-null
    bound: Optional[Rational]  # beta with |x_n(coordinate)| >= beta > 0
    threshold: Rational
    family_size: int
    ambient_dim: int
    stats: tuple[CoordinateStat, ...]

    def to_report(self) -> "Report":
        header = [
            ("status", self.status.value),
            ("coordinate", "" if self.coordinate is None else str(self.coordinate)),
            ("bound", "" if self.bound is None else format_rational(self.bound)),
            ("threshold", format_rational(self.threshold)),
            ("family_size", str(self.family_size)),
            ("ambient_dim", str(self.ambient_dim)),
        ]
        return Report(
            kind="weak-null",
            header=tuple(header),
            columns=("coordinate", "min_modulus", "max_modulus", "last_modulus"),
            rows=tuple(
                (s.coordinate, s.min_modulus, s.max_modulus, s.last_modulus)
                for s in self.stats
            ),
        )


def weak_null_test(
    family: Sequence[Vector], *, threshold: RationalInput = 0
) -> WeakNullVerdict:
    """Coordinatewise weak-null verdict for a finite family.

    Exact certificate first: if some coordinate j keeps modulus >= beta
    with beta > threshold across the whole family, the family is
    NOT_WEAKLY_NULL with (j, beta) exhibited (largest beta; ties to the
    lowest j).  Otherwise a conservative heuristic: the family counts as
    WEAKLY_NULL when every coordinate is transient — its above-threshold
    appearances are empty, a single spike, or stop before the family does.
    Anything else is INCONCLUSIVE.  On a finite window a genuinely
    weakly-null (coordinatewise vanishing) tail looks exactly transient,
    while a persistent coordinate can never be explained away.
    """
    if not family:
        raise ValueError("the family must be nonempty")
    thr = as_rational(threshold)
    if thr < 0:
        raise ValueError("threshold must be nonnegative")
    ambient = max(len(x) for x in family)
    size = len(family)

    stats = []
    best: Optional[tuple[Rational, int]] = None
    all_transient = True
    for j in range(1, ambient + 1):
        moduli = [abs(x.coord(j)) if j <= len(x) else _ZERO for x in family]
        lo = min(moduli)
        stats.append(CoordinateStat(j, lo, max(moduli), moduli[-1]))
        if lo > thr:
            if best is None or lo > best[0]:
                best = (lo, j)
            all_transient = False
            continue
        loud = [i for i, m in enumerate(moduli) if m > thr]
        transient = len(loud) <= 1 or loud[-1] < size - 1
        if not transient:
            all_transient = False

    if best is not None:
        status = WeakNullStatus.NOT_WEAKLY_NULL
        coordinate: Optional[int] = best[1]
        bound: Optional[Rational] = best[0]
    elif all_transient:
        status = WeakNullStatus.WEAKLY_NULL
        coordinate = None
        bound = None
    else:
        status = WeakNullStatus.INCONCLUSIVE
        coordinate = None
        bound = None
    return WeakNullVerdict(
        status=status,
        coordinate=coordinate,
        bound=bound,
        threshold=thr,
        family_size=size,
        ambient_dim=ambient,
        stats=tuple(stats),
    )


# ---------------------------------------------------------------------------
# rank-one perturbation search


@dataclass(frozen=True)
class SearchOutcome:
    """Best rank-one perturbation found, with its independently recomputed score."""

    perturbation: RankOne
    norm: Rational
    base_value: Rational
    perturbed_value: Rational
    gain: Rational
    iterations: int
    seed: int
    evaluations: int

    def to_report(self) -> "Report":
        header = [
            ("base_value", format_rational(self.base_value)),
            ("perturbed_value", format_rational(self.perturbed_value)),
            ("gain", format_rational(self.gain)),
            ("perturbation_norm", format_rational(self.norm)),
            ("iterations", str(self.iterations)),
            ("seed", str(self.seed)),
            ("evaluations", str(self.evaluations)),
            ("direction", " ".join(self.perturbation.direction.serialize())),
            ("functional", " ".join(self.perturbation.functional.serialize())),
        ]
        rows = tuple(
            (j + 1, u, g)
            for j, (u, g) in enumerate(
                zip(self.perturbation.direction.coords, self.perturbation.functional.coeffs)
            )
        )
        return Report(
            kind="rank-one-search",
            header=tuple(header),
            columns=("coordinate", "direction", "functional"),
            rows=rows,
        )


def _zero_rank_one(n: int) -> RankOne:
    return RankOne(Vector((_ONE,) + (_ZERO,) * (n - 1)), Covector((_ZERO,) * n))


def rank_one_search(
    T: Operator,
    norm_budget: RationalInput,
    *,
    seed: int,
    iterations: Optional[int] = None,
    config: HarnessConfig = DEFAULT_CONFIG,
) -> SearchOutcome:
    """Seeded coordinate ascent for a rank-one K with op_norm_sup(K) <= budget.

    The state is (u, g) for K = u (x) g, kept normalized to sup_norm(u) = 1
    with the l1 norm of g capped at the budget, so the norm constraint holds
    by construction at every step.  Proposals move one coordinate by the
    current step (round-robin over u then g, +step before -step), scored by
    the exact facet-LP minimum modulus of T + K; the step halves after a
    full stalled round and a fresh random restart replaces it when it
    underflows.  Identical seeds give identical outcomes, and the reported
    score is recomputed from the returned perturbation alone.
    """
    budget = as_rational(norm_budget)
    if budget < 0:
        raise ValueError("the norm budget must be nonnegative")
    iters = config.search_iterations if iterations is None else iterations
    if iters < 0:
        raise ValueError("iterations must be nonnegative")
    n = T.dim
    base = min_modulus_sup(T).value

    if budget == 0 or iters == 0:
        k0 = _zero_rank_one(n)
        return SearchOutcome(
            perturbation=k0,
            norm=_ZERO,
            base_value=base,
            perturbed_value=base,
            gain=_ZERO,
            iterations=0,
            seed=seed,
            evaluations=0,
        )

    rng = random.Random(seed)
    evaluations = 0

    def normalized(u: tuple, g: tuple):
        peak = max(abs(c) for c in u)
        if peak == 0:
            return None
        u2 = tuple(c / peak for c in u)
        g2 = tuple(c * peak for c in g)
        weight = sum((abs(c) for c in g2), _ZERO)
        if weight > budget:
            shrink = budget / weight
            g2 = tuple(c * shrink for c in g2)
        return u2, g2

    def score(u: tuple, g: tuple) -> Rational:
        nonlocal evaluations
        evaluations += 1
        return min_modulus_sup(add(T, RankOne(Vector(u), Covector(g)))).value

    def random_state():
        while True:
            u = tuple(Fraction(rng.randint(-8, 8), 8) for _ in range(n))
            g = tuple(Fraction(rng.randint(-8, 8), 8) for _ in range(n))
            if any(u) and any(g):
                state = normalized(u, g)
                if state is not None:
                    return state

    u, g = random_state()
    current = score(u, g)
    best_u, best_g, best_score = u, g, current
    step = config.search_initial_step
    stall = 0
    round_length = 2 * n

    for it in range(iters):
        slot = it % round_length
        proposals = []
        if slot < n:
            for sgn in (1, -1):
                moved = list(u)
                moved[slot] += sgn * step
                state = normalized(tuple(moved), g)
                if state is not None:
                    proposals.append(state)
        else:
            jj = slot - n
            for sgn in (1, -1):
                moved = list(g)
                moved[jj] += sgn * step
                state = normalized(u, tuple(moved))
                if state is not None:
                    proposals.append(state)

        chosen = None
        chosen_score = current
        for state in proposals:
            s = score(*state)
            if s > chosen_score:
                chosen = state
                chosen_score = s
        if chosen is not None:
            u, g = chosen
            current = chosen_score
            stall = 0
            if current > best_score:
                best_u, best_g, best_score = u, g, current
        else:
            stall += 1
            if stall >= round_length:
                stall = 0
                step = step / 2
                if step < config.search_min_step:
                    u, g = random_state()
                    current = score(u, g)
                    step = config.search_initial_step
                    if current > best_score:
                        best_u, best_g, best_score = u, g, current

    perturbation = RankOne(Vector(best_u), Covector(best_g))
    recomputed = min_modulus_sup(add(T, perturbation)).value
    if recomputed != best_score:
        raise InvariantViolation("search score disagrees with its recomputation")
    return SearchOutcome(
        perturbation=perturbation,
        norm=op_norm_sup(perturbation),
        base_value=base,
        perturbed_value=recomputed,
        gain=recomputed - base,
        iterations=iters,
        seed=seed,
        evaluations=evaluations,
    )


# ---------------------------------------------------------------------------
# report emission


Cell = Union[Rational, int, str]


@dataclass(frozen=True)
class Report:
    """Uniform emission surface: a kind, header pairs, columns, rows."""

    kind: str
    header: tuple[tuple[str, str], ...]
    columns: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]

    def to_report(self) -> "Report":
        return self


def _approx12(value: Rational) -> str:
    # 12 decimal places, banker's rounding; used only for labeled extras
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(value.numerator) / Decimal(value.denominator)
        return str(d.quantize(Decimal("1.000000000000")))


def _render_cell(cell: Cell) -> Union[str, int]:
    if isinstance(cell, Fraction):
        return format_rational(cell)
    if isinstance(cell, int):
        return cell
    return str(cell)


def emit_report(
    source,
    fmt: str = "csv",
    destination: Union[str, Path, io.TextIOBase, None] = None,
    *,
    extra_header: Iterable[tuple[str, str]] = (),
    approx: bool = False,
    timestamp: bool = False,
) -> str:
    """Serialize a report (or anything with ``to_report``) to csv or json.

    Output is byte-identical for identical inputs; a generation timestamp
    appears only when ``timestamp=True``, and decimal approximations only
    when ``approx=True`` (as additional ``*_approx12`` columns).  Returns
    the rendered text; ``destination`` may be a path or open text file.
    """
    report: Report = source.to_report()
    header = list(extra_header) + list(report.header)
    header.insert(0, ("kind", report.kind))
    if timestamp:
        import datetime

        header.append(
            ("generated_at", datetime.datetime.now(datetime.timezone.utc).isoformat())
        )
    if approx:
        header.append(("approx_note", "columns suffixed _approx12 are rounded to 12 places"))

    approx_cols = []
    if approx:
        for idx, name in enumerate(report.columns):
            if any(isinstance(row[idx], Fraction) for row in report.rows):
                approx_cols.append(idx)

    if fmt == "csv":
        out = io.StringIO()
        out.write(f"# schema_version={SCHEMA_VERSION}\n")
        for key, value in header:
            out.write(f"# {key}={value}\n")
        columns = list(report.columns)
        for idx in approx_cols:
            columns.append(report.columns[idx] + "_approx12")
        out.write(",".join(columns) + "\n")
        for row in report.rows:
            cells = [str(_render_cell(c)) for c in row]
            for idx in approx_cols:
                cells.append(_approx12(row[idx]) if isinstance(row[idx], Fraction) else "")
            out.write(",".join(cells) + "\n")
        text = out.getvalue()
    elif fmt == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "kind": report.kind,
            "header": {key: value for key, value in header if key != "kind"},
            "columns": list(report.columns),
            "rows": [[_render_cell(c) for c in row] for row in report.rows],
        }
        if approx_cols:
            payload["approx12"] = {
                report.columns[idx]: [
                    _approx12(row[idx]) if isinstance(row[idx], Fraction) else None
                    for row in report.rows
                ]
                for idx in approx_cols
            }
        text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r} (use 'csv' or 'json')")

    if destination is None:
        return text
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)
    return text

"""Exact linear programming over the rationals.

A dense two-phase primal simplex with Bland's anti-cycling rule.  All
arithmetic is exact; no floats ever enter the tableau.  Internally the
solver uses ``gmpy2.mpq`` when available (same semantics as ``Fraction``,
several times faster); every public value is a ``Fraction``.

Solutions come with certificates.  An optimal solution carries the dual
vector and reduced costs, and is re-verified exactly (primal and dual
feasibility, complementary slackness, and equality of the primal and dual
objectives) before it is returned.  An infeasible program carries a Farkas
multiplier vector over its constraints which :func:`verify_infeasibility`
checks by pure substitution.

Dual sign conventions, stated for a minimization (mirror-imaged for a
maximization): multipliers are <= 0 on ``<=`` rows, >= 0 on ``>=`` rows,
free on ``=`` rows.  The reduced cost of a variable is
``c_j - sum_i y_i a_ij``; it must vanish for a free variable, and for a
bounded variable its sign pins the variable to the matching bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

try:  # pragma: no cover - exercised implicitly by the whole suite
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

from .errors import InputError, InternalCheckError
from .rational import parse_rational

__all__ = [
    "MINIMIZE",
    "MAXIMIZE",
    "LESS_EQUAL",
    "EQUAL",
    "GREATER_EQUAL",
    "OPTIMAL",
    "INFEASIBLE",
    "UNBOUNDED",
    "LinearProgram",
    "LpSolution",
    "solve_lp",
    "verify_optimal",
    "verify_infeasibility",
]

MINIMIZE = "min"
MAXIMIZE = "max"
LESS_EQUAL = "<="
EQUAL = "="
GREATER_EQUAL = ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_RELATIONS = (LESS_EQUAL, EQUAL, GREATER_EQUAL)
_MAX_PIVOTS = 2_000_000  # defensive only; Bland's rule precludes cycling

Constraint = tuple[tuple[Fraction, ...], str, Fraction]


def _rat_tuple(values: Iterable[object]) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in values)


def _opt_rat_tuple(
    values: Optional[Sequence[object]], n: int
) -> tuple[Optional[Fraction], ...]:
    if values is None:
        return (None,) * n
    return tuple(None if v is None else parse_rational(v) for v in values)


@dataclass(frozen=True)
class LinearProgram:
    """A linear program in general form.

    ``constraints`` is a sequence of ``(coefficients, relation, rhs)``
    triples with relation one of ``"<="``, ``"="``, ``">="``.  Bounds are
    per-variable and optional; an absent bound means that side is
    unconstrained.
    """

    objective: tuple[Fraction, ...]
    sense: str = MINIMIZE
    constraints: tuple[Constraint, ...] = ()
    lower: tuple[Optional[Fraction], ...] = ()
    upper: tuple[Optional[Fraction], ...] = ()

    def __post_init__(self) -> None:
        obj = _rat_tuple(self.objective)
        object.__setattr__(self, "objective", obj)
        n = len(obj)
        if self.sense not in (MINIMIZE, MAXIMIZE):
            raise InputError(f"unknown sense {self.sense!r}")
        rows = []
        for idx, row in enumerate(self.constraints):
            try:
                coeffs, rel, rhs = row
            except (TypeError, ValueError) as exc:
                raise InputError(f"constraint {idx} is not a triple") from exc
            coeffs = _rat_tuple(coeffs)
            if len(coeffs) != n:
                raise InputError(
                    f"constraint {idx} has {len(coeffs)} coefficients, "
                    f"expected {n}"
                )
            if rel not in _RELATIONS:
                raise InputError(f"constraint {idx}: unknown relation {rel!r}")
            rows.append((coeffs, rel, parse_rational(rhs)))
        object.__setattr__(self, "constraints", tuple(rows))
        lower = _opt_rat_tuple(self.lower or None, n)
        upper = _opt_rat_tuple(self.upper or None, n)
        if len(lower) != n or len(upper) != n:
            raise InputError("bound vectors must match the variable count")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n_variables(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpSolution:
    """Outcome of :func:`solve_lp`.

    ``primal``, ``dual``, ``reduced_costs`` and ``objective_value`` are
    populated exactly when ``status == "optimal"``; ``farkas`` carries the
    infeasibility certificate (one multiplier per constraint) when
    ``status == "infeasible"`` and the conflict involves the constraints
    (a pure bound contradiction such as ``3 <= x <= 2`` has no such
    certificate and leaves the field empty).
    """

    status: str
    objective_value: Optional[Fraction] = None
    primal: Optional[tuple[Fraction, ...]] = None
    dual: Optional[tuple[Fraction, ...]] = None
    reduced_costs: Optional[tuple[Fraction, ...]] = None
    farkas: Optional[tuple[Fraction, ...]] = None


def _to_q(x: Fraction):
    return _Q(x.numerator, x.denominator)


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _pivot(tableau: list[list], objrow: list, basis: list[int], r: int, c: int) -> None:
    prow = tableau[r]
    piv = prow[c]
    if piv != 1:
        inv = 1 / piv
        for k, v in enumerate(prow):
            if v:
                prow[k] = v * inv
    nonzero = [k for k, v in enumerate(prow) if v]
    for row in tableau:
        if row is prow:
            continue
        f = row[c]
        if f:
            for k in nonzero:
                row[k] -= f * prow[k]
    f = objrow[c]
    if f:
        for k in nonzero:
            objrow[k] -= f * prow[k]
    basis[r] = c


def _run_simplex(
    tableau: list[list],
    objrow: list,
    basis: list[int],
    ncols: int,
    barred: frozenset[int],
) -> str:
    """Bland's rule throughout: lowest eligible index enters, ratio ties
    break on the lowest basic variable index."""
    zero = _Q(0)
    for _ in range(_MAX_PIVOTS):
        enter = -1
        for j in range(ncols):
            if j not in barred and objrow[j] < zero:
                enter = j
                break
        if enter < 0:
            return OPTIMAL
        leave = -1
        best = None
        for i, row in enumerate(tableau):
            a = row[enter]
            if a > zero:
                ratio = row[-1] / a
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return UNBOUNDED
        _pivot(tableau, objrow, basis, leave, enter)
    raise InternalCheckError("simplex failed to terminate")  # pragma: no cover


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve *lp* exactly.  Deterministic: identical inputs yield
    identical solutions, including the choice of optimal vertex."""
    n = lp.n_variables
    minimize = lp.sense == MINIMIZE

    for j in range(n):
        lo, up = lp.lower[j], lp.upper[j]
        if lo is not None and up is not None and lo > up:
            return LpSolution(status=INFEASIBLE)

    c_min = [
        _to_q(v) if minimize else -_to_q(v) for v in lp.objective
    ]

    # Variable transform: shift lower-bounded variables to x' >= 0, flip
    # upper-only variables, split free ones.  Two-sided bounds add an
    # internal <= row on the shifted variable.
    cols: list[tuple[int, int]] = []  # (user var, sign)
    base: list = [_Q(0)] * n
    bound_rows: list[tuple[int, object]] = []  # (column, shifted upper bound)
    for j in range(n):
        lo, up = lp.lower[j], lp.upper[j]
        if lo is not None:
            base[j] = _to_q(lo)
            cols.append((j, 1))
            if up is not None:
                bound_rows.append((len(cols) - 1, _to_q(up - lo)))
        elif up is not None:
            base[j] = _to_q(up)
            cols.append((j, -1))
        else:
            cols.append((j, 1))
            cols.append((j, -1))
    n_std = len(cols)

    # Standard-form rows: user rows first, then internal bound rows.
    std_rows: list[list] = []
    std_rel: list[str] = []
    std_rhs: list = []
    origin_user: list[int] = []  # index into lp.constraints, -1 for bound rows
    for i, (coeffs, rel, rhs) in enumerate(lp.constraints):
        qcoeffs = [_to_q(v) for v in coeffs]
        row = [qcoeffs[uj] * sign for (uj, sign) in cols]
        shift = sum((qcoeffs[j] * base[j] for j in range(n)), _Q(0))
        std_rows.append(row)
        std_rel.append(rel)
        std_rhs.append(_to_q(rhs) - shift)
        origin_user.append(i)
    for col, ub in bound_rows:
        row = [_Q(0)] * n_std
        row[col] = _Q(1)
        std_rows.append(row)
        std_rel.append(LESS_EQUAL)
        std_rhs.append(ub)
        origin_user.append(-1)

    m = len(std_rows)
    flipped = [False] * m
    for k in range(m):
        if std_rhs[k] < 0:
            std_rows[k] = [-v for v in std_rows[k]]
            std_rhs[k] = -std_rhs[k]
            flipped[k] = True
            if std_rel[k] != EQUAL:
                std_rel[k] = LESS_EQUAL if std_rel[k] == GREATER_EQUAL else GREATER_EQUAL

    # Tableau columns: structural, then one slack/surplus per inequality
    # row, then one artificial per >=/= row.  Each row keeps the column
    # that was its slot in the initial identity so the dual vector can be
    # read off the final tableau.
    n_slack = sum(1 for rel in std_rel if rel != EQUAL)
    art_rows = [k for k in range(m) if std_rel[k] != LESS_EQUAL]
    n_art = len(art_rows)
    ncols = n_std + n_slack + n_art
    ident_col = [0] * m
    basis = [0] * m
    tableau = []
    slack_at = n_std
    art_at = n_std + n_slack
    art_cols = frozenset(range(art_at, ncols))
    for k in range(m):
        row = std_rows[k] + [_Q(0)] * (n_slack + n_art) + [std_rhs[k]]
        if std_rel[k] == LESS_EQUAL:
            row[slack_at] = _Q(1)
            ident_col[k] = slack_at
            basis[k] = slack_at
            slack_at += 1
        elif std_rel[k] == GREATER_EQUAL:
            row[slack_at] = _Q(-1)
            slack_at += 1
            row[art_at] = _Q(1)
            ident_col[k] = art_at
            basis[k] = art_at
            art_at += 1
        else:
            row[art_at] = _Q(1)
            ident_col[k] = art_at
            basis[k] = art_at
            art_at += 1
        tableau.append(row)

    # Phase 1: minimize the artificial total.
    one = _Q(1)
    zero = _Q(0)
    cost1 = [zero] * ncols
    for j in art_cols:
        cost1[j] = one
    objrow = cost1 + [zero]
    for k in range(m):
        if cost1[basis[k]]:
            f = cost1[basis[k]]
            for idx, v in enumerate(tableau[k]):
                if v:
                    objrow[idx] -= f * v
    status = _run_simplex(tableau, objrow, basis, ncols, frozenset())
    if status != OPTIMAL:  # pragma: no cover - phase 1 is always bounded
        raise InternalCheckError("phase 1 reported unbounded")
    if -objrow[-1] > 0:
        # Infeasible.  Phase-1 duals over the constraint rows are a
        # Farkas certificate; map back through the row flips.
        farkas = [None] * len(lp.constraints)
        for k in range(m):
            if origin_user[k] < 0:
                continue
            y = cost1[ident_col[k]] - objrow[ident_col[k]]
            farkas[origin_user[k]] = _to_fraction(-y if flipped[k] else y)
        cert = tuple(farkas)
        verify_infeasibility(lp, cert)
        return LpSolution(status=INFEASIBLE, farkas=cert)

    # Drive basic artificials out wherever the row has structural support.
    for k in range(m):
        if basis[k] in art_cols:
            row = tableau[k]
            for j in range(n_std + n_slack):
                if row[j]:
                    _pivot(tableau, objrow, basis, k, j)
                    break
            # An all-zero row keeps its artificial basic at level zero;
            # the constraint was redundant.

    # Phase 2.
    cost2 = [zero] * ncols
    for col_idx, (uj, sign) in enumerate(cols):
        cost2[col_idx] = c_min[uj] * sign
    objrow = cost2 + [zero]
    for k in range(m):
        f = cost2[basis[k]]
        if f:
            for idx, v in enumerate(tableau[k]):
                if v:
                    objrow[idx] -= f * v
    status = _run_simplex(tableau, objrow, basis, ncols, art_cols)
    if status == UNBOUNDED:
        return LpSolution(status=UNBOUNDED)

    x_std = [zero] * n_std
    for k in range(m):
        if basis[k] < n_std:
            x_std[basis[k]] = tableau[k][-1]
    x_user = list(base)
    for col_idx, (uj, sign) in enumerate(cols):
        x_user[uj] += x_std[col_idx] if sign > 0 else -x_std[col_idx]
    primal = tuple(_to_fraction(v) for v in x_user)

    # Duals: y = c_B B^{-1}; reading the final tableau at each row's
    # initial identity column gives B^{-1}, and every such column has
    # phase-2 cost zero, so y_k = -objrow[ident_col[k]].
    dual = [Fraction(0)] * len(lp.constraints)
    for k in range(m):
        if origin_user[k] < 0:
            continue
        y = -objrow[ident_col[k]]
        dual[origin_user[k]] = _to_fraction(-y if flipped[k] else y)
    if not minimize:
        dual = [-y for y in dual]

    objective_value = sum(
        (lp.objective[j] * primal[j] for j in range(n)), Fraction(0)
    )
    reduced = []
    for j in range(n):
        r = lp.objective[j] - sum(
            (dual[i] * lp.constraints[i][0][j] for i in range(len(dual))),
            Fraction(0),
        )
        reduced.append(r)

    solution = LpSolution(
        status=OPTIMAL,
        objective_value=objective_value,
        primal=primal,
        dual=tuple(dual),
        reduced_costs=tuple(reduced),
    )
    verify_optimal(lp, solution)
    return solution


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise InternalCheckError(message)


def verify_optimal(lp: LinearProgram, sol: LpSolution) -> None:
    """Exact optimality audit; raises :class:`InternalCheckError` if any
    of primal feasibility, dual feasibility, complementary slackness, or
    primal/dual objective equality fails."""
    _check(sol.status == OPTIMAL, "not an optimal solution")
    assert sol.primal is not None and sol.dual is not None
    assert sol.reduced_costs is not None and sol.objective_value is not None
    x = sol.primal
    y = sol.dual
    n = lp.n_variables
    minimize = lp.sense == MINIMIZE

    for j in range(n):
        lo, up = lp.lower[j], lp.upper[j]
        _check(lo is None or x[j] >= lo, f"variable {j} below lower bound")
        _check(up is None or x[j] <= up, f"variable {j} above upper bound")
    for i, (coeffs, rel, rhs) in enumerate(lp.constraints):
        lhs = sum((coeffs[j] * x[j] for j in range(n)), Fraction(0))
        if rel == LESS_EQUAL:
            _check(lhs <= rhs, f"constraint {i} violated")
            ok = y[i] <= 0 if minimize else y[i] >= 0
        elif rel == GREATER_EQUAL:
            _check(lhs >= rhs, f"constraint {i} violated")
            ok = y[i] >= 0 if minimize else y[i] <= 0
        else:
            _check(lhs == rhs, f"constraint {i} violated")
            ok = True
        _check(ok, f"dual multiplier {i} has the wrong sign")
        _check(y[i] == 0 or lhs == rhs, f"complementary slackness fails at row {i}")

    bound_term = Fraction(0)
    for j in range(n):
        r_expected = lp.objective[j] - sum(
            (y[i] * lp.constraints[i][0][j] for i in range(len(y))), Fraction(0)
        )
        r = sol.reduced_costs[j]
        _check(r == r_expected, f"reduced cost {j} inconsistent with duals")
        lo, up = lp.lower[j], lp.upper[j]
        at_lower = r > 0 if minimize else r < 0
        at_upper = r < 0 if minimize else r > 0
        if at_lower:
            _check(lo is not None and x[j] == lo,
                   f"variable {j}: reduced cost pins it to an absent lower bound")
            bound_term += r * lo
        elif at_upper:
            _check(up is not None and x[j] == up,
                   f"variable {j}: reduced cost pins it to an absent upper bound")
            bound_term += r * up

    dual_value = (
        sum((y[i] * lp.constraints[i][2] for i in range(len(y))), Fraction(0))
        + bound_term
    )
    _check(
        sol.objective_value == dual_value,
        "primal and dual objective values differ",
    )


def verify_infeasibility(lp: LinearProgram, farkas: Sequence[Fraction]) -> None:
    """Check a Farkas certificate by substitution.

    With ``s = sum_i y_i a_i``, any feasible point would satisfy
    ``s.x >= sum_i y_i b_i`` (by the row senses and multiplier signs) while
    the variable bounds force ``s.x <= U`` for the box maximum ``U``; the
    certificate is valid exactly when ``U < sum_i y_i b_i``.
    """
    y = list(farkas)
    _check(len(y) == len(lp.constraints), "certificate length mismatch")
    n = lp.n_variables
    for i, (_, rel, _) in enumerate(lp.constraints):
        if rel == LESS_EQUAL:
            _check(y[i] <= 0, f"certificate sign at <= row {i}")
        elif rel == GREATER_EQUAL:
            _check(y[i] >= 0, f"certificate sign at >= row {i}")
    s = [
        sum((y[i] * lp.constraints[i][0][j] for i in range(len(y))), Fraction(0))
        for j in range(n)
    ]
    box_max = Fraction(0)
    for j in range(n):
        if s[j] > 0:
            _check(lp.upper[j] is not None,
                   f"certificate needs an upper bound on variable {j}")
            box_max += s[j] * lp.upper[j]
        elif s[j] < 0:
            _check(lp.lower[j] is not None,
                   f"certificate needs a lower bound on variable {j}")
            box_max += s[j] * lp.lower[j]
    rhs_total = sum(
        (y[i] * lp.constraints[i][2] for i in range(len(y))), Fraction(0)
    )
    _check(box_max < rhs_total, "certificate does not separate")

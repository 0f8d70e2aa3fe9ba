"""Minimum distance between credal sets and its betting dual.

The primal question: how close can members of two convex families of
probability vectors get in L1 distance?  The dual question: how much can
a bettor with sup-norm-bounded stakes guarantee to win by buying against
one family and selling against the other?  The two optimal values agree
exactly, and the solver returns both sides: mixture weights attaining the
minimum distance and a stakes function attaining the same value as an
expected-payoff gap.

On top of that sit two decision procedures.  ``gordan_decide`` classifies
an instance as Separation (a stakes function guarantees a gap above the
tolerance) or Proximity (mixtures come within the tolerance), never both.
``contamination_feasible`` asks whether a target vector can be written as
``(1 - eps) Q + eps R`` with Q from one family and R from another (or
from the full simplex); on failure it returns nonnegative unit-norm
stakes whose expected payoffs certify the failure by strict inequality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import InputError, InternalCheckError
from .measures import (
    CredalSet,
    ProbVector,
    StakesVector,
    expectation,
    l1_distance,
    mixture,
)
from .rational import parse_rational
from .simplex import (
    EQUAL,
    INFEASIBLE,
    LESS_EQUAL,
    OPTIMAL,
    LinearProgram,
    solve_lp,
)

__all__ = [
    "DistanceResult",
    "Separation",
    "Proximity",
    "GordanOutcome",
    "SeparationCheck",
    "ContaminationDecomposition",
    "ContaminationRefusal",
    "FullSimplex",
    "FULL_SIMPLEX",
    "min_set_distance",
    "member_gap",
    "gordan_decide",
    "check_bounded_separation",
    "contamination_feasible",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class DistanceResult:
    """Minimum L1 distance between two credal sets, with both optimizers.

    ``value`` equals the distance between the mixtures named by
    ``p_weights`` and ``q_weights``, and also equals the guaranteed
    expected-payoff gap of ``stakes``:
    ``min_P E_stakes[P] - max_Q E_stakes[Q]`` over the members.  When the
    value is positive the stakes have sup norm exactly one.
    """

    value: Fraction
    p_weights: tuple[Fraction, ...]
    q_weights: tuple[Fraction, ...]
    stakes: StakesVector


@dataclass(frozen=True)
class Separation:
    """A stakes function with guaranteed gap above the tolerance."""

    stakes: StakesVector
    gap: Fraction


@dataclass(frozen=True)
class Proximity:
    """Mixture weights bringing the two sets within the tolerance."""

    p_weights: tuple[Fraction, ...]
    q_weights: tuple[Fraction, ...]
    distance: Fraction


GordanOutcome = Union[Separation, Proximity]


@dataclass(frozen=True)
class SeparationCheck:
    """Result of the bounded-separation test at a given tolerance."""

    holds: bool
    witness: Optional[StakesVector] = None
    gap: Optional[Fraction] = None


class FullSimplex:
    """Sentinel: draw the residual from the whole probability simplex."""

    def __repr__(self) -> str:  # pragma: no cover
        return "FULL_SIMPLEX"


FULL_SIMPLEX = FullSimplex()


@dataclass(frozen=True)
class ContaminationDecomposition:
    """An exact decomposition ``P = (1 - eps) Q_m + eps R``.

    ``q_weights`` mix the Q-family members into ``Q_m``.  ``residual`` is
    None exactly when eps is zero, in which case R carries no weight and
    ``P = Q_m`` holds outright.
    """

    epsilon: Fraction
    q_weights: tuple[Fraction, ...]
    residual: Optional[ProbVector]


@dataclass(frozen=True)
class ContaminationRefusal:
    """Proof that no decomposition exists: nonnegative stakes of sup norm
    one whose expected payoff against P strictly exceeds the best the
    mixture side can deliver.  ``lhs > rhs`` always."""

    stakes: StakesVector
    lhs: Fraction
    rhs: Fraction


def member_gap(
    f: StakesVector, p_set: CredalSet, q_set: CredalSet
) -> Fraction:
    """Guaranteed gap of *f*: worst expected payoff over the P members
    minus best expected payoff over the Q members."""
    lo = min(expectation(f, p) for p in p_set.members)
    hi = max(expectation(f, q) for q in q_set.members)
    return lo - hi


def _require_shared_space(p_set: CredalSet, q_set: CredalSet) -> None:
    if p_set.space != q_set.space:
        raise InputError("credal sets live on different point spaces")


def min_set_distance(p_set: CredalSet, q_set: CredalSet) -> DistanceResult:
    """Minimize L1 distance over the product of the two hulls.

    One exact linear program: variables are per-point slack for the
    absolute values plus one mixture weight per member.  The stakes
    certificate is read off the optimal dual multipliers of the two
    absolute-value row families and re-verified by substitution.
    """
    _require_shared_space(p_set, q_set)
    space = p_set.space
    n = space.size
    np_, nq = p_set.size, q_set.size
    nvars = n + np_ + nq  # z block, then p weights, then q weights

    def zcol(x: int) -> int:
        return x

    def pcol(j: int) -> int:
        return n + j

    def qcol(k: int) -> int:
        return n + np_ + k

    rows = []
    # diff <= z, one row per point (diff = P_mix - Q_mix)
    for x in range(n):
        coeffs = [_ZERO] * nvars
        coeffs[zcol(x)] = Fraction(-1)
        for j, p in enumerate(p_set.members):
            coeffs[pcol(j)] = p.weights[x]
        for k, q in enumerate(q_set.members):
            coeffs[qcol(k)] = -q.weights[x]
        rows.append((tuple(coeffs), LESS_EQUAL, _ZERO))
    # -z <= diff, one row per point
    for x in range(n):
        coeffs = [_ZERO] * nvars
        coeffs[zcol(x)] = Fraction(-1)
        for j, p in enumerate(p_set.members):
            coeffs[pcol(j)] = -p.weights[x]
        for k, q in enumerate(q_set.members):
            coeffs[qcol(k)] = q.weights[x]
        rows.append((tuple(coeffs), LESS_EQUAL, _ZERO))
    for block, size in ((pcol, np_), (qcol, nq)):
        coeffs = [_ZERO] * nvars
        for j in range(size):
            coeffs[block(j)] = _ONE
        rows.append((tuple(coeffs), EQUAL, _ONE))

    objective = [_ONE] * n + [_ZERO] * (np_ + nq)
    lp = LinearProgram(
        objective=tuple(objective),
        sense="min",
        constraints=tuple(rows),
        lower=(_ZERO,) * nvars,
    )
    sol = solve_lp(lp)
    if sol.status != OPTIMAL:  # pragma: no cover - feasible and bounded
        raise InternalCheckError(f"distance program came back {sol.status}")

    value = sol.objective_value
    p_weights = sol.primal[n : n + np_]
    q_weights = sol.primal[n + np_ :]
    # Stakes: dual of (-z <= diff) minus dual of (diff <= z), per point.
    f_vals = [sol.dual[n + x] - sol.dual[x] for x in range(n)]
    stakes = StakesVector(space=space, values=tuple(f_vals))

    if value > 0 and stakes.norm != 1:  # pragma: no cover - see check below
        stakes = StakesVector(
            space=space, values=tuple(v / stakes.norm for v in f_vals)
        )

    # Audit every promise made by the result type.
    p_mix = mixture(p_weights, p_set)
    q_mix = mixture(q_weights, q_set)
    if l1_distance(p_mix, q_mix) != value:
        raise InternalCheckError("optimal mixtures do not attain the value")
    if stakes.norm > 1:
        raise InternalCheckError("stakes exceed unit sup norm")
    if value > 0 and stakes.norm != 1:
        raise InternalCheckError("positive value but stakes below unit norm")
    if member_gap(stakes, p_set, q_set) != value:
        raise InternalCheckError("stakes gap disagrees with the distance")

    return DistanceResult(
        value=value,
        p_weights=p_weights,
        q_weights=q_weights,
        stakes=stakes,
    )


def gordan_decide(
    p_set: CredalSet, q_set: CredalSet, eps: object
) -> GordanOutcome:
    """Classify at tolerance *eps*: Separation when the minimum distance
    strictly exceeds eps, Proximity otherwise (ties go to Proximity)."""
    tol = parse_rational(eps)
    if tol < 0:
        raise InputError("tolerance must be nonnegative")
    result = min_set_distance(p_set, q_set)
    if result.value > tol:
        return Separation(stakes=result.stakes, gap=result.value)
    return Proximity(
        p_weights=result.p_weights,
        q_weights=result.q_weights,
        distance=result.value,
    )


def check_bounded_separation(
    p_set: CredalSet, q_set: CredalSet, eps: object
) -> SeparationCheck:
    """Can mixtures from the two sets come within *eps* in L1?

    When not, the returned unit-norm witness f guarantees
    ``min_P E_f[P] > max_Q E_f[Q] + eps``; equivalently, -f shows that
    ``max_P E[P] >= min_Q E[Q] - eps`` fails.  Both forms are re-checked
    by substitution before returning.
    """
    tol = parse_rational(eps)
    if tol < 0:
        raise InputError("tolerance must be nonnegative")
    result = min_set_distance(p_set, q_set)
    if result.value <= tol:
        return SeparationCheck(holds=True)
    witness = result.stakes
    gap = member_gap(witness, p_set, q_set)
    if not gap > tol:
        raise InternalCheckError("witness fails the direct form")
    neg = StakesVector(
        space=witness.space, values=tuple(-v for v in witness.values)
    )
    neg_hi = max(expectation(neg, p) for p in p_set.members)
    neg_lo = min(expectation(neg, q) for q in q_set.members)
    if not neg_hi < neg_lo - tol:
        raise InternalCheckError("witness fails the mirrored form")
    return SeparationCheck(holds=False, witness=witness, gap=gap)


def contamination_feasible(
    p: ProbVector,
    q_set: CredalSet,
    r_set: Union[CredalSet, FullSimplex],
    eps: object,
) -> Union[ContaminationDecomposition, ContaminationRefusal]:
    """Decide whether ``p = (1 - eps) Q + eps R`` has an exact solution
    with Q in the hull of *q_set* and R in the hull of *r_set* (or R any
    probability vector when *r_set* is ``FULL_SIMPLEX``)."""
    tol = parse_rational(eps)
    if not (0 <= tol <= 1):
        raise InputError("contamination level must lie in [0, 1]")
    if p.space != q_set.space:
        raise InputError("target and opinion family on different spaces")
    full = isinstance(r_set, FullSimplex)
    if not full:
        if p.space != r_set.space:
            raise InputError("target and residual family on different spaces")
    space = p.space
    n = space.size
    nq = q_set.size
    n_res = n if full else r_set.size
    nvars = nq + n_res

    rows = []
    one_minus = _ONE - tol
    for x in range(n):
        coeffs = [_ZERO] * nvars
        for j, q in enumerate(q_set.members):
            coeffs[j] = one_minus * q.weights[x]
        if full:
            coeffs[nq + x] = _ONE  # residual mass placed directly
        else:
            for m, r in enumerate(r_set.members):
                coeffs[nq + m] = tol * r.weights[x]
        rows.append((tuple(coeffs), EQUAL, p.weights[x]))
    coeffs = [_ONE] * nq + [_ZERO] * n_res
    rows.append((tuple(coeffs), EQUAL, _ONE))
    coeffs = [_ZERO] * nq + [_ONE] * n_res
    rows.append((tuple(coeffs), EQUAL, tol if full else _ONE))

    lp = LinearProgram(
        objective=(_ZERO,) * nvars,
        sense="min",
        constraints=tuple(rows),
        lower=(_ZERO,) * nvars,
    )
    sol = solve_lp(lp)

    if sol.status == OPTIMAL:
        q_weights = sol.primal[:nq]
        if tol == 0:
            residual = None
        elif full:
            residual = ProbVector(
                space=space,
                weights=tuple(v / tol for v in sol.primal[nq:]),
            )
        else:
            residual = mixture(sol.primal[nq:], r_set)
        _verify_decomposition(p, q_set, q_weights, residual, tol)
        return ContaminationDecomposition(
            epsilon=tol, q_weights=q_weights, residual=residual
        )

    if sol.status != INFEASIBLE:  # pragma: no cover
        raise InternalCheckError(f"feasibility program came back {sol.status}")

    # Farkas multipliers on the point rows separate p from the mixture
    # side; shifting by the minimum and rescaling to sup norm one keeps
    # the strict inequality and lands in the nonnegative unit ball.
    f0 = [sol.farkas[x] for x in range(n)]
    shift = min(f0)
    shifted = [v - shift for v in f0]
    top = max(shifted)
    if top == 0:  # pragma: no cover - impossible for a valid certificate
        raise InternalCheckError("degenerate refusal stakes")
    values = tuple(v / top for v in shifted)
    stakes = StakesVector(space=space, values=values)
    lhs = expectation(stakes, p)
    best_q = max(expectation(stakes, q) for q in q_set.members)
    if full:
        best_r = max(values)
    else:
        best_r = max(expectation(stakes, r) for r in r_set.members)
    rhs = one_minus * best_q + tol * best_r
    if not lhs > rhs:
        raise InternalCheckError("refusal stakes fail to separate")
    return ContaminationRefusal(stakes=stakes, lhs=lhs, rhs=rhs)


def _verify_decomposition(
    p: ProbVector,
    q_set: CredalSet,
    q_weights: tuple[Fraction, ...],
    residual: Optional[ProbVector],
    tol: Fraction,
) -> None:
    q_mix = mixture(q_weights, q_set)
    for x in range(p.space.size):
        lhs = (1 - tol) * q_mix.weights[x]
        if residual is not None:
            lhs += tol * residual.weights[x]
        if lhs != p.weights[x]:
            raise InternalCheckError("decomposition fails coordinatewise")
    if residual is None and tol != 0:
        raise InternalCheckError("missing residual at positive level")

"""Marginal-constraint systems and exact vertex enumeration.

The symmetric plan polytope is { alpha >= 0 : A alpha = b } where column m of
A holds the slot-marginal of the basis plan for multi-index m (multiplicity of
each site divided by the number of marginals) and b is the uniform marginal.
Its extreme points are exactly the basic feasible solutions: nonnegative
solutions supported on linearly independent columns.  The enumerator walks all
column subsets of size rank(A); every vertex support extends to such a basis,
so the sweep is complete, and duplicates arising from degenerate bases are
removed by exact coefficient comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import InvalidInputError, ResourceBudgetError
from .exact import RationalMatrix, lp_solve, rank, solve_integer_columns
from .plans import (
    DensePlan,
    MultiIndex,
    PairMarginal,
    StateSpace,
    SymmetricPlan,
    index_multiplicity,
    pair_ordering_fraction,
    two_point_marginal,
)

DEFAULT_SUBSET_BUDGET = 10_000_000


@dataclass(frozen=True)
class ConstraintSystem:
    """Uniform-marginal equality system over symmetric plan coefficients."""

    space: StateSpace
    matrix: RationalMatrix
    rhs: tuple[Fraction, ...]
    column_index: tuple[MultiIndex, ...]


@dataclass(frozen=True)
class FullConstraintSystem:
    """Uniform-marginal system over ordered tuples (one row per slot and site)."""

    space: StateSpace
    matrix: RationalMatrix
    rhs: tuple[Fraction, ...]
    column_atoms: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class VertexFlags:
    is_symmetrized_monge: bool
    reduced_extreme: bool


@dataclass(frozen=True)
class VertexCatalog:
    """Deduplicated, canonically ordered extreme points with names and flags."""

    space: StateSpace
    system: ConstraintSystem
    vertices: tuple[SymmetricPlan, ...]
    names: tuple[str, ...]
    flags: tuple[VertexFlags, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def by_name(self, name: str) -> SymmetricPlan:
        try:
            return self.vertices[self.names.index(name)]
        except ValueError as exc:
            raise InvalidInputError(f"no vertex named {name!r}") from exc

    def name_of(self, plan: SymmetricPlan) -> str | None:
        for vertex, name in zip(self.vertices, self.names):
            if vertex == plan:
                return name
        return None


@dataclass(frozen=True)
class ReducedCatalog:
    """Extreme points of a polytope of two-point marginals, with generators."""

    space: StateSpace
    points: tuple[PairMarginal, ...]
    names: tuple[str, ...]
    generators: tuple[SymmetricPlan, ...]

    def __len__(self) -> int:
        return len(self.points)


def build_constraints(space: StateSpace) -> ConstraintSystem:
    """Assemble the marginal system; one row per site, one column per multi-index."""
    columns = space.multi_indices()
    n = space.n_marginals
    rows = tuple(
        tuple(Fraction(index_multiplicity(m, site), n) for m in columns)
        for site in range(space.n_sites)
    )
    rhs = (Fraction(1, space.n_sites),) * space.n_sites
    return ConstraintSystem(space, RationalMatrix(rows), rhs, columns)


def build_full_constraints(space: StateSpace) -> FullConstraintSystem:
    """Assemble the slot-by-slot marginal system over all ordered tuples."""
    atoms = space.ordered_tuples()
    rows = []
    for slot in range(space.n_marginals):
        for site in range(space.n_sites):
            rows.append(tuple(Fraction(int(atom[slot] == site)) for atom in atoms))
    rhs = (Fraction(1, space.n_sites),) * (space.n_marginals * space.n_sites)
    return FullConstraintSystem(space, RationalMatrix(tuple(rows)), rhs, atoms)


def enumerate_basic_feasible(
    matrix: RationalMatrix,
    rhs: Sequence[Fraction],
    budget: int = DEFAULT_SUBSET_BUDGET,
) -> list[dict[int, Fraction]]:
    """All basic feasible solutions of ``matrix @ x = rhs, x >= 0``.

    Returns sparse column->value maps, deduplicated, in deterministic order.
    Raises ResourceBudgetError when the subset count exceeds the budget.
    """
    n_cols = matrix.n_cols
    base_rank = rank(matrix)
    if base_rank == 0:
        if all(x == 0 for x in rhs):
            return [{}]
        return []
    if math.comb(n_cols, base_rank) > budget:
        raise ResourceBudgetError(
            f"enumeration needs {math.comb(n_cols, base_rank)} column subsets, "
            f"budget is {budget}"
        )
    # Integer-scaled columns: multiply every row by the lcm of its denominators.
    scales = [
        math.lcm(*(entry.denominator for entry in matrix.row(i)), rhs[i].denominator)
        for i in range(matrix.n_rows)
    ]
    int_columns = [
        tuple(int(matrix.entry(i, j) * scales[i]) for i in range(matrix.n_rows))
        for j in range(n_cols)
    ]
    scaled_rhs = [rhs[i] * scales[i] for i in range(matrix.n_rows)]

    seen: set[tuple[tuple[int, Fraction], ...]] = set()
    found: list[dict[int, Fraction]] = []
    for subset in combinations(range(n_cols), base_rank):
        solution = solve_integer_columns([int_columns[j] for j in subset], scaled_rhs)
        if solution is None:
            continue
        if any(x < 0 for x in solution):
            continue
        support = tuple(
            (col, value) for col, value in zip(subset, solution) if value != 0
        )
        if support in seen:
            continue
        seen.add(support)
        found.append(dict(support))
    found.sort(key=lambda sol: (len(sol), sorted(sol.keys()), sorted(sol.items())))
    return found


def vertex_sort_key(plan: SymmetricPlan):
    """Deterministic catalog order: support size, then support, then coefficients."""
    return (
        len(plan.terms),
        tuple(index for index, _ in plan.terms),
        tuple(weight for _, weight in plan.terms),
    )


def enumerate_vertices(
    system: ConstraintSystem, budget: int = DEFAULT_SUBSET_BUDGET
) -> VertexCatalog:
    """Complete list of extreme points of the symmetric plan polytope."""
    solutions = enumerate_basic_feasible(system.matrix, system.rhs, budget)
    plans = [
        SymmetricPlan.make(
            system.space, {system.column_index[col]: val for col, val in sol.items()}
        )
        for sol in solutions
    ]
    plans.sort(key=vertex_sort_key)

    from .monge import enumerate_symmetrized_monge, name_vertex  # deferred: cyclic

    monge_set = set(enumerate_symmetrized_monge(system.space))
    reduced_points = filter_extreme([two_point_marginal(p) for p in plans])
    reduced_set = set(pm.mu for pm in reduced_points)
    names = tuple(name_vertex(p) for p in plans)
    flags = tuple(
        VertexFlags(
            is_symmetrized_monge=(p in monge_set),
            reduced_extreme=(two_point_marginal(p).mu in reduced_set),
        )
        for p in plans
    )
    return VertexCatalog(system.space, system, tuple(plans), names, flags)


def enumerate_full_vertices(
    space: StateSpace, budget: int = DEFAULT_SUBSET_BUDGET
) -> list[DensePlan]:
    """Extreme points of the full (non-symmetric) plan polytope."""
    system = build_full_constraints(space)
    solutions = enumerate_basic_feasible(system.matrix, system.rhs, budget)
    plans = [
        DensePlan.make(space, {system.column_atoms[col]: val for col, val in sol.items()})
        for sol in solutions
    ]
    plans.sort(key=lambda p: p.weights)
    return plans


def project_reduced(catalog: VertexCatalog) -> list[PairMarginal]:
    """Two-point marginals of all catalog vertices, deduplicated, in catalog order."""
    seen = set()
    points = []
    for vertex in catalog.vertices:
        pm = two_point_marginal(vertex)
        if pm.mu not in seen:
            seen.add(pm.mu)
            points.append(pm)
    return points


def _membership_lp(
    target: PairMarginal, generators: Sequence[PairMarginal]
) -> tuple[str, tuple[Fraction, ...] | None]:
    """Feasibility LP for target = convex combination of generators."""
    if not generators:
        return "infeasible", None
    n = target.space.n_sites
    rows = []
    rhs = []
    for i in range(n):
        for j in range(n):
            rows.append(tuple(g.mu[i][j] for g in generators))
            rhs.append(target.mu[i][j])
    rows.append((Fraction(1),) * len(generators))
    rhs.append(Fraction(1))
    result = lp_solve(
        [Fraction(0)] * len(generators), RationalMatrix(tuple(rows)), rhs
    )
    return result.status, result.point


def decompose(
    target: PairMarginal, generators: Sequence[PairMarginal]
) -> tuple[Fraction, ...] | None:
    """Exact convex coefficients expressing target over generators, if any."""
    status, point = _membership_lp(target, generators)
    return point if status == "optimal" else None


def filter_extreme(points: Sequence[PairMarginal]) -> list[PairMarginal]:
    """Keep exactly the points not representable as convex combinations of the others."""
    kept = []
    for i, p in enumerate(points):
        others = [q for j, q in enumerate(points) if j != i and q.mu != p.mu]
        if decompose(p, others) is None:
            kept.append(p)
    return kept


def _pair_projection_rows(
    system: ConstraintSystem,
) -> tuple[list[tuple[Fraction, ...]], list[tuple[int, int]]]:
    """Linear map from plan coefficients to scaled two-point marginal entries."""
    n = system.space.n_sites
    rows = []
    labels = []
    for i in range(n):
        for j in range(n):
            rows.append(
                tuple(
                    pair_ordering_fraction(m, i, j) * n for m in system.column_index
                )
            )
            labels.append((i, j))
    return rows, labels


def preimage_unique(p: PairMarginal, system: ConstraintSystem) -> bool:
    """True when exactly one symmetric plan in the polytope has marginal ``p``.

    Certified coordinate by coordinate: the face {A alpha = b, alpha >= 0,
    M2(alpha) = p} is a single point iff min and max of every coordinate agree.
    """
    proj_rows, _ = _pair_projection_rows(system)
    n = system.space.n_sites
    rows = list(system.matrix.entries) + proj_rows
    rhs = list(system.rhs) + [p.mu[i][j] for i in range(n) for j in range(n)]
    face = RationalMatrix(tuple(rows))
    n_cols = system.matrix.n_cols
    for coord in range(n_cols):
        objective = [Fraction(0)] * n_cols
        objective[coord] = Fraction(1)
        low = lp_solve(objective, face, rhs)
        if low.status == "infeasible":
            raise InvalidInputError("marginal is not attained by any plan in the polytope")
        objective[coord] = Fraction(-1)
        high = lp_solve(objective, face, rhs)
        assert low.status == "optimal" and high.status == "optimal"
        if low.value != -high.value:
            return False
    return True


def preimage_of(p: PairMarginal, system: ConstraintSystem) -> SymmetricPlan:
    """Some symmetric plan in the polytope with marginal ``p`` (errors if none)."""
    proj_rows, _ = _pair_projection_rows(system)
    n = system.space.n_sites
    rows = list(system.matrix.entries) + proj_rows
    rhs = list(system.rhs) + [p.mu[i][j] for i in range(n) for j in range(n)]
    result = lp_solve([Fraction(0)] * system.matrix.n_cols, RationalMatrix(tuple(rows)), rhs)
    if not result.is_optimal or result.point is None:
        raise InvalidInputError("marginal is not attained by any plan in the polytope")
    return SymmetricPlan.make(
        system.space,
        {system.column_index[j]: v for j, v in enumerate(result.point) if v != 0},
    )

"""Monge states, symmetrized-Monge enumeration and membership, vertex names.

A Monge state places mass 1/n_sites on the graph of a tuple of permutations;
its symmetrization only depends on the multiset of sorted graph points, so the
enumeration instantiates every tuple (identity first, without loss) and
deduplicates exactly.  Vertex names follow the catalog conventions for three
marginals on three sites: permutation-generated states are named by their
permutations, the two-atom non-Monge states get the F prefix, and the
remaining states get K followed by their two largest atoms.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product

from .errors import ResourceBudgetError
from .plans import DensePlan, StateSpace, SymmetricPlan, symmetrize, two_point_marginal
from .polytope import ReducedCatalog, filter_extreme, vertex_sort_key

DEFAULT_TUPLE_BUDGET = 1_000_000

Permutation = tuple[int, ...]


def identity_permutation(n_sites: int) -> Permutation:
    return tuple(range(n_sites))


def compose(outer: Permutation, inner: Permutation) -> Permutation:
    """outer after inner."""
    return tuple(outer[inner[i]] for i in range(len(inner)))


# Naming ranks for the three-site permutations: identity, the three
# transpositions, the cyclic rotation, and its inverse.
_PERM_LABELS_3 = {
    (0, 1, 2): "Id",
    (1, 0, 2): "T12",
    (2, 1, 0): "T13",
    (0, 2, 1): "T23",
    (1, 2, 0): "C",
    (2, 0, 1): "C'",
}
_PERM_RANK_3 = {perm: i for i, perm in enumerate(_PERM_LABELS_3)}
_RANK_TO_LABEL_3 = list(_PERM_LABELS_3.values())


def monge_plan(space: StateSpace, taus: tuple[Permutation, ...]) -> DensePlan:
    """Instantiate the plan concentrated on the graph of the permutation tuple."""
    weights = {
        tuple(tau[site] for tau in taus): Fraction(1, space.n_sites)
        for site in range(space.n_sites)
    }
    return DensePlan.make(space, weights)


def _tuple_count(space: StateSpace) -> int:
    return math.factorial(space.n_sites) ** (space.n_marginals - 1)


def _check_tuple_budget(space: StateSpace, budget: int) -> None:
    count = _tuple_count(space)
    if count > budget:
        raise ResourceBudgetError(
            f"symmetrized-Monge enumeration needs {count} permutation tuples, "
            f"budget is {budget}"
        )


@lru_cache(maxsize=None)
def _symmetrized_monge_cached(space: StateSpace) -> tuple[SymmetricPlan, ...]:
    ident = identity_permutation(space.n_sites)
    perms = tuple(permutations(range(space.n_sites)))
    seen: set[SymmetricPlan] = set()
    out: list[SymmetricPlan] = []
    for rest in product(perms, repeat=space.n_marginals - 1):
        plan = symmetrize(monge_plan(space, (ident,) + rest))
        if plan not in seen:
            seen.add(plan)
            out.append(plan)
    out.sort(key=vertex_sort_key)
    return tuple(out)


def enumerate_symmetrized_monge(
    space: StateSpace, budget: int = DEFAULT_TUPLE_BUDGET
) -> tuple[SymmetricPlan, ...]:
    """All distinct symmetrized Monge states, canonically ordered."""
    _check_tuple_budget(space, budget)
    return _symmetrized_monge_cached(space)


def is_symmetrized_monge(plan: SymmetricPlan, budget: int = DEFAULT_TUPLE_BUDGET) -> bool:
    """Exact membership in the symmetrized-Monge family."""
    return plan in enumerate_symmetrized_monge(plan.space, budget)


def is_monge(plan: DensePlan) -> bool:
    """True iff the plan is exactly a permutation-graph plan.

    Equivalent to instantiation equality for some permutation tuple: the plan
    must consist of n_sites atoms of weight 1/n_sites whose values in every
    slot are pairwise distinct (hence a permutation per slot).
    """
    space = plan.space
    if len(plan.weights) != space.n_sites:
        return False
    share = Fraction(1, space.n_sites)
    if any(weight != share for _, weight in plan.weights):
        return False
    atoms = plan.support
    for slot in range(space.n_marginals):
        values = {atom[slot] for atom in atoms}
        if len(values) != space.n_sites:
            return False
    return True


@lru_cache(maxsize=None)
def _generating_pairs_3(space: StateSpace):
    """For 3 marginals: map each symmetrized Monge state to its generating pairs."""
    ident = identity_permutation(space.n_sites)
    perms = tuple(permutations(range(space.n_sites)))
    table: dict[SymmetricPlan, list[tuple[Permutation, Permutation]]] = {}
    for sigma in perms:
        for sigma2 in perms:
            plan = symmetrize(monge_plan(space, (ident, sigma, sigma2)))
            table.setdefault(plan, []).append((sigma, sigma2))
    return table


def _digits(index: tuple[int, ...]) -> str:
    return "".join(str(i + 1) for i in index)


def _distinct_sites(index: tuple[int, ...]) -> int:
    return len(set(index))


def name_vertex(plan: SymmetricPlan) -> str:
    """Catalog name of a vertex; outside three-on-three, a support signature."""
    space = plan.space
    if space.n_marginals == 3 and space.n_sites == 3:
        if is_symmetrized_monge(plan):
            pairs = _generating_pairs_3(space).get(plan, [])
            power_ranks = [
                _PERM_RANK_3[sigma]
                for sigma, sigma2 in pairs
                if sigma2 == compose(sigma, sigma)
            ]
            if power_ranks:
                label = _RANK_TO_LABEL_3[min(power_ranks)]
                return "C" if label == "C'" else label
            best = min(
                tuple(sorted((_PERM_RANK_3[a], _PERM_RANK_3[b]))) for a, b in pairs
            )
            return f"{_RANK_TO_LABEL_3[best[0]]},{_RANK_TO_LABEL_3[best[1]]}"
        if len(plan.terms) == 2 and all(w == Fraction(1, 2) for _, w in plan.terms):
            return "F" + _digits(plan.support[0])
        if len(plan.terms) == 3:
            ordered = sorted(
                plan.terms,
                key=lambda item: (-item[1], -_distinct_sites(item[0]), item[0]),
            )
            return f"K{_digits(ordered[0][0])},{_digits(ordered[1][0])}"
    sep = "+" if space.n_sites <= 9 else "."
    return "V" + sep.join(_digits(index) for index in plan.support)


def monge_polytope_vertices(
    space: StateSpace, budget: int = DEFAULT_TUPLE_BUDGET
) -> ReducedCatalog:
    """Extreme points of the convex hull of symmetrized-Monge two-point marginals."""
    plans = enumerate_symmetrized_monge(space, budget)
    marginals = []
    generators = []
    seen = set()
    for plan in plans:
        pm = two_point_marginal(plan)
        if pm.mu in seen:
            continue
        seen.add(pm.mu)
        marginals.append(pm)
        generators.append(plan)
    extreme = filter_extreme(marginals)
    extreme_mus = {pm.mu for pm in extreme}
    kept = [(pm, gen) for pm, gen in zip(marginals, generators) if pm.mu in extreme_mus]
    kept.sort(key=lambda item: vertex_sort_key(item[1]))
    return ReducedCatalog(
        space,
        points=tuple(pm for pm, _ in kept),
        names=tuple(name_vertex(gen) for _, gen in kept),
        generators=tuple(gen for _, gen in kept),
    )

"""State spaces and transport plans in dense and symmetric representation.

Site indices are 0-based everywhere inside the package; serialized forms
(JSON, CSV, vertex names) use 1-based indices.  A symmetric plan is stored as
a coefficient vector over nondecreasing multi-indices: the basis element for a
multi-index spreads unit mass equally over the distinct orderings of that
index, so coefficients of a probability plan are nonnegative and sum to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Mapping, Sequence

from .errors import InvalidInputError
from .exact import rational, rational_str

MultiIndex = tuple[int, ...]


def validate_distance_matrix(distances: Sequence[Sequence[Fraction]]) -> None:
    """Reject anything that is not a metric: symmetry, zero diagonal, positivity, triangle."""
    n = len(distances)
    for row in distances:
        if len(row) != n:
            raise InvalidInputError("distance matrix is not square")
    for i in range(n):
        if distances[i][i] != 0:
            raise InvalidInputError(f"distance matrix has nonzero diagonal at {i}")
        for j in range(n):
            if distances[i][j] != distances[j][i]:
                raise InvalidInputError(f"distance matrix not symmetric at ({i},{j})")
            if i != j and distances[i][j] <= 0:
                raise InvalidInputError(f"distance matrix not positive at ({i},{j})")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if distances[i][j] > distances[i][k] + distances[k][j]:
                    raise InvalidInputError(
                        f"triangle inequality fails for sites ({i},{j},{k})"
                    )


@dataclass(frozen=True)
class StateSpace:
    """A finite site set together with the number of marginals.

    Geometry is optional: either 1D coordinates per site or an explicit
    distance matrix.  Plans and polytopes never need it; costs always do.
    """

    n_marginals: int
    n_sites: int
    site_labels: tuple[str, ...]
    coords: tuple[Fraction, ...] | None = None
    distances: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self) -> None:
        if self.n_marginals < 2:
            raise InvalidInputError("need at least two marginals")
        if self.n_sites < 1:
            raise InvalidInputError("need at least one site")
        if len(self.site_labels) != self.n_sites:
            raise InvalidInputError("one label per site required")
        if len(set(self.site_labels)) != self.n_sites:
            raise InvalidInputError("site labels must be distinct")
        if self.coords is not None and len(self.coords) != self.n_sites:
            raise InvalidInputError("one coordinate per site required")
        if self.distances is not None:
            validate_distance_matrix(self.distances)

    @classmethod
    def uniform(cls, n_marginals: int, n_sites: int) -> "StateSpace":
        """Geometry-free space with labels "1".."n_sites"."""
        return cls(n_marginals, n_sites, tuple(str(i + 1) for i in range(n_sites)))

    @classmethod
    def from_coords(
        cls,
        n_marginals: int,
        coords: Iterable[int | str | Fraction],
        labels: Sequence[str] | None = None,
    ) -> "StateSpace":
        pts = tuple(rational(c) for c in coords)
        if len(set(pts)) != len(pts):
            raise InvalidInputError("site coordinates must be distinct")
        names = tuple(labels) if labels is not None else tuple(rational_str(c) for c in pts)
        return cls(n_marginals, len(pts), names, coords=pts)

    @classmethod
    def from_distances(
        cls,
        n_marginals: int,
        distances: Sequence[Sequence[int | str | Fraction]],
        labels: Sequence[str] | None = None,
    ) -> "StateSpace":
        mat = tuple(tuple(rational(x) for x in row) for row in distances)
        n = len(mat)
        names = tuple(labels) if labels is not None else tuple(str(i + 1) for i in range(n))
        return cls(n_marginals, n, names, distances=mat)

    @property
    def has_geometry(self) -> bool:
        return self.coords is not None or self.distances is not None

    def distance(self, i: int, j: int) -> Fraction:
        if self.distances is not None:
            return self.distances[i][j]
        if self.coords is not None:
            return abs(self.coords[i] - self.coords[j])
        raise InvalidInputError("state space carries no geometry")

    def multi_indices(self) -> tuple[MultiIndex, ...]:
        """All nondecreasing multi-indices, lexicographically ordered."""
        out: list[MultiIndex] = []

        def extend(prefix: tuple[int, ...], lowest: int) -> None:
            if len(prefix) == self.n_marginals:
                out.append(prefix)
                return
            for site in range(lowest, self.n_sites):
                extend(prefix + (site,), site)

        extend((), 0)
        return tuple(out)

    def ordered_tuples(self) -> tuple[tuple[int, ...], ...]:
        """All ordered site tuples of length n_marginals, lexicographically."""
        return tuple(product(range(self.n_sites), repeat=self.n_marginals))


def sorted_index(index: Sequence[int]) -> MultiIndex:
    return tuple(sorted(index))


def distinct_orderings(index: MultiIndex) -> int:
    """Number of distinct ordered rearrangements of a multi-index."""
    count = math.factorial(len(index))
    for site in set(index):
        count //= math.factorial(index.count(site))
    return count


def index_multiplicity(index: MultiIndex, site: int) -> int:
    return index.count(site)


def pair_ordering_fraction(index: MultiIndex, first: int, second: int) -> Fraction:
    """Fraction of the distinct orderings of ``index`` that start with (first, second)."""
    remaining = list(index)
    try:
        remaining.remove(first)
        remaining.remove(second)
    except ValueError:
        return Fraction(0)
    return Fraction(distinct_orderings(tuple(remaining)), distinct_orderings(index))


def _check_space(space: StateSpace, index: Sequence[int]) -> None:
    if len(index) != space.n_marginals:
        raise InvalidInputError(
            f"index {tuple(index)} has length {len(index)}, expected {space.n_marginals}"
        )
    if any(not 0 <= i < space.n_sites for i in index):
        raise InvalidInputError(f"index {tuple(index)} out of range for {space.n_sites} sites")


@dataclass(frozen=True)
class SymmetricPlan:
    """Symmetric probability plan: coefficients over nondecreasing multi-indices."""

    space: StateSpace
    terms: tuple[tuple[MultiIndex, Fraction], ...]

    def __post_init__(self) -> None:
        total = Fraction(0)
        previous: MultiIndex | None = None
        for index, weight in self.terms:
            _check_space(self.space, index)
            if tuple(sorted(index)) != tuple(index):
                raise InvalidInputError(f"multi-index {index} is not nondecreasing")
            if weight <= 0:
                raise InvalidInputError(f"coefficient for {index} must be positive")
            if previous is not None and index <= previous:
                raise InvalidInputError("terms must be strictly increasing by index")
            previous = index
            total += weight
        if total != 1:
            raise InvalidInputError(f"total mass is {total}, expected 1")

    @classmethod
    def make(
        cls, space: StateSpace, alpha: Mapping[Sequence[int], int | str | Fraction]
    ) -> "SymmetricPlan":
        """Canonicalize a coefficient mapping: sort, drop zeros, validate."""
        cleaned: dict[MultiIndex, Fraction] = {}
        for index, weight in alpha.items():
            w = rational(weight)
            if w == 0:
                continue
            key = tuple(index)
            cleaned[key] = cleaned.get(key, Fraction(0)) + w
        return cls(space, tuple(sorted(cleaned.items())))

    @property
    def alpha(self) -> dict[MultiIndex, Fraction]:
        return dict(self.terms)

    def coefficient(self, index: Sequence[int]) -> Fraction:
        wanted = tuple(index)
        for idx, weight in self.terms:
            if idx == wanted:
                return weight
        return Fraction(0)

    @property
    def support(self) -> tuple[MultiIndex, ...]:
        return tuple(index for index, _ in self.terms)


@dataclass(frozen=True)
class DensePlan:
    """Probability plan over ordered site tuples, stored sparsely."""

    space: StateSpace
    weights: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __post_init__(self) -> None:
        total = Fraction(0)
        previous: tuple[int, ...] | None = None
        for atom, weight in self.weights:
            _check_space(self.space, atom)
            if weight <= 0:
                raise InvalidInputError(f"weight for {atom} must be positive")
            if previous is not None and atom <= previous:
                raise InvalidInputError("atoms must be strictly increasing")
            previous = atom
            total += weight
        if total != 1:
            raise InvalidInputError(f"total mass is {total}, expected 1")

    @classmethod
    def make(
        cls, space: StateSpace, weights: Mapping[Sequence[int], int | str | Fraction]
    ) -> "DensePlan":
        cleaned: dict[tuple[int, ...], Fraction] = {}
        for atom, weight in weights.items():
            w = rational(weight)
            if w == 0:
                continue
            key = tuple(atom)
            cleaned[key] = cleaned.get(key, Fraction(0)) + w
        return cls(space, tuple(sorted(cleaned.items())))

    def weight(self, atom: Sequence[int]) -> Fraction:
        wanted = tuple(atom)
        for key, value in self.weights:
            if key == wanted:
                return value
        return Fraction(0)

    @property
    def support(self) -> tuple[tuple[int, ...], ...]:
        return tuple(atom for atom, _ in self.weights)


@dataclass(frozen=True)
class PairMarginal:
    """Two-point marginal as a matrix scaled by the site count.

    The entries are ``mu[i][j] = n_sites * p(i, j)`` where p is the two-point
    marginal probability, so a plan with uniform one-point marginal yields a
    bistochastic matrix.
    """

    space: StateSpace
    mu: tuple[tuple[Fraction, ...], ...]

    def entry(self, i: int, j: int) -> Fraction:
        return self.mu[i][j]

    def is_symmetric(self) -> bool:
        n = self.space.n_sites
        return all(self.mu[i][j] == self.mu[j][i] for i in range(n) for j in range(i))

    def is_bistochastic(self) -> bool:
        n = self.space.n_sites
        rows_ok = all(sum(self.mu[i][j] for j in range(n)) == 1 for i in range(n))
        cols_ok = all(sum(self.mu[i][j] for i in range(n)) == 1 for j in range(n))
        nonneg = all(self.mu[i][j] >= 0 for i in range(n) for j in range(n))
        return rows_ok and cols_ok and nonneg

    def upper_triangle(self) -> tuple[Fraction, ...]:
        """Off-diagonal upper entries (mu_12, mu_13, ..., mu_23, ...) row by row."""
        n = self.space.n_sites
        return tuple(self.mu[i][j] for i in range(n) for j in range(i + 1, n))


def symmetrize(plan: DensePlan) -> SymmetricPlan:
    """Image under the symmetrizer: collect weight by sorted multi-index."""
    alpha: dict[MultiIndex, Fraction] = {}
    for atom, weight in plan.weights:
        key = sorted_index(atom)
        alpha[key] = alpha.get(key, Fraction(0)) + weight
    return SymmetricPlan.make(plan.space, alpha)


def to_dense(plan: SymmetricPlan) -> DensePlan:
    """Spread each coefficient equally over the distinct orderings of its index."""
    weights: dict[tuple[int, ...], Fraction] = {}
    for index, coeff in plan.terms:
        orderings = sorted(set(permutations(index)))
        share = coeff / len(orderings)
        for atom in orderings:
            weights[atom] = weights.get(atom, Fraction(0)) + share
    return DensePlan.make(plan.space, weights)


def one_point_marginal(plan: DensePlan | SymmetricPlan, slot: int) -> tuple[Fraction, ...]:
    """Site masses seen in the given tensor slot (0-based)."""
    space = plan.space
    if not 0 <= slot < space.n_marginals:
        raise InvalidInputError(f"slot {slot} out of range for {space.n_marginals} marginals")
    masses = [Fraction(0)] * space.n_sites
    if isinstance(plan, SymmetricPlan):
        # All slots agree for a symmetric plan.
        for index, coeff in plan.terms:
            for site in set(index):
                masses[site] += coeff * Fraction(index.count(site), len(index))
        return tuple(masses)
    for atom, weight in plan.weights:
        masses[atom[slot]] += weight
    return tuple(masses)


def has_uniform_marginal(plan: DensePlan | SymmetricPlan) -> bool:
    """True when every slot marginal equals the uniform site distribution."""
    space = plan.space
    target = Fraction(1, space.n_sites)
    slots = range(space.n_marginals) if isinstance(plan, DensePlan) else (0,)
    return all(
        all(mass == target for mass in one_point_marginal(plan, slot)) for slot in slots
    )


def two_point_marginal(plan: SymmetricPlan) -> PairMarginal:
    """Project onto the first two slots and scale by the site count."""
    space = plan.space
    n = space.n_sites
    mu = [[Fraction(0)] * n for _ in range(n)]
    for index, coeff in plan.terms:
        for i in set(index):
            for j in set(index):
                share = pair_ordering_fraction(index, i, j)
                if share:
                    mu[i][j] += coeff * share * n
    return PairMarginal(space, tuple(tuple(row) for row in mu))


def dense_two_point_marginal(plan: DensePlan) -> PairMarginal:
    """Two-point marginal of an arbitrary (possibly non-symmetric) plan."""
    n = plan.space.n_sites
    mu = [[Fraction(0)] * n for _ in range(n)]
    for atom, weight in plan.weights:
        mu[atom[0]][atom[1]] += weight * n
    return PairMarginal(plan.space, tuple(tuple(row) for row in mu))


# --- JSON wire format -------------------------------------------------------
#
# {"n_marginals": 3, "n_sites": 3, "symmetric": true,
#  "terms": [{"index": [1, 1, 2], "weight": "1/2"}, ...]}
# Indices are 1-based in serialized form.


def plan_to_json_dict(plan: SymmetricPlan | DensePlan) -> dict:
    symmetric = isinstance(plan, SymmetricPlan)
    items = plan.terms if symmetric else plan.weights
    return {
        "n_marginals": plan.space.n_marginals,
        "n_sites": plan.space.n_sites,
        "symmetric": symmetric,
        "terms": [
            {"index": [i + 1 for i in index], "weight": rational_str(weight)}
            for index, weight in items
        ],
    }


def plan_from_json_dict(data: Mapping) -> SymmetricPlan | DensePlan:
    try:
        n_marginals = int(data["n_marginals"])
        n_sites = int(data["n_sites"])
        symmetric = bool(data["symmetric"])
        raw_terms = data["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed plan object: {exc}") from exc
    space = StateSpace.uniform(n_marginals, n_sites)
    entries: dict[tuple[int, ...], Fraction] = {}
    for term in raw_terms:
        try:
            index = tuple(int(i) - 1 for i in term["index"])
            weight = rational(term["weight"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed plan term {term!r}") from exc
        entries[index] = entries.get(index, Fraction(0)) + weight
    if symmetric:
        return SymmetricPlan.make(space, entries)
    return DensePlan.make(space, entries)

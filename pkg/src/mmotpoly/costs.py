"""Pairwise symmetric costs from potentials and metrics, with certified minimization.

Two numeric modes coexist: exact (all pair values are rationals, or the
explicit extended value +infinity) and float (irrational exponents).  Exact
comparisons are plain equality; float comparisons use an absolute tolerance
and report near-ties instead of resolving them.  Costs constructed from a
potential are mandatorily backed by a valid metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .errors import InvalidInputError, ModeError, ResourceBudgetError, UnsupportedError
from .exact import RationalMatrix, lp_solve, rational
from .plans import (
    DensePlan,
    PairMarginal,
    StateSpace,
    SymmetricPlan,
    symmetrize,
    validate_distance_matrix,
)
from .polytope import (
    DEFAULT_SUBSET_BUDGET,
    VertexCatalog,
    build_full_constraints,
)

FLOAT_TIE_TOLERANCE = 1e-12


class _PlusInfinity:
    """Extended value above every rational/float; absorbs addition and positive scaling."""

    _instance: "_PlusInfinity | None" = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "+infinity"

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("mmotpoly.+infinity")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if other <= 0:
            raise InvalidInputError("+infinity may only be scaled by positive weights")
        return self

    __rmul__ = __mul__


PLUS_INFINITY = _PlusInfinity()

CostValue = Fraction | float | _PlusInfinity


def is_infinite(value: CostValue) -> bool:
    return value is PLUS_INFINITY


def _is_integer_exponent(p) -> bool:
    return isinstance(p, int) or (isinstance(p, Fraction) and p.denominator == 1)


@dataclass(frozen=True)
class Potential:
    """Radial interaction potential evaluated at pair distances."""

    kind: str  # "power" | "neg_power" | "spring" | "quartic_fk" | "table"
    param: Fraction | float | None = None
    table: tuple[tuple[Fraction, Fraction | float], ...] | None = None

    @classmethod
    def power(cls, p: int | float | str | Fraction) -> "Potential":
        value = p if isinstance(p, float) else rational(p)
        if value <= 0:
            raise InvalidInputError("power exponent must be positive")
        return cls("power", value)

    @classmethod
    def neg_power(cls, alpha: int | float | str | Fraction) -> "Potential":
        value = alpha if isinstance(alpha, float) else rational(alpha)
        if value <= 0:
            raise InvalidInputError("inverse-power exponent must be positive")
        return cls("neg_power", value)

    @classmethod
    def spring(cls, a: int | float | str | Fraction) -> "Potential":
        value = a if isinstance(a, float) else rational(a)
        return cls("spring", value)

    @classmethod
    def quartic_fk(cls) -> "Potential":
        return cls("quartic_fk")

    @classmethod
    def from_table(
        cls, values: Mapping[int | str | Fraction, int | str | float | Fraction]
    ) -> "Potential":
        rows = []
        for distance, value in values.items():
            v = value if isinstance(value, float) else rational(value)
            rows.append((rational(distance), v))
        return cls("table", table=tuple(sorted(rows, key=lambda item: item[0])))

    def value_at(self, distance: Fraction) -> CostValue:
        """Potential value at an exact distance; exact in, exact out where possible."""
        d = rational(distance)
        if self.kind == "power":
            if isinstance(self.param, Fraction):
                if self.param.denominator == 1:
                    return d ** int(self.param)
                return float(d) ** float(self.param)
            return float(d) ** float(self.param)
        if self.kind == "neg_power":
            if d == 0:
                return PLUS_INFINITY
            if isinstance(self.param, Fraction) and self.param.denominator == 1:
                return 1 / d ** int(self.param)
            return float(d) ** -float(self.param)
        if self.kind == "spring":
            if isinstance(self.param, Fraction):
                return (d - self.param) ** 2
            return (float(d) - float(self.param)) ** 2
        if self.kind == "quartic_fk":
            return d**4 / 4 - d**3 / 3
        if self.kind == "table":
            assert self.table is not None
            for key, value in self.table:
                if key == d:
                    return value
            raise InvalidInputError(f"table potential has no value at distance {d}")
        raise UnsupportedError(f"unknown potential kind {self.kind!r}")

    def value_float(self, r: float) -> float:
        """Float evaluation at an arbitrary radius (numeric scans only)."""
        if self.kind == "power":
            return r ** float(self.param)
        if self.kind == "neg_power":
            return math.inf if r == 0 else r ** -float(self.param)
        if self.kind == "spring":
            return (r - float(self.param)) ** 2
        if self.kind == "quartic_fk":
            return r**4 / 4 - r**3 / 3
        if self.kind == "table":
            assert self.table is not None
            for key, value in self.table:
                if math.isclose(float(key), r, abs_tol=1e-12):
                    return float(value)
            raise InvalidInputError(f"table potential has no value at radius {r}")
        raise UnsupportedError(f"unknown potential kind {self.kind!r}")


@dataclass(frozen=True)
class CostSpec:
    """Pairwise symmetric cost with cached pair values over a validated metric."""

    space: StateSpace
    potential: Potential
    pair_values: tuple[tuple[CostValue, ...], ...]
    exact: bool

    @classmethod
    def build(cls, space: StateSpace, potential: Potential) -> "CostSpec":
        if not space.has_geometry:
            raise InvalidInputError("cost construction requires site geometry")
        distances = tuple(
            tuple(space.distance(i, j) for j in range(space.n_sites))
            for i in range(space.n_sites)
        )
        validate_distance_matrix(distances)
        values = tuple(
            tuple(potential.value_at(distances[i][j]) for j in range(space.n_sites))
            for i in range(space.n_sites)
        )
        flat = [v for row in values for v in row]
        has_float = any(isinstance(v, float) for v in flat)
        has_exact = any(isinstance(v, Fraction) for v in flat)
        if has_float and has_exact:
            raise ModeError("potential mixes exact and floating-point pair values")
        return cls(space, potential, values, exact=not has_float)

    def pair_value(self, i: int, j: int) -> CostValue:
        return self.pair_values[i][j]

    def atom_cost(self, atom: Sequence[int]) -> CostValue:
        """Total pair interaction of one ordered configuration."""
        zero: CostValue = Fraction(0) if self.exact else 0.0
        total = zero
        for i, j in combinations(range(len(atom)), 2):
            value = self.pair_values[atom[i]][atom[j]]
            if value is PLUS_INFINITY:
                return PLUS_INFINITY
            total = total + value
        return total


@dataclass(frozen=True)
class MinimizationResult:
    """Minimum value, the complete argmin vertex set, and a uniqueness certificate."""

    value: CostValue
    argmin_names: tuple[str, ...]
    argmin_plans: tuple[SymmetricPlan | DensePlan, ...]
    unique: bool | None


def evaluate_cost(plan: SymmetricPlan | DensePlan, cost: CostSpec) -> CostValue:
    """Total cost of a plan; +infinity when any support atom is infinite."""
    if plan.space.n_sites != cost.space.n_sites or plan.space.n_marginals != cost.space.n_marginals:
        raise InvalidInputError("plan and cost live on different state spaces")
    items = plan.terms if isinstance(plan, SymmetricPlan) else plan.weights
    zero: CostValue = Fraction(0) if cost.exact else 0.0
    total = zero
    for atom, weight in items:
        value = cost.atom_cost(atom)
        if value is PLUS_INFINITY:
            return PLUS_INFINITY
        share = weight if cost.exact else float(weight)
        total = total + share * value
    return total


def evaluate_reduced(p: PairMarginal, cost: CostSpec) -> CostValue:
    """Cost through the two-point marginal: pair count times the average pair value."""
    n = cost.space.n_sites
    pairs = math.comb(cost.space.n_marginals, 2)
    zero: CostValue = Fraction(0) if cost.exact else 0.0
    total = zero
    for i in range(n):
        for j in range(n):
            weight = p.mu[i][j]
            if weight == 0:
                continue
            if weight < 0:
                raise InvalidInputError("marginal has a negative entry")
            value = cost.pair_values[i][j]
            if value is PLUS_INFINITY:
                return PLUS_INFINITY
            share = Fraction(weight, n) if cost.exact else float(weight) / n
            total = total + share * value
    return pairs * total if cost.exact else pairs * total


def _collect_argmin(
    names: Sequence[str],
    plans: Sequence[SymmetricPlan | DensePlan],
    values: Sequence[CostValue],
    exact: bool,
) -> MinimizationResult:
    best = min(values)
    if exact:
        hits = [k for k, v in enumerate(values) if v == best]
        unique: bool | None = len(hits) == 1
    else:
        if best is PLUS_INFINITY:
            hits = [k for k, v in enumerate(values) if v is PLUS_INFINITY]
        else:
            hits = [
                k
                for k, v in enumerate(values)
                if v is not PLUS_INFINITY and v - best <= FLOAT_TIE_TOLERANCE
            ]
        # Near-ties cannot be resolved in float mode, only reported.
        unique = True if len(hits) == 1 else None
    return MinimizationResult(
        value=best,
        argmin_names=tuple(names[k] for k in hits),
        argmin_plans=tuple(plans[k] for k in hits),
        unique=unique,
    )


def minimize_over_catalog(cost: CostSpec, catalog: VertexCatalog) -> MinimizationResult:
    """Exact minimum over the catalog vertices; linearity extends it to the polytope."""
    values = [evaluate_cost(plan, cost) for plan in catalog.vertices]
    return _collect_argmin(catalog.names, catalog.vertices, values, cost.exact)


def minimize_full_certified(
    cost: CostSpec, budget: int = DEFAULT_SUBSET_BUDGET
) -> MinimizationResult:
    """Exact minimum over all plans with uniform marginals, not only symmetric ones.

    Solves the linear program over ordered-tuple weights and certifies
    uniqueness by checking that every coordinate is constant on the optimal
    face.  The minimizer plan is reported exactly when unique; otherwise one
    optimal vertex represents the face and the flag says not unique.
    """
    if not cost.exact:
        raise ModeError("certified full minimization requires an exact cost")
    system = build_full_constraints(cost.space)
    n_atoms = len(system.column_atoms)
    if n_atoms > budget:
        raise ResourceWarning  # pragma: no cover - replaced below
    atom_costs = [cost.atom_cost(atom) for atom in system.column_atoms]
    finite_cols = [j for j in range(n_atoms) if atom_costs[j] is not PLUS_INFINITY]
    if not finite_cols:
        return MinimizationResult(PLUS_INFINITY, (), (), None)
    matrix = RationalMatrix(
        tuple(tuple(row[j] for j in finite_cols) for row in system.matrix.entries)
    )
    objective = [atom_costs[j] for j in finite_cols]
    result = lp_solve(objective, matrix, system.rhs)
    if result.status == "infeasible":
        # Every feasible plan must load an infinite-cost atom.
        return MinimizationResult(PLUS_INFINITY, (), (), None)
    assert result.status == "optimal" and result.point is not None

    # Optimal-face test: pin the objective to its optimum, then bound each
    # coordinate from both sides.
    face_rows = tuple(matrix.entries) + (tuple(objective),)
    face = RationalMatrix(face_rows)
    face_rhs = list(system.rhs) + [result.value]
    unique = True
    for coord in range(len(finite_cols)):
        probe = [Fraction(0)] * len(finite_cols)
        probe[coord] = Fraction(1)
        low = lp_solve(probe, face, face_rhs)
        probe[coord] = Fraction(-1)
        high = lp_solve(probe, face, face_rhs)
        assert low.status == "optimal" and high.status == "optimal"
        if low.value != -high.value:
            unique = False
            break

    minimizer = DensePlan.make(
        cost.space,
        {
            system.column_atoms[finite_cols[k]]: v
            for k, v in enumerate(result.point)
            if v != 0
        },
    )
    from .monge import name_vertex  # deferred: avoids import cycle
    from .plans import symmetrize

    name = name_vertex(symmetrize(minimizer))
    return MinimizationResult(result.value, (name,), (minimizer,), unique)


def cost_polynomial(
    vertex: SymmetricPlan, family: str = "spring"
) -> tuple[Fraction, Fraction, Fraction]:
    """Exact coefficients (c0, c1, c2) of the spring-cost value c0 + c1 a + c2 a^2.

    The spring family is the only potential whose value is polynomial in its
    parameter; other families are rejected.
    """
    if family != "spring":
        raise UnsupportedError(f"cost polynomials are only defined for springs, not {family!r}")
    space = vertex.space
    if not space.has_geometry:
        raise InvalidInputError("cost polynomial requires site geometry")
    c0 = Fraction(0)
    c1 = Fraction(0)
    c2 = Fraction(0)
    for atom, weight in vertex.terms:
        for i, j in combinations(range(len(atom)), 2):
            d = space.distance(atom[i], atom[j])
            c2 += weight
            c1 -= 2 * weight * d
            c0 += weight * d * d
    return (c0, c1, c2)


def polynomial_value(coeffs: tuple[Fraction, Fraction, Fraction], a: Fraction) -> Fraction:
    c0, c1, c2 = coeffs
    return c0 + c1 * a + c2 * a * a


def polynomial_crossing(
    first: tuple[Fraction, Fraction, Fraction],
    second: tuple[Fraction, Fraction, Fraction],
) -> Fraction | None:
    """Parameter where two spring-cost curves cross, when the difference changes sign.

    All spring curves share the same quadratic coefficient, so differences are
    affine: there is at most one sign change, and none for parallel or
    identical curves.
    """
    d0 = first[0] - second[0]
    d1 = first[1] - second[1]
    d2 = first[2] - second[2]
    if d2 != 0:
        raise UnsupportedError("cost difference is not affine in the spring parameter")
    if d1 == 0:
        return None
    return -d0 / d1


# --- JSON wire format -------------------------------------------------------
#
# {"metric": {"coords1d": [1, 2, 3]} or {"matrix": [["0","1","2"], ...]},
#  "potential": {"kind": "spring", "a": "3/4"}}
# Rational parameters are "p/q" strings; float parameters are JSON numbers.

_POTENTIAL_PARAM_KEYS = {"power": "p", "neg_power": "alpha", "spring": "a"}


def cost_to_json_dict(cost: CostSpec) -> dict:
    from .exact import rational_str

    space = cost.space
    if space.coords is not None:
        metric: dict = {"coords1d": [rational_str(c) for c in space.coords]}
    else:
        metric = {
            "matrix": [
                [rational_str(space.distance(i, j)) for j in range(space.n_sites)]
                for i in range(space.n_sites)
            ]
        }
    potential: dict = {"kind": cost.potential.kind}
    key = _POTENTIAL_PARAM_KEYS.get(cost.potential.kind)
    if key is not None:
        param = cost.potential.param
        potential[key] = param if isinstance(param, float) else rational_str(param)
    if cost.potential.kind == "table":
        from .exact import rational_str as rs

        potential["values"] = [
            [rs(d), v if isinstance(v, float) else rs(v)]
            for d, v in cost.potential.table
        ]
    return {"metric": metric, "potential": potential}


def cost_from_json_dict(data: Mapping, n_marginals: int) -> CostSpec:
    try:
        metric = data["metric"]
        pot = data["potential"]
        kind = pot["kind"]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed cost object: {exc}") from exc
    if "coords1d" in metric:
        space = StateSpace.from_coords(n_marginals, metric["coords1d"])
    elif "matrix" in metric:
        space = StateSpace.from_distances(n_marginals, metric["matrix"])
    else:
        raise InvalidInputError("metric must provide coords1d or matrix")

    def param(key: str):
        try:
            raw = pot[key]
        except KeyError as exc:
            raise InvalidInputError(f"potential {kind!r} needs parameter {key!r}") from exc
        return raw if isinstance(raw, float) else rational(raw)

    if kind == "power":
        potential = Potential.power(param("p"))
    elif kind == "neg_power":
        potential = Potential.neg_power(param("alpha"))
    elif kind == "spring":
        potential = Potential.spring(param("a"))
    elif kind == "quartic_fk":
        potential = Potential.quartic_fk()
    elif kind == "table":
        try:
            rows = {d: v if isinstance(v, float) else rational(v) for d, v in pot["values"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError("table potential needs [distance, value] pairs") from exc
        potential = Potential.from_table(rows)
    else:
        raise InvalidInputError(f"unknown potential kind {kind!r}")
    return CostSpec.build(space, potential)

"""Exact rational scalars, dense rational linear algebra, and an exact simplex solver.

All arithmetic is done with ``fractions.Fraction``, which already guarantees the
canonical form (reduced, positive denominator) required everywhere else in the
package.  Elimination routines are fraction-free (Bareiss) so intermediate
coefficient growth stays bounded, and they accept plain-int rows as a fast path
for the vertex enumerator.  The simplex solver uses Bland's rule and is
therefore guaranteed to terminate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidInputError

Rational = Fraction


def rational(value: int | str | Fraction) -> Fraction:
    """Parse a rational from an int, a Fraction, or a string "p/q" / "p"."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"not a rational: {value!r}") from exc
    raise InvalidInputError(f"cannot interpret {type(value).__name__} as a rational")


def rational_str(value: Fraction) -> str:
    """Serialize a rational as "p/q", or "p" when the denominator is 1."""
    return str(Fraction(value))


@dataclass(frozen=True)
class RationalMatrix:
    """Immutable dense matrix of exact rationals."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        widths = {len(row) for row in self.entries}
        if len(widths) > 1:
            raise InvalidInputError("matrix rows have unequal lengths")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int | str | Fraction]]) -> "RationalMatrix":
        return cls(tuple(tuple(rational(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "RationalMatrix":
        zero = Fraction(0)
        return cls(tuple((zero,) * n_cols for _ in range(n_rows)))

    @property
    def n_rows(self) -> int:
        return len(self.entries)

    @property
    def n_cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.entries))) if self.entries else self


def _exact_div(num, den):
    """Division that is exact for the Bareiss recurrence (int or Fraction)."""
    if isinstance(num, int) and isinstance(den, int):
        return num // den
    return num / den


def _eliminate_below(rows: list[list], n_lead: int | None = None) -> list[int]:
    """Fraction-free forward elimination on the leading ``n_lead`` columns.

    Mutates ``rows`` into upper echelon form and returns the pivot columns.
    Trailing columns (beyond ``n_lead``) are carried along, which is how
    augmented systems are handled.
    """
    if not rows:
        return []
    n_rows = len(rows)
    width = len(rows[0])
    if n_lead is None:
        n_lead = width
    prev = 1
    piv_row = 0
    piv_cols: list[int] = []
    for col in range(n_lead):
        if piv_row >= n_rows:
            break
        pivot_at = next((r for r in range(piv_row, n_rows) if rows[r][col]), None)
        if pivot_at is None:
            continue
        if pivot_at != piv_row:
            rows[piv_row], rows[pivot_at] = rows[pivot_at], rows[piv_row]
        pivot = rows[piv_row][col]
        for r in range(piv_row + 1, n_rows):
            factor = rows[r][col]
            row_r, row_p = rows[r], rows[piv_row]
            if factor:
                for c in range(col, width):
                    row_r[c] = _exact_div(row_r[c] * pivot - factor * row_p[c], prev)
            else:
                # The zero-factor row still picks up the pivot/prev scaling,
                # otherwise later divisions stop being exact.
                for c in range(col, width):
                    if row_r[c]:
                        row_r[c] = _exact_div(row_r[c] * pivot, prev)
        prev = pivot
        piv_cols.append(col)
        piv_row += 1
    return piv_cols


def rank(matrix: RationalMatrix) -> int:
    """Exact rank via fraction-free elimination."""
    return len(_eliminate_below([list(row) for row in matrix.entries]))


def solve_square_system(
    matrix: RationalMatrix, rhs: Sequence[Fraction]
) -> tuple[Fraction, ...] | None:
    """Solve ``matrix @ x = rhs`` when the columns are linearly independent.

    Accepts square systems and tall systems (more rows than columns).  Returns
    the unique solution, or None when the columns are dependent or the system
    is inconsistent.
    """
    if matrix.n_rows != len(rhs):
        raise InvalidInputError(
            f"matrix has {matrix.n_rows} rows but right-hand side has {len(rhs)} entries"
        )
    if matrix.n_cols > matrix.n_rows:
        raise InvalidInputError(
            "system has more columns than rows; not a candidate for a unique solution"
        )
    return _solve_independent(
        [list(row) for row in matrix.entries], [rational(x) for x in rhs]
    )


def _solve_independent(a_rows: list[list], rhs: list) -> tuple[Fraction, ...] | None:
    """Unique solution of A x = b, or None when columns are dependent or b is unreachable."""
    n_cols = len(a_rows[0]) if a_rows else 0
    if n_cols == 0:
        return () if all(x == 0 for x in rhs) else None
    aug = [a_rows[r] + [rhs[r]] for r in range(len(a_rows))]
    piv_cols = _eliminate_below(aug, n_lead=n_cols)
    if len(piv_cols) < n_cols:
        return None  # dependent columns
    for r in range(n_cols, len(aug)):
        if aug[r][n_cols]:
            return None  # inconsistent
    # Pivots sit on the diagonal of the leading block; back-substitute exactly.
    solution = [Fraction(0)] * n_cols
    for k in range(n_cols - 1, -1, -1):
        row = aug[k]
        acc = Fraction(row[n_cols])
        for c in range(k + 1, n_cols):
            if row[c]:
                acc -= Fraction(row[c]) * solution[c]
        solution[k] = acc / Fraction(row[k])
    return tuple(solution)


def solve_integer_columns(
    columns: Sequence[Sequence[int]], rhs: Sequence[Fraction]
) -> tuple[Fraction, ...] | None:
    """Fast path used by vertex enumeration: integer column vectors, rational rhs.

    Scales the right-hand side to integers and runs the fraction-free solver on
    plain ints (much faster than Fraction arithmetic in the inner loop).
    """
    n_rows = len(rhs)
    scale = math.lcm(*(x.denominator for x in rhs)) if rhs else 1
    b_int = [int(x * scale) for x in rhs]
    a_rows = [[col[r] for col in columns] for r in range(n_rows)]
    scaled = _solve_independent(a_rows, b_int)
    if scaled is None:
        return None
    return tuple(Fraction(v, scale) for v in scaled)


@dataclass(frozen=True)
class LpResult:
    """Outcome of an exact linear program."""

    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


def lp_solve(
    objective: Sequence[Fraction],
    a_eq: RationalMatrix,
    b_eq: Sequence[Fraction],
    nonneg: bool = True,
) -> LpResult:
    """Exact minimum of ``objective @ x`` subject to ``a_eq @ x = b_eq`` and x >= 0.

    With ``nonneg=False`` the variables are free (handled by splitting each
    variable into a difference of two nonnegative ones).  Two-phase simplex
    with Bland's pivot rule, so the solver always terminates; infeasibility and
    unboundedness are reported in the result status, never as exceptions.
    """
    n = a_eq.n_cols
    m = a_eq.n_rows
    if len(objective) != n:
        raise InvalidInputError(f"objective has {len(objective)} entries for {n} columns")
    if len(b_eq) != m:
        raise InvalidInputError(f"right-hand side has {len(b_eq)} entries for {m} rows")
    cost = [rational(c) for c in objective]
    rhs = [rational(b) for b in b_eq]

    if not nonneg:
        split_rows = tuple(row + tuple(-x for x in row) for row in a_eq.entries)
        split = lp_solve(cost + [-c for c in cost], RationalMatrix(split_rows), rhs, nonneg=True)
        if not split.is_optimal or split.point is None:
            return split
        point = tuple(split.point[j] - split.point[n + j] for j in range(n))
        return LpResult("optimal", split.value, point)

    rows = [list(row) for row in a_eq.entries]
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]

    # Phase 1 tableau: [A | I | b], basis = artificial variables.
    tableau = [rows[i] + [Fraction(int(i == k)) for k in range(m)] + [rhs[i]] for i in range(m)]
    basis = list(range(n, n + m))
    phase1_cost = [Fraction(0)] * n + [Fraction(1)] * m
    status = _simplex_iterate(tableau, basis, phase1_cost, n + m)
    assert status == "optimal"  # phase 1 is bounded below by zero
    if sum((tableau[i][-1] for i in range(len(tableau)) if basis[i] >= n), Fraction(0)) != 0:
        return LpResult("infeasible")

    # Drive leftover artificial variables out of the basis; drop redundant rows.
    keep: list[int] = []
    for i in range(len(tableau)):
        if basis[i] < n:
            keep.append(i)
            continue
        pivot_col = next((j for j in range(n) if tableau[i][j]), None)
        if pivot_col is None:
            continue  # redundant constraint row
        _pivot(tableau, i, pivot_col, basis)
        keep.append(i)
    tableau = [tableau[i][:n] + [tableau[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]

    status = _simplex_iterate(tableau, basis, cost, n)
    if status == "unbounded":
        return LpResult("unbounded")
    point = [Fraction(0)] * n
    for i, var in enumerate(basis):
        point[var] = tableau[i][-1]
    value = sum((cost[j] * point[j] for j in range(n)), Fraction(0))
    return LpResult("optimal", value, tuple(point))


def _pivot(tableau: list[list[Fraction]], row: int, col: int, basis: list[int]) -> None:
    pivot = tableau[row][col]
    tableau[row] = [x / pivot for x in tableau[row]]
    for r in range(len(tableau)):
        if r != row and tableau[r][col]:
            factor = tableau[r][col]
            tableau[r] = [a - factor * b for a, b in zip(tableau[r], tableau[row])]
    basis[row] = col


def _simplex_iterate(
    tableau: list[list[Fraction]], basis: list[int], cost: list[Fraction], n_total: int
) -> str:
    """Run simplex iterations with Bland's rule until optimal or unbounded."""
    while True:
        in_basis = set(basis)
        entering = None
        for j in range(n_total):
            if j in in_basis:
                continue
            reduced = cost[j] - sum(
                (cost[basis[i]] * tableau[i][j] for i in range(len(tableau))), Fraction(0)
            )
            if reduced < 0:
                entering = j
                break  # Bland: first (lowest-index) improving column
        if entering is None:
            return "optimal"
        leaving = None
        best_ratio: Fraction | None = None
        for i in range(len(tableau)):
            coeff = tableau[i][entering]
            if coeff > 0:
                ratio = tableau[i][-1] / coeff
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and leaving is not None and basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving is None:
            return "unbounded"
        _pivot(tableau, leaving, entering, basis)

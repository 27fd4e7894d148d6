"""Set-function tables over subsets of a variable universe.

A table assigns a value to every subset mask of ``[0, 2**n)`` with value 0
on the empty set.  Entropy tables, counterexample constructions, and LP
solutions all share this representation; values are exact ``Fraction``s or
floats depending on the source.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .core import CIError, CISet, CITriple, InternalCheckError, VarSet, check_fits

_DEFINITIONAL_CHECK_MAX_N = 8


@dataclass(frozen=True)
class PolymatroidTable:
    """A value per subset mask; ``values[0]`` must be 0."""

    n: int
    values: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != 1 << self.n:
            raise CIError(f"expected {1 << self.n} entries, got {len(self.values)}")
        if self.values[0] != 0:
            raise CIError("the empty set must have value 0")

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (Fraction, int)) for v in self.values)

    def value(self, vs: VarSet | int):
        mask = vs.bits if isinstance(vs, VarSet) else vs
        return self.values[mask]

    def cmi(self, t: CITriple):
        """Conditional mutual information of (x;y|z) read off the table."""
        check_fits(t, self.n)
        v = self.values
        zx = t.z.bits | t.x.bits
        zy = t.z.bits | t.y.bits
        return v[zx] + v[zy] - v[zx | t.y.bits] - v[t.z.bits]

    def conditional_entropy(self, b: VarSet, a: VarSet):
        check_fits(a | b, self.n)
        return self.values[a.bits | b.bits] - self.values[a.bits]

    def sigma_value(self, sigma: CISet):
        return sum(self.cmi(t) for t in sigma)

    def __repr__(self) -> str:
        return f"PolymatroidTable(n={self.n}, h(full)={self.values[-1]})"


def cond_mutual_information(table: PolymatroidTable, t: CITriple):
    return table.cmi(t)


def _elemental_route(table: PolymatroidTable, tol) -> bool:
    n = table.n
    v = table.values
    full = (1 << n) - 1
    if not -tol <= v[0] <= tol:
        return False
    for i in range(n):
        if v[full] - v[full ^ (1 << i)] < -tol:
            return False
    for i, j in combinations(range(n), 2):
        bi, bj = 1 << i, 1 << j
        rest = full ^ bi ^ bj
        k = rest
        while True:
            if v[k | bi] + v[k | bj] - v[k | bi | bj] - v[k] < -tol:
                return False
            if k == 0:
                break
            k = (k - 1) & rest
    return True


def _definitional_route(table: PolymatroidTable, tol) -> bool:
    n = table.n
    v = table.values
    size = 1 << n
    for b in range(size):
        a = b
        while True:  # all subsets a of b
            if v[b] - v[a] < -tol:
                return False
            if a == 0:
                break
            a = (a - 1) & b
    for a in range(size):
        for b in range(size):
            if v[a] + v[b] - v[a | b] - v[a & b] < -tol:
                return False
    return True


def is_polymatroid(table: PolymatroidTable, tol=0) -> bool:
    """Whether the table is normalized, monotone, and submodular.

    Two routes are evaluated: the definition over all subset pairs, and the
    single-element generating inequalities.  They are provably equivalent,
    so a disagreement is raised rather than returned.  For n above
    ``_DEFINITIONAL_CHECK_MAX_N`` only the generating route runs.
    """
    elem = _elemental_route(table, tol)
    if table.n <= _DEFINITIONAL_CHECK_MAX_N:
        full = _definitional_route(table, tol)
        if full != elem:
            raise InternalCheckError(
                f"polymatroid check routes disagree (definition={full}, elemental={elem})"
            )
    return elem

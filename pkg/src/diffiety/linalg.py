"""Exact linear algebra over the rational function field, plus generic-point rank."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .expr import ONE, ZERO, Expr, Fn, substitute

__all__ = ["solve", "solve_linear_ansatz", "rank", "rank_at_point", "sample_point", "SAMPLE_POOL"]

# Sample values for generic-point evaluation: small rationals avoiding 0 and 1,
# which tend to sit on special loci (u0 = 0, u1 = 1, ...).
SAMPLE_POOL = tuple(
    Fraction(a, b) for a in range(-29, 30) for b in (1, 2, 3, 5, 7) if a not in (0, b, -b)
)


def _size(e: Expr) -> int:
    return len(e.num) + len(e.den)


def _eliminate(rows: list[list[Expr]], ncols: int):
    """Row-reduce in place.  Returns the pivot positions as (row, col) pairs.

    Pivot rule: scan columns left to right; among remaining rows with a
    nonzero entry take the one whose entry has the smallest term count
    (ties by row order).
    """
    pivots = []
    r = 0
    for c in range(ncols):
        best = None
        for i in range(r, len(rows)):
            e = rows[i][c]
            if e and (best is None or _size(e) < _size(rows[best][c])):
                best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r][c]
        inv = ONE / piv
        rows[r] = [x * inv if x else x for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b if b else a for a, b in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
        if r == len(rows):
            break
    return pivots


def solve(matrix: Sequence[Sequence[Expr]], rhs: Sequence[Expr]):
    """One solution of ``matrix @ c = rhs`` or ``None`` if inconsistent.

    Free unknowns are set to zero.
    """
    ncols = len(matrix[0]) if matrix else 0
    rows = [list(row) + [b] for row, b in zip(matrix, rhs)]
    pivots = _eliminate(rows, ncols)
    pr = {r for r, _ in pivots}
    for i, row in enumerate(rows):
        if i not in pr and row[ncols]:
            return None
    sol = [ZERO] * ncols
    for r, c in pivots:
        sol[c] = rows[r][ncols]
    return sol


def rank(matrix: Sequence[Sequence[Expr]]) -> int:
    if not matrix:
        return 0
    rows = [list(r) for r in matrix]
    return len(_eliminate(rows, len(rows[0])))


def sample_point(atoms, rng: random.Random) -> dict:
    return {a: Expr.const(rng.choice(SAMPLE_POOL)) for a in sorted(atoms)}


def rank_at_point(matrix: Sequence[Sequence[Expr]], point: dict) -> int:
    """Rank of the matrix after substituting numbers for every atom."""
    if not matrix:
        return 0
    vals = []
    for row in matrix:
        out = []
        for e in row:
            v = substitute(e, point) if e else e
            if not v.is_constant:
                raise ValueError(f"entry {v} not fully evaluated")
            out.append(v.value)
        vals.append(out)
    return _frac_rank(vals)


def _frac_rank(rows: list[list[Fraction]]) -> int:
    rows = [r[:] for r in rows]
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def evaluation_atoms(matrix) -> set:
    out = set()
    for row in matrix:
        for e in row:
            for a in e.atoms():
                if isinstance(a, Fn):
                    raise ValueError("generic-point rank needs concrete entries, not formal symbols")
                out.add(a)
    return out


def solve_linear_ansatz(exprs, unknowns):
    """Solve ``e = 0`` for each ``e`` linear in the ``unknowns`` atoms, identically in all other atoms.

    Every monomial in the remaining atoms gives one linear equation with
    rational coefficients.  Returns ``{unknown: Expr}`` (free unknowns set to
    zero) or ``None`` when inconsistent.
    """
    unknowns = list(unknowns)
    pos = {u: k for k, u in enumerate(unknowns)}
    rows: dict = {}
    for e in exprs:
        for m, c in e.num.items():
            rest, hit = [], None
            for a, k in m:
                if a in pos:
                    if hit is not None or k != 1:
                        raise ValueError("ansatz equation is not linear in the unknowns")
                    hit = pos[a]
                else:
                    rest.append((a, k))
            key = (id(e), tuple(rest))
            row = rows.setdefault(key, [Fraction(0)] * (len(unknowns) + 1))
            row[len(unknowns) if hit is None else hit] += Fraction(c)
    sol = _frac_solve([r[:-1] for r in rows.values()], [-r[-1] for r in rows.values()], len(unknowns))
    return None if sol is None else {u: Expr.const(v) for u, v in zip(unknowns, sol)}


def _frac_solve(matrix, rhs, ncols):
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[ncols] for row in rows[r:]):
        return None
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = rows[i][ncols]
    return sol

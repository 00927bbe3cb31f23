"""Determining systems: unknown function symbols plus equations required to vanish."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..expr import Expr, Fn, substitute_function

__all__ = ["Equation", "DeterminingSystem", "PivotError"]


class PivotError(ArithmeticError):
    """An elimination pivot vanishes identically."""


@dataclass(frozen=True)
class Equation:
    label: str  # which coefficient or relation produced it
    expr: Expr

    def __str__(self):
        return f"{self.label}: {self.expr} = 0"


@dataclass
class DeterminingSystem:
    unknowns: dict  # name -> tuple of argument atoms
    equations: list = field(default_factory=list)
    solved: dict = field(default_factory=dict)  # name -> Expr in the remaining unknowns
    notes: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, label: str, e: Expr):
        self.equations.append(Equation(label, e))

    def nontrivial(self) -> list:
        return [q for q in self.equations if not q.expr.is_zero]

    def _plug(self, e: Expr, candidates: Mapping[str, Expr]) -> Expr:
        for name, cand in candidates.items():
            e = substitute_function(e, name, cand)
        return e

    def solve_for(self, candidates: Mapping[str, Expr]) -> dict:
        """Values of the solved unknowns for the given candidate functions."""
        return {k: self._plug(v, candidates) for k, v in self.solved.items()}

    def residuals(self, candidates: Mapping[str, Expr]) -> list:
        """``(label, value)`` for every equation after substituting the candidates."""
        return [(q.label, self._plug(q.expr, candidates)) for q in self.equations]

    def satisfied_by(self, candidates: Mapping[str, Expr]) -> bool:
        return all(v.is_zero for _, v in self.residuals(candidates))

    def failures(self, candidates: Mapping[str, Expr]) -> list:
        return [(lab, v) for lab, v in self.residuals(candidates) if not v.is_zero]

    def formal(self, name: str) -> Expr:
        return Expr.atom(Fn(name, self.unknowns[name]))

"""Greedy selection of the involutive family and its characters ``sigma_1..sigma_n``."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from ..forms import NotInSpan, OneForm, lie_total, represent
from ..jet import Diffiety
from .. import linalg

__all__ = ["InvolutiveFamily", "involutive_family", "Inconclusive", "DEFAULT_SEEDS"]

DEFAULT_SEEDS = (0, 1, 2)


class Inconclusive(RuntimeError):
    """Generic-point trials disagree; the symbolic rank is unresolved."""


@dataclass
class InvolutiveFamily:
    sigma: tuple
    selected: list  # per step: indices into the basis
    level: int | None
    directions: tuple
    certificate: list = field(default_factory=list)  # (seed, sigma) per trial
    images: list = field(default_factory=list, repr=False)  # per step: selected L_{D_i} forms
    basis: list = field(default_factory=list, repr=False)

    @property
    def stable(self) -> bool:
        return len({s for _, s in self.certificate}) == 1

    def verify_exact(self) -> list:
        """For each selected image, whether it lies outside the span of ``Omega_l`` and the other images.

        Uses exact elimination over the function field; ``True`` entries mean
        ``represent`` returned ``NotInSpan``.
        """
        flat = [w for step in self.images for w in step]
        out = []
        for k, w in enumerate(flat):
            others = self.basis + flat[:k] + flat[k + 1 :]
            out.append(represent(w, others) is NotInSpan)
        return out


def _rows(forms: Sequence[OneForm]):
    atoms = sorted({a for w in forms for a in w.support()})
    return atoms, [[w[a] for a in atoms] for w in forms]


def _select(d: Diffiety, basis, directions, rank_fn):
    sigma, selected, images = [], [], []
    prev: list = []
    for i in directions:
        step, step_img = [], []
        base_rank = rank_fn(basis + prev)
        for k, w in enumerate(basis):
            img = lie_total(d, w, i)
            r = rank_fn(basis + prev + step_img + [img])
            if r > base_rank + len(step_img):
                step.append(k)
                step_img.append(img)
        sigma.append(len(step))
        selected.append(step)
        images.append(step_img)
        prev = prev + step_img
    return tuple(sigma), selected, images


def involutive_family(
    d: Diffiety,
    basis: Sequence[OneForm],
    directions: Sequence[int] | None = None,
    seeds: Sequence[int] = DEFAULT_SEEDS,
    level: int | None = None,
) -> InvolutiveFamily:
    """Characters of ``Omega_l`` spanned by ``basis`` along the direction order.

    Step ``i`` keeps each basis form whose ``L_{D_i}`` image is independent
    modulo ``Omega_l`` and the images already kept.  Ranks are evaluated at
    random rational points, one trial per seed; all trials must agree.
    """
    basis = list(basis)
    directions = tuple(directions) if directions is not None else tuple(range(1, d.n + 1))
    if not basis:
        return InvolutiveFamily(tuple(0 for _ in directions), [[] for _ in directions], level, directions,
                                [(s, tuple(0 for _ in directions)) for s in seeds])
    results = []
    for seed in seeds:
        rng = random.Random(seed)
        points: dict = {}

        def rank_fn(forms):
            if not forms:
                return 0
            _, m = _rows(forms)
            for a in linalg.evaluation_atoms(m):
                if a not in points:
                    points[a] = linalg.sample_point([a], rng)[a]
            return linalg.rank_at_point(m, points)

        results.append((seed, _select(d, basis, directions, rank_fn)))
    sigmas = [(s, r[0]) for s, r in results]
    if len({s for _, s in sigmas}) != 1:
        raise Inconclusive(f"trials disagree: {sigmas}")
    sigma, selected, images = results[0][1]
    return InvolutiveFamily(sigma, selected, level, directions, sigmas, images, basis)

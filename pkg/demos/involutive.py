"""Characters of an involutive family on the free jet space M(1, 2)."""

from diffiety import free_jets
from diffiety.reduce import filtration_basis, involutive_family

d = free_jets(1, 2)
for level in (0, 1, 2):
    basis = [w for _, w in filtration_basis(d, level)]
    fam = involutive_family(d, basis, seeds=(0, 1, 2), level=level)
    print(f"l = {level}: sigma = {fam.sigma}  stable = {fam.stable}  exact = {all(fam.verify_exact())}")

"""Standard basis of u'' = u*v' and a symmetry candidate.

Run with ``python3 demos/standard_basis.py``.
"""

from diffiety import render
from diffiety.reduce import determining_ode2, standard_basis_ode2, symmetry_check_ode2
from diffiety.reduce.ode2 import ODE2_ARGS

x, u0, v0, u1, v1, v2 = ODE2_ARGS

sb = standard_basis_ode2(u0 * v1)
print("classification:", sb.classification.value)
for name in ("A", "B", "C", "M", "N", "Delta"):
    print(f"  {name} = {render(getattr(sb, name))}")

ds = determining_ode2(sb)
print("\ndetermining system:")
for eq in ds.equations:
    print(f"  {eq.label}: {render(eq.expr)} = 0")

# u0^2 solves the system; a generic guess does not
for p in (u0**2, x * u0):
    chk = symmetry_check_ode2(sb, p, ds)
    verdict = "symmetry" if chk.passed else "rejected"
    print(f"\np = {render(p)}: {verdict}")
    print(f"  z = {render(chk.z)}, lambda = {render(chk.lam)}")

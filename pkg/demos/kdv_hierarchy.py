"""First few KdV flows from the isospectral recurrences."""

from diffiety import render
from diffiety.kdv import hierarchy, verify_flow

for n in range(4):
    res = hierarchy(n)
    line = f"level {n}: q_t = {render(res.Q)}"
    if res.factored is not None:
        c, G = res.factored
        line += f"\n         = ({render(c)}) D({render(G)})"
    print(line)
    print("  checks:", "ok" if res.passed else res.checks)
    if n <= 2:
        print("  flow check:", "ok" if verify_flow(res, k=3).passed else "FAILED")

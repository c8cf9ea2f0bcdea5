"""Compare the three lower bounds on the best pinned distance dimension.

For a planar set of dimension s <= 1 the bound 3s/4 sits above the two
earlier bounds everywhere on (0, 1). They meet each other near s = 0.4767,
where the gap to 3s/4 is roughly 0.09.
"""

from dyadlab.experiments import bound_crossover, bound_curves, fig1_grid, strictly_dominates

points = bound_curves(fig1_grid(16))
print(f"{'s':>8} {'3s/4':>8} {'sw':>8} {'fs':>8}")
for p in points:
    print(f"{p.s:8.4f} {p.ours:8.4f} {p.sw:8.4f} {p.fs:8.4f}")

s_star = bound_crossover()
(p,) = bound_curves([s_star])
print(f"\nearlier bounds coincide at s = {s_star:.6f} with value {p.sw:.5f}; 3s/4 gives {p.ours:.5f}")
print("3s/4 strictly dominates on a 512-point grid:", strictly_dominates(bound_curves(fig1_grid(512))))

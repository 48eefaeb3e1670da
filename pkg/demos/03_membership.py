"""Distance from a few points to the linear-order polytope on three items."""
import numpy as np

from orderflow import build_network, build_projection, membership_distance
from orderflow.relations import pair_list

net = build_network(3, "lo")
pm = build_projection(net)
pairs = pair_list(3)

cyclic = np.zeros(len(pairs))
for pair in [(0, 1), (1, 2), (2, 0)]:
    cyclic[pairs.index(pair)] = 1.0

points = {
    "all halves": np.full(len(pairs), 0.5),
    "cyclic": cyclic,
    "random": np.random.default_rng(0).uniform(size=len(pairs)),
}
for name, p in points.items():
    dist, nearest, inside = membership_distance(net, pm, p)
    print(f"{name:10s} inside={inside!s:5s} distance={dist:.6f}")
    if not inside:
        print("           nearest", np.round(nearest, 4))

# the cyclic point sits at distance sqrt(2/3) once the reverse pairs are counted
print("sqrt(2/3) =", np.sqrt(2 / 3))

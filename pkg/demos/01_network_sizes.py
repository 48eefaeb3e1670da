"""Build each network and compare its size with the closed forms.

For semiorders the built network is printed next to the published arc
count; the two disagree from n = 3 on.
"""
from orderflow.flowpoly import canonical_description, path_count
from orderflow.networks import build_network, count_arcs_formula, count_nodes_formula

for kind in ("lo", "wo", "io", "so"):
    print(f"{kind}:")
    for n in range(1, 6):
        net = build_network(n, kind)
        desc = canonical_description(net)
        print(f"  n={n}  nodes={net.num_nodes:5d} (formula {count_nodes_formula(n, kind):5d})"
              f"  arcs={net.num_arcs:6d} (formula {count_arcs_formula(n, kind):6d})"
              f"  paths={path_count(net):6d}  description size={desc.size()}")

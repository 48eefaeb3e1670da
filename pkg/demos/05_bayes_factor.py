"""Encompassing-prior Bayes factors for concordant and cyclic data."""
from orderflow import BayesConfig, ChoiceData, bayes_factor, build_network, build_projection

net = build_network(3, "lo")
pm = build_projection(net)
cfg = BayesConfig(sample_count=2000, seed=1)

prior = bayes_factor(net, pm, None, cfg)
print(f"prior inside proportion {prior.prior_proportion:.3f} (exact value 2/3)")

datasets = {
    "concordant": {(0, 1): (30, 0, 0), (1, 2): (30, 0, 0), (0, 2): (30, 0, 0)},
    "cyclic": {(0, 1): (30, 0, 0), (1, 2): (30, 0, 0), (0, 2): (0, 30, 0)},
}
for name, counts in datasets.items():
    res = bayes_factor(net, pm, ChoiceData.from_counts(3, counts), cfg, prior_hits=prior.prior_hits)
    print(f"{name:10s} bf={res.bf:.3f} +/- {res.mc_stderr:.3f}")

"""
Premium pricing, experience rating, and adverse selection
=========================================================

Shows the Beta-Bernoulli risk posterior converging on an agent's true
misbehavior rate, then compares who buys coverage under a flat premium
versus experience-rated quotes.
"""

import numpy as np

from insured_agents import (
    AgentProfile,
    GainModel,
    MechanismParams,
    RiskPosterior,
    decide_purchase,
    format_units,
    price_premium,
    units,
    update_posterior,
)

rng = np.random.default_rng(7)

# Part 1: the posterior tracks the true rate.
print("experience rating")
for theta in (0.05, 0.3, 0.7):
    post = RiskPosterior(1, 1)
    for draw in rng.random(5000) < theta:
        post = update_posterior(post, bool(draw))
    print(f"  true rate {theta:.2f} -> posterior mean {post.mean:.3f}")

# Part 2: a flat premium attracts the risky tail of the population.
params = MechanismParams(
    L=units(100), G=units(200), S_A=units(30), S_I=units(150),
    B=units(20), F=units(50), R=units(10), V_future=units(20),
    Pi_honest=units(5),
)
population = [
    AgentProfile(id=f"a{k}", theta=float(rng.random()),
                 gain=GainModel("fixed", units(200)))
    for k in range(200)
]
avg_all = np.mean([a.theta for a in population])

flat_quote = units(40)
flat_buyers = [a for a in population if decide_purchase(a, flat_quote, params)]
print(f"\nflat premium {format_units(flat_quote)}")
print(f"  population mean risk: {avg_all:.3f}")
print(f"  buyer mean risk:      {np.mean([a.theta for a in flat_buyers]):.3f}"
      f"  ({len(flat_buyers)} of {len(population)} buy)")

# Part 3: rating each agent on its own history shrinks the gap.
rated_buyers = []
for agent in population:
    post = RiskPosterior(1, 1)
    for draw in rng.random(200) < agent.theta:
        post = update_posterior(post, bool(draw))
    quote = price_premium(post, params.L, loading=0.0)
    if decide_purchase(agent, quote, params):
        rated_buyers.append(agent)
print("experience-rated quotes")
print(f"  buyer mean risk:      {np.mean([a.theta for a in rated_buyers]):.3f}"
      f"  ({len(rated_buyers)} of {len(population)} buy)")

"""
Simulating the mechanism at scale
=================================

Runs seeded multi-episode scenarios and measures how much misbehavior the
slashing mechanism deters. The same opportunistic population is simulated
with enforcement on and off; everything else, including the random draws,
is identical.
"""

from insured_agents import (
    AgentProfile,
    GainModel,
    MechanismParams,
    run_scenario,
    units,
)
from insured_agents.sim import AgentPolicy, BehaviorPolicy, ScenarioConfig

params = MechanismParams(
    L=units(100), G=units(40), S_A=units(30), S_I=units(150),
    B=units(20), F=units(50), R=units(10), V_future=units(20),
    P=units(1), Pi_honest=units(5),
)


def scenario(enforcement: bool) -> ScenarioConfig:
    # Geometric gains mean the temptation occasionally spikes past what
    # honesty pays, but rarely past the slashing total.
    return ScenarioConfig(
        seed=2024,
        episodes=5000,
        enforcement_enabled=enforcement,
        params=params,
        population=(
            AgentProfile(id="a0", gain=GainModel("geometric", units(10))),
        ),
        policy=BehaviorPolicy(
            agent=AgentPolicy.OPPORTUNISTIC, opportunistic_p=0.5
        ),
    )


for enforcement in (False, True):
    result = run_scenario(scenario(enforcement))
    label = "enforcement on " if enforcement else "enforcement off"
    print(f"{label}: misbehavior_rate={result.misbehavior_rate:.4f}"
          f" dispute_rate={result.dispute_rate:.4f}"
          f" verifier_invocations={result.verifier_invocations}")

# In equilibrium conditions the verifier is never needed: disputes are
# settled immediately because denial would lose at adjudication anyway.
rational = ScenarioConfig(
    seed=2024,
    episodes=5000,
    params=params,
    population=(AgentProfile(id="a0", gain=GainModel("fixed", units(40))),),
)
result = run_scenario(rational)
print(f"rational agents : misbehavior_rate={result.misbehavior_rate:.4f}"
      f" dispute_rate={result.dispute_rate:.4f}"
      f" verifier_invocations={result.verifier_invocations}")

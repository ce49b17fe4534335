"""
Equilibrium conditions and the dispute game
===========================================

Walks through the three conditions that make honest behavior the unique
rational outcome, then solves the dispute game by backward induction and
shows what happens when each condition breaks.
"""

from dataclasses import replace

from insured_agents import (
    MechanismParams,
    build_game,
    check_conditions,
    format_units,
    solve_spe,
    units,
)

# A parameter set where everything holds: the user can afford to escalate
# (2L + B > F), the insurer can pay out (S_I >= L), and deviation does not
# pay (S_A + V_future > G).
params = MechanismParams(
    L=units(100), G=units(40), S_A=units(30), S_I=units(150),
    B=units(20), F=units(50), R=units(10), V_future=units(20),
    P=units(1), Pi_honest=units(5),
)

report = check_conditions(params)
print("baseline conditions")
print(f"  access to justice: {report.access_to_justice}")
print(f"  solvency:          {report.solvency}")
print(f"  deterrence:        {report.deterrence}")

profile, payoffs = solve_spe(build_game(params))
print("\nbackward-induction solution")
print(f"  agent plays:       {profile.agent.value}")
print(f"  outcome:           {profile.outcome_path().describe()}")
print(f"  agent payoff:      {format_units(payoffs.pi_A)}")
print(f"  verifier invoked:  {payoffs.verifier_invoked}")

# Raise the deviation gain past the slashing total and the agent defects.
greedy = replace(params, G=units(200))
profile, _ = solve_spe(build_game(greedy))
print("\nwith G = 200 (deterrence broken)")
print(f"  agent plays:       {profile.agent.value}")

# Make the verifier fee swallow the escalation upside and victims stop
# escalating, which in turn lets the insurer deny everything.
expensive = replace(params, G=units(200), F=units(1000))
profile, _ = solve_spe(build_game(expensive))
print("\nwith F = 1000 (access to justice broken)")
print(f"  valid denial:      {profile.escalate_valid.value}")
print(f"  agent plays:       {profile.agent.value}")

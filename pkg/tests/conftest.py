import numpy as np
import pytest

from insured_agents import MechanismParams, units


@pytest.fixture
def example_params() -> MechanismParams:
    """The worked example used throughout: all three conditions hold."""
    return MechanismParams(
        L=units(100),
        G=units(40),
        S_A=units(30),
        S_I=units(150),
        B=units(20),
        F=units(50),
        R=units(10),
        V_future=units(20),
        P=units(8),
        Pi_honest=units(5),
    )


def random_params(rng: np.random.Generator, high: int = 10**6) -> MechanismParams:
    v = rng.integers(0, high, size=10)
    return MechanismParams(
        *(int(x) for x in v[:8]), P=int(v[8]), Pi_honest=int(v[9])
    )


def equilibrium_params(rng: np.random.Generator, high: int = 10**6) -> MechanismParams:
    """Draw params satisfying all three conditions strictly, with
    Pi_honest above the caught-deviation payoff."""
    L = int(rng.integers(1, high))
    B = int(rng.integers(0, high))
    F = int(rng.integers(0, 2 * L + B))  # strict: F < 2L + B
    S_I = L + int(rng.integers(0, high))
    G = int(rng.integers(0, high))
    S_A = int(rng.integers(0, high))
    V_future = max(0, G + 1 - S_A) + int(rng.integers(0, high))
    P = int(rng.integers(0, high))
    R = int(rng.integers(0, high))
    Pi_honest = G - S_A - V_future + 1 + int(rng.integers(0, high))
    return MechanismParams(
        L=L, G=G, S_A=S_A, S_I=S_I, B=B, F=F, R=R,
        V_future=V_future, P=P, Pi_honest=Pi_honest,
    )

"""Insurer-side economics: risk estimation, pricing, and the underwriting stack.

Risk is experience-rated with a Beta-Bernoulli posterior over an agent's
per-episode misbehavior probability. A hierarchical stack lets Layer-1
specialist insurers issue domain certificates that multiplicatively
discount the base risk the Layer-2 master insurer underwrites.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .ledger import CoverageCredential, Ledger, PolicyRecord, Role, AccountId
from .ledger import Memo
from .mechanism import MechanismParams
from .money import check_amount


@dataclass(frozen=True)
class RiskPosterior:
    """Beta(alpha, beta) pseudo-counts over per-episode misbehavior probability."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"Beta pseudo-counts must be positive: {self}")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)


def update_posterior(posterior: RiskPosterior, observed_misbehavior: bool) -> RiskPosterior:
    """Conjugate update: one more misbehavior or one more clean episode."""
    if observed_misbehavior:
        return replace(posterior, alpha=posterior.alpha + 1)
    return replace(posterior, beta=posterior.beta + 1)


@dataclass(frozen=True)
class GainModel:
    """Distribution of the agent's one-shot misbehavior gain G, in micro-units.

    kind "fixed" always yields `mean`; kind "geometric" draws a discrete
    geometric number of whole currency units with the given mean.
    """

    kind: str = "fixed"
    mean: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "geometric"):
            raise ValueError(f"unknown gain model kind {self.kind!r}")
        check_amount(self.mean)

    def draw(self, rng) -> int:
        if self.kind == "fixed" or self.mean == 0:
            return self.mean
        unit = 10**6
        mean_units = max(1, self.mean // unit)
        return int(rng.geometric(1.0 / mean_units)) * unit


@dataclass(frozen=True)
class AgentProfile:
    id: str
    theta: float = 0.0  # true misbehavior propensity
    gain: GainModel = GainModel()
    safeguards: frozenset[str] = frozenset()
    audit_access_granted: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")


def _round_half_up(x: Fraction) -> int:
    if x < 0:
        raise ValueError("premiums cannot be negative")
    return int(x + Fraction(1, 2))


def price_premium(posterior: RiskPosterior, coverage: int, loading: float) -> int:
    """Expected-loss premium with a proportional loading, rounded half-up.

    P = posterior mean x coverage x (1 + loading), in micro-units; any
    strictly positive expected loss prices at one micro-unit or more.
    """
    check_amount(coverage)
    if loading < 0:
        raise ValueError(f"loading must be non-negative, got {loading}")
    mean = Fraction(posterior.alpha) / (Fraction(posterior.alpha) + Fraction(posterior.beta))
    raw = mean * coverage * (1 + Fraction(loading))
    premium = _round_half_up(raw)
    if premium == 0 and raw > 0:
        premium = 1
    return premium


def decide_purchase(agent: AgentProfile, quote: int, params: MechanismParams) -> bool:
    """Does insured operation beat the zero outside option, strictly?

    The baseline value is the honest-path payoff net of the premium. An
    agent with misbehavior propensity adds the option value of profitable
    deviation (what a deviation nets beyond the honest path, if positive),
    which is what drives adverse selection under flat pricing.
    """
    check_amount(quote)
    deviation_bonus = max(
        0, agent.gain.mean - params.S_A - params.V_future - params.Pi_honest
    )
    value = params.Pi_honest + agent.theta * deviation_bonus - quote
    return value > 0


@dataclass(frozen=True)
class Certificate:
    issuer: str
    domain: str
    risk_discount: float
    expiry_tick: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.risk_discount < 1.0:
            raise ValueError(
                f"risk_discount must lie in [0, 1), got {self.risk_discount}"
            )

    def expired(self, tick: int) -> bool:
        return self.expiry_tick is not None and tick >= self.expiry_tick


class ExpiredCertificate(Exception):
    pass


#: Residual risk never composes below this floor.
RESIDUAL_RISK_FLOOR = 1e-4


@dataclass(frozen=True)
class InsurerStack:
    """A Layer-2 master insurer backed by Layer-1 certificate issuers."""

    master: str
    layer1: tuple[Certificate, ...]
    residual_risk: float
    warnings: tuple[str, ...] = ()


def compose_stack(
    base_risk: float,
    certificates: list[Certificate] | tuple[Certificate, ...],
    *,
    master: str = "master",
    tick: int = 0,
    floor: float = RESIDUAL_RISK_FLOOR,
) -> InsurerStack:
    """Multiply independent certificate discounts into a residual risk.

    residual = base_risk x prod(1 - discount_j), clamped at `floor`.
    Expired certificates are excluded from the product with a warning
    record. Exact rational arithmetic makes the result independent of
    certificate order.
    """
    if not 0.0 < base_risk <= 1.0:
        raise ValueError(f"base_risk must lie in (0, 1], got {base_risk}")
    residual = Fraction(str(base_risk))
    active: list[Certificate] = []
    warnings: list[str] = []
    for cert in certificates:
        if cert.expired(tick):
            warnings.append(f"expired certificate {cert.domain} from {cert.issuer}")
            continue
        residual *= 1 - Fraction(str(cert.risk_discount))
        active.append(cert)
    value = max(float(residual), floor)
    return InsurerStack(
        master=master,
        layer1=tuple(active),
        residual_risk=value,
        warnings=tuple(warnings),
    )


def stack_premium(stack: InsurerStack, coverage: int, loading: float) -> int:
    """Premium the master insurer quotes at the stack's residual risk."""
    check_amount(coverage)
    if loading < 0:
        raise ValueError(f"loading must be non-negative, got {loading}")
    residual = Fraction(str(stack.residual_risk))
    raw = residual * coverage * (1 + Fraction(loading))
    premium = _round_half_up(raw)
    if premium == 0 and raw > 0:
        premium = 1
    return premium


def underwrite_stack(
    ledger: Ledger,
    agent: str,
    stack: InsurerStack,
    *,
    policy_id: str,
    coverage: int,
    deductible: int,
    bond: int,
    loading: float,
    claim_deadline: int,
    expiry_tick: int,
    tick: int,
    layer1_cut: float = 0.2,
    certificates: tuple[Certificate, ...] | None = None,
) -> tuple[PolicyRecord, CoverageCredential]:
    """Master insurer posts the protocol-facing stake and shares premium.

    The policy is priced at the stack's residual risk. A configured cut of
    the premium flows to the Layer-1 issuers, split in proportion to their
    discounts; the master keeps the remainder and bears all liability.
    """
    if certificates is not None:
        for cert in certificates:
            if cert.expired(tick):
                raise ExpiredCertificate(f"{cert.domain} from {cert.issuer}")
    if not 0.0 <= layer1_cut <= 1.0:
        raise ValueError(f"layer1_cut must lie in [0, 1], got {layer1_cut}")
    premium = stack_premium(stack, coverage, loading)
    policy, credential = ledger.underwrite(
        policy_id,
        agent,
        stack.master,
        coverage=coverage,
        deductible=deductible,
        premium=premium,
        bond=bond,
        claim_deadline=claim_deadline,
        expiry_tick=expiry_tick,
        tick=tick,
    )
    total_discount = sum(Fraction(str(c.risk_discount)) for c in stack.layer1)
    if total_discount > 0 and layer1_cut > 0:
        pool = Fraction(str(layer1_cut)) * premium
        master_wallet = AccountId(Role.INSURER_WALLET, stack.master)
        for cert in stack.layer1:
            share = int(pool * Fraction(str(cert.risk_discount)) / total_discount)
            if share > 0:
                ledger.pay(
                    master_wallet,
                    AccountId(Role.INSURER_WALLET, cert.issuer),
                    share,
                    tick,
                    Memo.PREMIUM,
                )
    return policy, credential

import itertools

import numpy as np
import pytest

from insured_agents import (
    AgentProfile,
    Certificate,
    GainModel,
    MechanismParams,
    RiskPosterior,
    compose_stack,
    decide_purchase,
    price_premium,
    stack_premium,
    underwrite_stack,
    units,
    update_posterior,
)
from insured_agents.ledger import AccountId, Ledger, Role
from insured_agents.market import ExpiredCertificate


class TestPricePremium:
    def test_worked_example(self):
        # Beta(4, 8) has mean 1/3: 1/3 * 100 * 1.2 = 40 units
        premium = price_premium(RiskPosterior(4, 8), units(100), loading=0.2)
        assert premium == units(40)

    def test_zero_loading_is_expected_loss(self):
        premium = price_premium(RiskPosterior(1, 3), units(100), loading=0.0)
        assert premium == units(25)

    def test_positive_risk_never_prices_at_zero(self):
        premium = price_premium(RiskPosterior(1, 10**9), 10, loading=0.0)
        assert premium == 1

    def test_monotone_in_mean_coverage_and_loading(self):
        base = price_premium(RiskPosterior(2, 8), units(100), loading=0.1)
        assert price_premium(RiskPosterior(3, 8), units(100), 0.1) >= base
        assert price_premium(RiskPosterior(2, 8), units(150), 0.1) >= base
        assert price_premium(RiskPosterior(2, 8), units(100), 0.2) >= base

    def test_negative_loading_rejected(self):
        with pytest.raises(ValueError):
            price_premium(RiskPosterior(), units(100), loading=-0.1)


class TestPosterior:
    def test_conjugate_updates(self):
        post = update_posterior(RiskPosterior(1, 1), True)
        assert (post.alpha, post.beta) == (2, 1)

    def test_counting(self):
        post = RiskPosterior(1, 1)
        for observed in [True] * 3 + [False] * 7:
            post = update_posterior(post, observed)
        assert post.mean == pytest.approx(4 / 12)

    def test_convergence_to_theta(self):
        rng = np.random.default_rng(31)
        for theta in (0.05, 0.3, 0.7):
            post = RiskPosterior(1, 1)
            for draw in rng.random(5000) < theta:
                post = update_posterior(post, bool(draw))
            assert abs(post.mean - theta) < 0.02

    def test_invalid_pseudo_counts_rejected(self):
        with pytest.raises(ValueError):
            RiskPosterior(0, 1)


class TestDecidePurchase:
    def agent(self, theta=0.0, gain_mean=0):
        return AgentProfile(id="a", theta=theta, gain=GainModel("fixed", gain_mean))

    def params(self, pi_honest):
        return MechanismParams(
            L=units(100), G=units(40), S_A=units(30), S_I=units(150),
            B=units(20), F=units(50), R=units(10), V_future=units(20),
            Pi_honest=pi_honest,
        )

    def test_profitable_operation_buys(self):
        assert decide_purchase(self.agent(), units(1), self.params(units(5)))

    def test_unprofitable_operation_declines(self):
        assert not decide_purchase(self.agent(), units(6), self.params(units(5)))

    def test_exact_tie_declines(self):
        assert not decide_purchase(self.agent(), units(5), self.params(units(5)))

    def test_risky_agent_values_coverage_more(self):
        # When deviation pays, willingness rises with theta.
        params = self.params(units(5))
        quote = units(40)
        risky = self.agent(theta=0.9, gain_mean=units(200))
        safe = self.agent(theta=0.0, gain_mean=units(200))
        assert decide_purchase(risky, quote, params)
        assert not decide_purchase(safe, quote, params)


class TestComposeStack:
    def certs(self, *discounts):
        return [
            Certificate(issuer=f"i{k}", domain=f"d{k}", risk_discount=d)
            for k, d in enumerate(discounts)
        ]

    def test_worked_example(self):
        stack = compose_stack(0.10, self.certs(0.5, 0.4))
        assert stack.residual_risk == 0.03

    def test_no_certificates_is_base_risk(self):
        assert compose_stack(0.10, []).residual_risk == 0.10

    def test_floor(self):
        stack = compose_stack(0.10, self.certs(0.999999, 0.999999))
        assert stack.residual_risk == 1e-4

    def test_order_independent(self):
        certs = self.certs(0.5, 0.4, 0.25)
        results = {
            compose_stack(0.10, list(perm)).residual_risk
            for perm in itertools.permutations(certs)
        }
        assert len(results) == 1

    def test_monotone_nonincreasing_in_each_discount(self):
        low = compose_stack(0.10, self.certs(0.5, 0.2)).residual_risk
        high = compose_stack(0.10, self.certs(0.5, 0.4)).residual_risk
        assert high <= low

    def test_expired_certificate_excluded_with_warning(self):
        certs = self.certs(0.5) + [
            Certificate(issuer="i9", domain="stale", risk_discount=0.4, expiry_tick=10)
        ]
        stack = compose_stack(0.10, certs, tick=10)
        assert stack.residual_risk == 0.05
        assert any("stale" in w for w in stack.warnings)

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            compose_stack(0.0, [])
        with pytest.raises(ValueError):
            Certificate(issuer="i", domain="d", risk_discount=1.0)


class TestUnderwriteStack:
    def setup_ledger(self):
        ledger = Ledger()
        ledger.deposit(AccountId(Role.AGENT_WALLET, "agent"), units(1000))
        ledger.deposit(AccountId(Role.INSURER_WALLET, "master"), units(1000))
        ledger.deposit(AccountId(Role.INSURER_WALLET, "i0"), 0)
        ledger.deposit(AccountId(Role.INSURER_WALLET, "i1"), 0)
        return ledger

    def certs(self):
        return (
            Certificate(issuer="i0", domain="safety", risk_discount=0.5),
            Certificate(issuer="i1", domain="financial", risk_discount=0.4),
        )

    def test_residual_priced_premium(self):
        stack = compose_stack(0.10, self.certs(), master="master")
        assert stack_premium(stack, units(100), loading=0.2) == units("3.6")

    def test_premium_shares_proportional_to_discounts(self):
        ledger = self.setup_ledger()
        stack = compose_stack(0.10, self.certs(), master="master")
        underwrite_stack(
            ledger, "agent", stack,
            policy_id="pol", coverage=units(100), deductible=units(10),
            bond=units(5), loading=0.2, claim_deadline=10, expiry_tick=50,
            tick=0, layer1_cut=0.5,
        )
        pool = units("3.6") * 0.5
        share0 = ledger.balance(AccountId(Role.INSURER_WALLET, "i0"))
        share1 = ledger.balance(AccountId(Role.INSURER_WALLET, "i1"))
        assert share0 + share1 <= pool
        # 5:4 split of the layer-1 cut
        assert share0 == int(pool * 5 / 9)
        assert share1 == int(pool * 4 / 9)

    def test_master_posts_full_stake(self):
        ledger = self.setup_ledger()
        stack = compose_stack(0.10, self.certs(), master="master")
        policy, credential = underwrite_stack(
            ledger, "agent", stack,
            policy_id="pol", coverage=units(100), deductible=units(10),
            bond=units(5), loading=0.2, claim_deadline=10, expiry_tick=50, tick=0,
        )
        assert policy.insurer == "master"
        assert policy.escrowed_stake == units(100)
        assert ledger.verify_coverage(credential, min_coverage=units(100), tick=1)

    def test_expired_certificate_rejected(self):
        ledger = self.setup_ledger()
        stale = Certificate(
            issuer="i0", domain="safety", risk_discount=0.5, expiry_tick=5
        )
        stack = compose_stack(0.10, [stale], master="master", tick=0)
        with pytest.raises(ExpiredCertificate):
            underwrite_stack(
                ledger, "agent", stack,
                policy_id="pol", coverage=units(100), deductible=0,
                bond=0, loading=0.0, claim_deadline=10, expiry_tick=50,
                tick=10, certificates=(stale,),
            )


class TestAdverseSelection:
    """Flat pricing attracts the risky tail; experience rating narrows it."""

    def population(self, rng, n=60):
        return [
            AgentProfile(
                id=f"a{k}",
                theta=float(rng.random()),
                gain=GainModel("fixed", units(200)),
            )
            for k in range(n)
        ]

    def params(self):
        return MechanismParams(
            L=units(100), G=units(200), S_A=units(30), S_I=units(150),
            B=units(20), F=units(50), R=units(10), V_future=units(20),
            Pi_honest=units(5),
        )

    def test_flat_premium_selects_high_theta(self):
        rng = np.random.default_rng(41)
        population = self.population(rng)
        params = self.params()
        flat_quote = units(40)
        buyers = [a for a in population if decide_purchase(a, flat_quote, params)]
        assert buyers
        avg_all = np.mean([a.theta for a in population])
        avg_buyers = np.mean([a.theta for a in buyers])
        assert avg_buyers >= avg_all

    def test_experience_rating_shrinks_the_gap(self):
        rng = np.random.default_rng(42)
        population = self.population(rng)
        params = self.params()
        avg_all = np.mean([a.theta for a in population])

        flat_quote = units(40)
        flat_buyers = [a for a in population if decide_purchase(a, flat_quote, params)]
        flat_gap = np.mean([a.theta for a in flat_buyers]) - avg_all

        rated_buyers = []
        for agent in population:
            post = RiskPosterior(1, 1)
            for draw in rng.random(200) < agent.theta:
                post = update_posterior(post, bool(draw))
            quote = price_premium(post, params.L, loading=0.0)
            if decide_purchase(agent, quote, params):
                rated_buyers.append(agent)
        assert rated_buyers
        rated_gap = np.mean([a.theta for a in rated_buyers]) - avg_all
        assert flat_gap > 0
        assert rated_gap < flat_gap

"""Double-entry ledger and the policy/claim lifecycle state machine.

Money only ever moves between accounts (wallets, escrows, the verifier
fee sink), so the total supply is invariant under every operation. All
operations are atomic: a failed precondition raises before the first
transfer and leaves the ledger untouched.

Lifecycle: underwrite -> (verify_coverage) -> file_claim ->
respond_claim -> [escalate -> adjudicate] -> expire_policy.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple

from .money import check_amount


class Role(Enum):
    AGENT_WALLET = "agent_wallet"
    INSURER_WALLET = "insurer_wallet"
    USER_WALLET = "user_wallet"
    STAKE_ESCROW = "stake_escrow"
    BOND_ESCROW = "bond_escrow"
    VERIFIER_FEE_SINK = "verifier_fee_sink"


class AccountId(NamedTuple):
    role: Role
    owner: str


#: The single system-owned verifier fee sink.
FEE_SINK = AccountId(Role.VERIFIER_FEE_SINK, "system")


class Memo(Enum):
    PREMIUM = "premium"
    STAKE_POST = "stake_post"
    STAKE_RETURN = "stake_return"
    DEDUCTIBLE_POST = "deductible_post"
    DEDUCTIBLE_SEIZE = "deductible_seize"
    COMPENSATION = "compensation"
    BOND_POST = "bond_post"
    BOND_FORFEIT = "bond_forfeit"
    BOND_RETURN = "bond_return"
    VERIFIER_FEE = "verifier_fee"
    CLAIM_BOND = "claim_bond"
    REPUTATION_PENALTY = "reputation_penalty"


@dataclass(frozen=True)
class Transfer:
    src: AccountId
    dst: AccountId
    amount: int
    tick: int
    memo: Memo

    def __post_init__(self) -> None:
        check_amount(self.amount)
        if self.amount == 0:
            raise LedgerError("zero-amount transfers are not recorded")
        if self.src == self.dst:
            raise LedgerError("transfer source and destination must differ")


class LedgerError(Exception):
    """Base class for ledger operation failures."""


class InsufficientFunds(LedgerError):
    def __init__(self, party: AccountId, needed: int, available: int):
        self.party = party
        super().__init__(
            f"{party.role.value}:{party.owner} needs {needed} but holds {available}"
        )


class DuplicatePolicy(LedgerError):
    pass


class WrongState(LedgerError):
    pass


class DeadlinePassed(LedgerError):
    pass


class OverCoverage(LedgerError):
    pass


class PolicyInactive(LedgerError):
    pass


class PolicyStatus(Enum):
    ACTIVE = "active"
    EXPIRED = "expired"
    EXHAUSTED = "exhausted"


class ClaimState(Enum):
    FILED = "filed"
    ACCEPTED = "accepted"
    DENIED = "denied"
    ESCALATED = "escalated"
    UPHELD_VALID = "upheld_valid"
    UPHELD_INVALID = "upheld_invalid"
    DROPPED = "dropped"


#: Claim transitions; states absent from the map are terminal.
_CLAIM_TRANSITIONS = {
    ClaimState.FILED: {ClaimState.ACCEPTED, ClaimState.DENIED},
    ClaimState.DENIED: {ClaimState.ESCALATED, ClaimState.DROPPED},
    ClaimState.ESCALATED: {ClaimState.UPHELD_VALID, ClaimState.UPHELD_INVALID},
}


class ClaimValidityTag(Enum):
    """Ground truth of a claim, visible only to the verifier / audit access."""

    VALID = "valid"
    INVALID = "invalid"


@dataclass
class PolicyRecord:
    id: str
    agent: str
    insurer: str
    coverage: int
    deductible: int
    premium: int
    bond: int
    claim_deadline: int
    expiry_tick: int
    exclusions: frozenset[str] = frozenset()
    status: PolicyStatus = PolicyStatus.ACTIVE
    issued_tick: int = 0
    escrowed_stake: int = 0
    escrowed_deductible: int = 0


@dataclass(frozen=True)
class CoverageCredential:
    policy_id: str
    insurer: str
    coverage: int
    expiry_tick: int
    tag: str


@dataclass
class ClaimRecord:
    id: str
    policy_id: str
    claimant: str
    amount: int
    validity: ClaimValidityTag
    state: ClaimState = ClaimState.FILED
    filed_tick: int = 0
    resolved_tick: int | None = None
    bond_posted: int = 0  # escalation bond per side, set on escalate
    claim_bond: int = 0


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ShortfallEvent:
    """A fee or penalty a party could not fully pay; balance clamped at zero."""

    party: AccountId
    memo: Memo
    shortfall: int
    tick: int


class Ledger:
    """Single-writer account book with escrowed stakes, bonds and slashing."""

    def __init__(self, secret: bytes = b"insured-agents-registry"):
        self._secret = secret
        self.balances: dict[AccountId, int] = {FEE_SINK: 0}
        self.transfers: list[Transfer] = []
        self.policies: dict[str, PolicyRecord] = {}
        self.claims: dict[str, ClaimRecord] = {}
        self.shortfalls: list[ShortfallEvent] = []
        self.defaulted: set[AccountId] = set()
        self._claim_seq = 0

    # -- accounts ---------------------------------------------------------

    def deposit(self, account: AccountId, amount: int) -> None:
        """Mint initial funds into a wallet. Setup only: changes total supply."""
        check_amount(amount)
        self.balances[account] = self.balances.get(account, 0) + amount

    def balance(self, account: AccountId) -> int:
        return self.balances.get(account, 0)

    def total_supply(self) -> int:
        """Sum of every balance, escrows and sinks included."""
        return sum(self.balances.values())

    def pay(
        self, src: AccountId, dst: AccountId, amount: int, tick: int, memo: Memo
    ) -> None:
        """Direct wallet-to-wallet payment (e.g. premium revenue sharing)."""
        check_amount(amount)
        self._transfer(src, dst, amount, tick, memo)

    def _transfer(
        self, src: AccountId, dst: AccountId, amount: int, tick: int, memo: Memo
    ) -> None:
        if amount == 0:
            return
        available = self.balances.get(src, 0)
        if available < amount:
            raise InsufficientFunds(src, amount, available)
        self.balances[src] = available - amount
        self.balances[dst] = self.balances.get(dst, 0) + amount
        self.transfers.append(Transfer(src, dst, amount, tick, memo))

    def _transfer_clamped(
        self, src: AccountId, dst: AccountId, amount: int, tick: int, memo: Memo
    ) -> None:
        """Pay as much as the source holds; record shortfall and default."""
        available = self.balances.get(src, 0)
        paid = min(amount, available)
        if paid > 0:
            self._transfer(src, dst, paid, tick, memo)
        if paid < amount:
            self.shortfalls.append(ShortfallEvent(src, memo, amount - paid, tick))
            self.defaulted.add(src)

    # -- credentials ------------------------------------------------------

    def _credential_tag(self, policy_id: str, insurer: str, coverage: int,
                        expiry_tick: int) -> str:
        payload = f"{policy_id}|{insurer}|{coverage}|{expiry_tick}".encode()
        return hmac.new(self._secret, payload, hashlib.sha256).hexdigest()[:32]

    def issue_credential(self, policy: PolicyRecord) -> CoverageCredential:
        return CoverageCredential(
            policy_id=policy.id,
            insurer=policy.insurer,
            coverage=policy.coverage,
            expiry_tick=policy.expiry_tick,
            tag=self._credential_tag(
                policy.id, policy.insurer, policy.coverage, policy.expiry_tick
            ),
        )

    def verify_coverage(
        self, credential: CoverageCredential, min_coverage: int, tick: int
    ) -> VerificationResult:
        """Check credential authenticity, policy status, coverage and expiry."""
        expected = self._credential_tag(
            credential.policy_id,
            credential.insurer,
            credential.coverage,
            credential.expiry_tick,
        )
        if not hmac.compare_digest(expected, credential.tag):
            return VerificationResult(False, "BadTag")
        policy = self.policies.get(credential.policy_id)
        if policy is None:
            return VerificationResult(False, "UnknownPolicy")
        if (
            policy.insurer != credential.insurer
            or policy.coverage != credential.coverage
            or policy.expiry_tick != credential.expiry_tick
        ):
            return VerificationResult(False, "BadTag")
        if policy.status is not PolicyStatus.ACTIVE:
            return VerificationResult(
                False,
                "Expired" if policy.status is PolicyStatus.EXPIRED else "Exhausted",
            )
        if tick >= policy.expiry_tick:
            return VerificationResult(False, "Expired")
        if policy.coverage < min_coverage:
            return VerificationResult(False, "InsufficientCoverage")
        return VerificationResult(True)

    # -- lifecycle --------------------------------------------------------

    def underwrite(
        self,
        policy_id: str,
        agent: str,
        insurer: str,
        *,
        coverage: int,
        deductible: int,
        premium: int,
        bond: int,
        claim_deadline: int,
        expiry_tick: int,
        tick: int,
        exclusions: Iterable[str] = (),
    ) -> tuple[PolicyRecord, CoverageCredential]:
        """Issue a policy: escrow insurer stake and agent deductible, pay premium.

        The escrowed stake equals the coverage, so the per-policy solvency
        requirement (stake >= coverage) holds by construction.
        """
        for amount in (coverage, deductible, premium, bond):
            check_amount(amount)
        if policy_id in self.policies:
            raise DuplicatePolicy(policy_id)
        agent_wallet = AccountId(Role.AGENT_WALLET, agent)
        insurer_wallet = AccountId(Role.INSURER_WALLET, insurer)
        escrow = AccountId(Role.STAKE_ESCROW, policy_id)
        if self.balance(insurer_wallet) < coverage:
            raise InsufficientFunds(insurer_wallet, coverage, self.balance(insurer_wallet))
        if self.balance(agent_wallet) < premium + deductible:
            raise InsufficientFunds(
                agent_wallet, premium + deductible, self.balance(agent_wallet)
            )
        self._transfer(insurer_wallet, escrow, coverage, tick, Memo.STAKE_POST)
        self._transfer(agent_wallet, escrow, deductible, tick, Memo.DEDUCTIBLE_POST)
        self._transfer(agent_wallet, insurer_wallet, premium, tick, Memo.PREMIUM)
        policy = PolicyRecord(
            id=policy_id,
            agent=agent,
            insurer=insurer,
            coverage=coverage,
            deductible=deductible,
            premium=premium,
            bond=bond,
            claim_deadline=claim_deadline,
            expiry_tick=expiry_tick,
            exclusions=frozenset(exclusions),
            issued_tick=tick,
            escrowed_stake=coverage,
            escrowed_deductible=deductible,
        )
        self.policies[policy_id] = policy
        return policy, self.issue_credential(policy)

    def file_claim(
        self,
        policy_id: str,
        claimant: str,
        amount: int,
        validity: ClaimValidityTag,
        *,
        claim_bond: int = 0,
        incident_tick: int = 0,
        tick: int = 0,
    ) -> ClaimRecord:
        check_amount(amount)
        check_amount(claim_bond)
        policy = self._policy(policy_id)
        if policy.status is not PolicyStatus.ACTIVE:
            raise PolicyInactive(policy_id)
        if tick > incident_tick + policy.claim_deadline:
            raise DeadlinePassed(
                f"claim at tick {tick} past deadline "
                f"{incident_tick + policy.claim_deadline}"
            )
        if amount > policy.coverage or amount > policy.escrowed_stake:
            raise OverCoverage(f"claim {amount} exceeds available coverage")
        user_wallet = AccountId(Role.USER_WALLET, claimant)
        if self.balance(user_wallet) < claim_bond:
            raise InsufficientFunds(user_wallet, claim_bond, self.balance(user_wallet))
        self._claim_seq += 1
        claim_id = f"{policy_id}/claim-{self._claim_seq}"
        bond_escrow = AccountId(Role.BOND_ESCROW, claim_id)
        self._transfer(user_wallet, bond_escrow, claim_bond, tick, Memo.CLAIM_BOND)
        claim = ClaimRecord(
            id=claim_id,
            policy_id=policy_id,
            claimant=claimant,
            amount=amount,
            validity=validity,
            filed_tick=tick,
            claim_bond=claim_bond,
        )
        self.claims[claim_id] = claim
        return claim

    def respond_claim(self, claim_id: str, accept: bool, tick: int) -> ClaimRecord:
        """Insurer settles or denies a filed claim.

        On settlement of a valid claim the agent's deductible is seized by
        the insurer; settling an invalid claim leaves the deductible alone
        since no misbehavior occurred.
        """
        claim = self._claim(claim_id)
        target = ClaimState.ACCEPTED if accept else ClaimState.DENIED
        self._check_transition(claim, target)
        if not accept:
            claim.state = ClaimState.DENIED
            return claim
        policy = self._policy(claim.policy_id)
        escrow = AccountId(Role.STAKE_ESCROW, policy.id)
        user_wallet = AccountId(Role.USER_WALLET, claim.claimant)
        insurer_wallet = AccountId(Role.INSURER_WALLET, policy.insurer)
        self._transfer(escrow, user_wallet, claim.amount, tick, Memo.COMPENSATION)
        policy.escrowed_stake -= claim.amount
        if claim.validity is ClaimValidityTag.VALID and policy.escrowed_deductible > 0:
            self._transfer(
                escrow, insurer_wallet, policy.escrowed_deductible, tick,
                Memo.DEDUCTIBLE_SEIZE,
            )
            policy.escrowed_deductible = 0
        self._return_claim_bond(claim, to_claimant=True, tick=tick)
        claim.state = ClaimState.ACCEPTED
        claim.resolved_tick = tick
        self._exhaust_if_depleted(policy, tick)
        return claim

    def escalate(self, claim_id: str, tick: int) -> ClaimRecord:
        """User escalates a denied claim: both sides post the policy bond."""
        claim = self._claim(claim_id)
        self._check_transition(claim, ClaimState.ESCALATED)
        policy = self._policy(claim.policy_id)
        user_wallet = AccountId(Role.USER_WALLET, claim.claimant)
        insurer_wallet = AccountId(Role.INSURER_WALLET, policy.insurer)
        bond = policy.bond
        if self.balance(user_wallet) < bond:
            raise InsufficientFunds(user_wallet, bond, self.balance(user_wallet))
        if self.balance(insurer_wallet) < bond:
            raise InsufficientFunds(insurer_wallet, bond, self.balance(insurer_wallet))
        bond_escrow = AccountId(Role.BOND_ESCROW, claim.id)
        self._transfer(user_wallet, bond_escrow, bond, tick, Memo.BOND_POST)
        self._transfer(insurer_wallet, bond_escrow, bond, tick, Memo.BOND_POST)
        claim.bond_posted = bond
        claim.state = ClaimState.ESCALATED
        return claim

    def adjudicate(self, claim_id: str, *, fee: int, reputation_cost: int,
                   tick: int) -> ClaimRecord:
        """Error-free verdict on an escalated claim.

        Valid: user is compensated from the insurer's stake, the agent's
        deductible is slashed to the fee sink (the denying insurer is
        itself being punished and collects nothing), the insurer forfeits
        its bond to the user, both parties pay the verifier fee, and the
        insurer bears the reputation penalty.
        Invalid: the user forfeits its bonds to the insurer and both pay
        the fee. Fees and penalties that cannot be paid are clamped with a
        recorded shortfall.
        """
        check_amount(fee)
        check_amount(reputation_cost)
        claim = self._claim(claim_id)
        valid = claim.validity is ClaimValidityTag.VALID
        target = ClaimState.UPHELD_VALID if valid else ClaimState.UPHELD_INVALID
        self._check_transition(claim, target)
        policy = self._policy(claim.policy_id)
        escrow = AccountId(Role.STAKE_ESCROW, policy.id)
        bond_escrow = AccountId(Role.BOND_ESCROW, claim.id)
        user_wallet = AccountId(Role.USER_WALLET, claim.claimant)
        insurer_wallet = AccountId(Role.INSURER_WALLET, policy.insurer)
        bond = claim.bond_posted
        if valid:
            self._transfer(escrow, user_wallet, claim.amount, tick, Memo.COMPENSATION)
            policy.escrowed_stake -= claim.amount
            if policy.escrowed_deductible > 0:
                self._transfer(
                    escrow, FEE_SINK, policy.escrowed_deductible, tick,
                    Memo.DEDUCTIBLE_SEIZE,
                )
                policy.escrowed_deductible = 0
            self._transfer(bond_escrow, user_wallet, bond, tick, Memo.BOND_FORFEIT)
            self._transfer(bond_escrow, user_wallet, bond, tick, Memo.BOND_RETURN)
            self._return_claim_bond(claim, to_claimant=True, tick=tick)
            self._transfer_clamped(user_wallet, FEE_SINK, fee, tick, Memo.VERIFIER_FEE)
            self._transfer_clamped(
                insurer_wallet, FEE_SINK, fee, tick, Memo.VERIFIER_FEE
            )
            self._transfer_clamped(
                insurer_wallet, FEE_SINK, reputation_cost, tick,
                Memo.REPUTATION_PENALTY,
            )
        else:
            self._transfer(bond_escrow, insurer_wallet, bond, tick, Memo.BOND_FORFEIT)
            self._transfer(bond_escrow, insurer_wallet, bond, tick, Memo.BOND_RETURN)
            self._return_claim_bond(claim, to_claimant=False, tick=tick)
            self._transfer_clamped(user_wallet, FEE_SINK, fee, tick, Memo.VERIFIER_FEE)
            self._transfer_clamped(
                insurer_wallet, FEE_SINK, fee, tick, Memo.VERIFIER_FEE
            )
        claim.state = target
        claim.resolved_tick = tick
        if valid:
            self._exhaust_if_depleted(policy, tick)
        return claim

    def drop_claim(self, claim_id: str, tick: int) -> ClaimRecord:
        """User abandons a denied claim; the filing bond is forfeited."""
        claim = self._claim(claim_id)
        self._check_transition(claim, ClaimState.DROPPED)
        policy = self._policy(claim.policy_id)
        self._return_claim_bond(claim, to_claimant=False, tick=tick)
        claim.state = ClaimState.DROPPED
        claim.resolved_tick = tick
        return claim

    def expire_policy(self, policy_id: str, tick: int) -> PolicyRecord:
        """Close out an active policy past expiry; return remaining escrow."""
        policy = self._policy(policy_id)
        if policy.status is not PolicyStatus.ACTIVE:
            raise WrongState(f"policy {policy_id} is {policy.status.value}")
        if tick < policy.expiry_tick:
            raise WrongState(
                f"policy {policy_id} expires at {policy.expiry_tick}, tick is {tick}"
            )
        self._release_escrow(policy, tick)
        policy.status = PolicyStatus.EXPIRED
        return policy

    # -- export -----------------------------------------------------------

    def export_log(self) -> str:
        """Event log as newline-delimited records with a stable column order:
        tick, memo, from-role, to-role, amount (decimal micro-units)."""
        lines = [
            f"{t.tick},{t.memo.value},{t.src.role.value},{t.dst.role.value},{t.amount}"
            for t in self.transfers
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    # -- internals --------------------------------------------------------

    def _policy(self, policy_id: str) -> PolicyRecord:
        try:
            return self.policies[policy_id]
        except KeyError:
            raise WrongState(f"unknown policy {policy_id}") from None

    def _claim(self, claim_id: str) -> ClaimRecord:
        try:
            return self.claims[claim_id]
        except KeyError:
            raise WrongState(f"unknown claim {claim_id}") from None

    @staticmethod
    def _check_transition(claim: ClaimRecord, target: ClaimState) -> None:
        allowed = _CLAIM_TRANSITIONS.get(claim.state, set())
        if target not in allowed:
            raise WrongState(
                f"claim {claim.id} cannot go {claim.state.value} -> {target.value}"
            )

    def _return_claim_bond(self, claim: ClaimRecord, *, to_claimant: bool,
                           tick: int) -> None:
        if claim.claim_bond == 0:
            return
        bond_escrow = AccountId(Role.BOND_ESCROW, claim.id)
        if to_claimant:
            dst = AccountId(Role.USER_WALLET, claim.claimant)
            memo = Memo.BOND_RETURN
        else:
            dst = AccountId(Role.INSURER_WALLET, self._policy(claim.policy_id).insurer)
            memo = Memo.BOND_FORFEIT
        self._transfer(bond_escrow, dst, claim.claim_bond, tick, memo)
        claim.claim_bond = 0

    def _release_escrow(self, policy: PolicyRecord, tick: int) -> None:
        escrow = AccountId(Role.STAKE_ESCROW, policy.id)
        if policy.escrowed_stake > 0:
            self._transfer(
                escrow, AccountId(Role.INSURER_WALLET, policy.insurer),
                policy.escrowed_stake, tick, Memo.STAKE_RETURN,
            )
            policy.escrowed_stake = 0
        if policy.escrowed_deductible > 0:
            self._transfer(
                escrow, AccountId(Role.AGENT_WALLET, policy.agent),
                policy.escrowed_deductible, tick, Memo.STAKE_RETURN,
            )
            policy.escrowed_deductible = 0

    def _exhaust_if_depleted(self, policy: PolicyRecord, tick: int) -> None:
        if policy.escrowed_stake == 0 and policy.status is PolicyStatus.ACTIVE:
            self._release_escrow(policy, tick)
            policy.status = PolicyStatus.EXHAUSTED

"""Direct in-process protocol runs between party states, without framing."""

from dataclasses import dataclass
from typing import Optional

from ..core.pairing import G1Element, Scalar
from ..core.token import WalletEntry
from .bank import BankState, DepositStatus, DepositVerdict
from .user import UserState


@dataclass(frozen=True)
class WithdrawalTranscript:
    """What the bank saw during one issuance."""
    r: G1Element
    c_prime: Scalar
    sigma_prime: Scalar


def bank_withdraw(bank: BankState, user: UserState) -> WithdrawalTranscript:
    nonce = bank.begin_withdrawal(user.pk)
    c_prime = user.start_withdrawal(nonce.r)
    sigma_prime = bank.complete_withdrawal(nonce, c_prime)
    user.finish_withdrawal(sigma_prime)
    return WithdrawalTranscript(nonce.r, c_prime, sigma_prime)


def pay(
    spender: UserState,
    receiver: UserState,
    entry: Optional[WalletEntry] = None,
    allow_double_spend: bool = False,
) -> WalletEntry:
    """Run one two-leg transfer; returns the receiver's new wallet entry."""
    rand = receiver.offer_randomization()
    spent, bundle = spender.user_spend_to(rand, entry, allow_double_spend)
    received = receiver.user_receive(bundle)
    spender.mark_spent(spent)
    return received


def user_deposit(
    user: UserState,
    bank: BankState,
    entry: Optional[WalletEntry] = None,
    allow_double_spend: bool = False,
) -> DepositVerdict:
    rand = bank.open_deposit(user.pk)
    spent, bundle = user.user_spend_to(rand, entry, allow_double_spend)
    verdict = bank.bank_deposit(bundle, user.pk)
    if verdict.status is not DepositStatus.REJECTED:
        user.mark_spent(spent)
    return verdict

"""Parties, wire protocol, transports and protocol sessions."""

from .ttp import TtpState, RevocationResult
from .bank import BankState, DepositStatus, DepositVerdict
from .user import UserState
from .transport import FrameLog, make_binding
from .network import LocalNetwork, RemoteNetwork

__all__ = [
    'TtpState',
    'RevocationResult',
    'BankState',
    'DepositStatus',
    'DepositVerdict',
    'UserState',
    'FrameLog',
    'make_binding',
    'LocalNetwork',
    'RemoteNetwork'
]

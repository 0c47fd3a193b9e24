"""Toy finite-field Diffie-Hellman."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class DhParams:
    p: int = 2003
    g: int = 5

    def __post_init__(self):
        if self.p < 3:
            raise ValueError("p must be an odd prime")
        if not 1 < self.g < self.p:
            raise ValueError("g must lie in 2..p-1")


@dataclass(frozen=True)
class DhKeyPair:
    params: DhParams
    secret: int
    public: int

    @classmethod
    def from_secret(cls, params: DhParams, secret: int) -> "DhKeyPair":
        return cls(params, secret, dh_public(params, secret))

    def shared(self, peer_public: int) -> int:
        return dh_shared(self.params, self.secret, peer_public)


def _check_secret(params: DhParams, secret: int) -> None:
    if not 1 <= secret < params.p:
        raise ValueError(f"secret must lie in 1..{params.p - 1}")


def dh_public(params: DhParams, secret: int) -> int:
    _check_secret(params, secret)
    return pow(params.g, secret, params.p)


def dh_shared(params: DhParams, secret: int, peer_public: int) -> int:
    _check_secret(params, secret)
    return pow(peer_public, secret, params.p)

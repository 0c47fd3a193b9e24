"""Simulation and verification toolkit for tamper-evident Wi-Fi pairing."""

__version__ = "0.1.0"

from .bitbalance import balance, unbalance  # noqa: E402
from .frame import Direction, TeaConfig, build_tea, verify_slots  # noqa: E402

__all__ = ["balance", "unbalance", "Direction", "TeaConfig", "build_tea", "verify_slots", "__version__"]

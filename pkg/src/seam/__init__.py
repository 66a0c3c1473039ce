"""Diamond-pattern conversion and upgrade-safety toolchain for Solidity contracts."""

__version__ = "0.1.0"

"""Certified almost-sure termination for a probabilistic lambda-calculus."""

from .distributions import Distribution, collapse, value_decomposition
from .syntax import decode_nat, encode_nat, free_vars, parse, pretty, subst_value

__version__ = "0.1.0"

__all__ = [
    "Distribution",
    "collapse",
    "value_decomposition",
    "decode_nat",
    "encode_nat",
    "free_vars",
    "parse",
    "pretty",
    "subst_value",
]

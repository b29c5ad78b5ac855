"""Loop-invariant discovery by test generation, template mining and
postcondition mutation, validated with an SMT-backed verifier."""

__version__ = "0.1.0"

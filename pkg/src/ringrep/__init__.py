"""Exact verification engine for representations of small matrix groups over
truncated local rings, together with the curve and surface models that
realize them.

Everything is exact: scalars are cyclotomic numbers with Fraction
coefficients, fields are tabulated finite fields, and every claimed identity
is checked with equality, never with tolerances.
"""

__version__ = "0.1.0"

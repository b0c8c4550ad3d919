"""Tolerance policy used by every numerical comparison in the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerance:
    """Two knobs: eps_structural for residuals of algebraic identities,
    eps_rank for rank / invertibility decisions (relative to the largest
    singular value)."""

    eps_structural: float = 1e-9
    eps_rank: float = 1e-8

    def __post_init__(self):
        if not (self.eps_structural > 0 and self.eps_rank > 0):
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def close(x, y, eps):
    """Absolute-plus-relative comparison: |x-y| <= eps*(1+max(|x|,|y|))."""
    return abs(x - y) <= eps * (1.0 + max(abs(x), abs(y)))

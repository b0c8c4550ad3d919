"""Finite-dimensional commutative Frobenius algebras over the complex numbers.

An algebra is given concretely by structure constants in a chosen basis
b_1..b_n (so b_i * b_j = sum_k c[i,j,k] b_k), the coordinates of the unit,
and the trace functional theta evaluated on the basis.  The induced metric
g(x, y) = theta(x * y) must be nondegenerate.

Semisimple algebras (no nilpotents) admit a basis of orthogonal idempotents
e_i with e_i^2 = e_i, e_i e_j = 0, unique up to permutation.  We compute it
from the spectral projectors of a generic multiplication operator and polish
with the idempotent Newton iteration e <- 3e^2 - 2e^3.
"""

import numpy as np

from dataclasses import dataclass

from .errors import Degenerate, DegenerateWeight, NotSemisimple, ShapeMismatch
from .report import CheckReport
from .tolerances import DEFAULT_TOL, Tolerance

# Eigenvalue separation needed before spectral projectors are attempted,
# relative to the spectral radius.  Jordan blocks perturb eigenvalues by
# ~sqrt(machine eps), so this must sit well above 1e-8.
_SEP_FACTOR = 1e-5

_RETRY_BUDGET = 8
_POLISH_STEPS = 3


def _round6(x: float) -> float:
    # +0.0 normalizes -0.0 so sort keys are reproducible
    return round(float(x), 6) + 0.0


@dataclass(frozen=True)
class IdempotentBasis:
    """Orthogonal idempotents e_1..e_n (rows of `idempotents`, coordinates in
    the algebra basis) together with their weights theta(e_i)."""

    idempotents: np.ndarray  # (n, n), row i = coordinates of e_i
    weights: np.ndarray      # (n,), theta(e_i)

    @property
    def n(self) -> int:
        return self.idempotents.shape[0]


class FrobeniusAlgebra:
    """Structure constants + unit + trace in a fixed basis."""

    def __init__(self, structure_constants, unit, trace):
        c = np.asarray(structure_constants, dtype=complex)
        u = np.asarray(unit, dtype=complex)
        t = np.asarray(trace, dtype=complex)
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[0] != c.shape[2]:
            raise ShapeMismatch(f"structure constants must be (n,n,n), got {c.shape}")
        n = c.shape[0]
        if n < 1:
            raise ShapeMismatch("dimension must be >= 1")
        if u.shape != (n,):
            raise ShapeMismatch(f"unit must have shape ({n},), got {u.shape}")
        if t.shape != (n,):
            raise ShapeMismatch(f"trace must have shape ({n},), got {t.shape}")
        for name, arr in (("structure constants", c), ("unit", u), ("trace", t)):
            if not np.all(np.isfinite(arr)):
                raise ShapeMismatch(f"{name} contain non-finite entries")
        self.dim = n
        self.c = c
        self.unit = u
        self.trace = t

    # -- basic algebra operations ------------------------------------------

    def multiply(self, x, y) -> np.ndarray:
        """Coordinates of x * y."""
        return np.einsum("i,j,ijk->k", np.asarray(x), np.asarray(y), self.c)

    def mult_operator(self, a) -> np.ndarray:
        """Matrix of L_a: x -> a * x acting on coordinate vectors."""
        return np.einsum("i,ijk->kj", np.asarray(a), self.c)

    def theta(self, x) -> complex:
        """Trace functional applied to a coordinate vector."""
        return complex(np.dot(self.trace, np.asarray(x)))

    # -- spec operations ----------------------------------------------------

    def validate(self, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
        """Check commutativity, associativity, the unit law, and metric
        nondegeneracy; each record carries its max residual."""
        report = CheckReport()
        c = self.c
        scale = max(1.0, float(np.max(np.abs(c))))
        thr = tol.eps_structural * (1.0 + scale)

        comm_res = np.abs(c - c.transpose(1, 0, 2))
        comm = float(np.max(comm_res))
        report.add("commutativity", comm <= thr, comm,
                   location=None if comm <= thr else
                   "c" + "".join(f"[{i}]" for i in
                                 np.unravel_index(np.argmax(comm_res), comm_res.shape)))

        # sum_m c[i,j,m] c[m,k,l]  vs  sum_m c[j,k,m] c[i,m,l]
        left = np.einsum("ijm,mkl->ijkl", c, c)
        right = np.einsum("jkm,iml->ijkl", c, c)
        asc_scale = max(1.0, float(np.max(np.abs(left))), float(np.max(np.abs(right))))
        assoc_res = np.abs(left - right)
        assoc = float(np.max(assoc_res))
        report.add("associativity", assoc <= tol.eps_structural * (1.0 + asc_scale),
                   assoc,
                   location=None if assoc <= tol.eps_structural * (1.0 + asc_scale) else
                   "(b_i b_j) b_k at " + str(tuple(int(x) for x in
                                                   np.unravel_index(np.argmax(assoc_res),
                                                                    assoc_res.shape))))

        unit_res = float(np.max(np.abs(self.mult_operator(self.unit) - np.eye(self.dim))))
        report.add("unit", unit_res <= thr, unit_res)

        g = self.metric()
        sv = np.linalg.svd(g, compute_uv=False)
        ratio = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
        report.add("metric_nondegenerate", ratio > tol.eps_rank, ratio,
                   detail=f"singular values {sv[0]:.3e}..{sv[-1]:.3e}")
        return report

    def metric(self) -> np.ndarray:
        """Gram matrix g_ij = theta(b_i b_j)."""
        return np.einsum("ijk,k->ij", self.c, self.trace)

    def three_point(self) -> np.ndarray:
        """Fully symmetric tensor c_ijk = theta(b_i b_j b_k)."""
        return np.einsum("ijm,mkl,l->ijk", self.c, self.c, self.trace)

    def frobenius_iso(self, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        """Matrix of x -> g(x, .) from the algebra to its dual (coordinates of
        Phi(x) are g @ x).  Raises Degenerate when g is singular."""
        g = self.metric()
        sv = np.linalg.svd(g, compute_uv=False)
        if sv[0] == 0 or sv[-1] / sv[0] <= tol.eps_rank:
            raise Degenerate("metric is singular; no Frobenius isomorphism")
        return g

    def is_semisimple(self, tol: Tolerance = DEFAULT_TOL, seed: int = 0):
        """True iff an orthogonal idempotent basis exists.  Returns
        (True, IdempotentBasis) or (False, diagnostics-dict)."""
        try:
            basis = self.idempotent_basis(tol, seed)
        except NotSemisimple as exc:
            return False, exc.args[0] if exc.args else {}
        return True, basis

    def idempotent_basis(self, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> IdempotentBasis:
        """Orthogonal idempotents via spectral projectors of L_a for a seeded
        pseudo-random element a, Newton-polished, in canonical order.

        Deterministic for a fixed seed; canonical ordering makes the output
        independent of the seed as well (the basis itself is unique up to
        permutation)."""
        n = self.dim
        rng = np.random.default_rng(seed)
        best = {"gap": 0.0, "residual": np.inf}
        for _ in range(_RETRY_BUDGET):
            a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            L = self.mult_operator(a)
            eigvals = np.linalg.eigvals(L)
            radius = max(1.0, float(np.max(np.abs(eigvals))))
            gap = _min_gap(eigvals)
            best["gap"] = max(best["gap"], gap)
            if gap <= _SEP_FACTOR * radius:
                continue
            idem = self._lagrange_projectors(a, eigvals)
            idem = self._polish(idem)
            residual = self._idempotent_residual(idem)
            best["residual"] = min(best["residual"], residual)
            if residual <= 10 * tol.eps_structural * radius:
                weights = idem @ self.trace
                if np.min(np.abs(weights)) <= tol.eps_rank:
                    raise DegenerateWeight(
                        f"idempotent weight {np.min(np.abs(weights)):.3e} is numerically zero")
                order = _canonical_order(idem, weights)
                return IdempotentBasis(idempotents=idem[order], weights=weights[order])
        raise NotSemisimple({
            "attempts": _RETRY_BUDGET,
            "best_eigenvalue_gap": best["gap"],
            "best_idempotent_residual": best["residual"],
        })

    # -- internals ----------------------------------------------------------

    def _lagrange_projectors(self, a, eigvals) -> np.ndarray:
        """e_i = prod_{j != i} (a - lambda_j e) / (lambda_i - lambda_j),
        evaluated inside the algebra."""
        n = self.dim
        out = np.empty((n, n), dtype=complex)
        for i in range(n):
            e = self.unit.copy()
            for j in range(n):
                if j == i:
                    continue
                factor = (a - eigvals[j] * self.unit) / (eigvals[i] - eigvals[j])
                e = self.multiply(e, factor)
            out[i] = e
        return out

    def _polish(self, idem: np.ndarray) -> np.ndarray:
        out = idem.copy()
        for i in range(out.shape[0]):
            e = out[i]
            for _ in range(_POLISH_STEPS):
                e2 = self.multiply(e, e)
                e3 = self.multiply(e2, e)
                e = 3 * e2 - 2 * e3
            out[i] = e
        return out

    def _idempotent_residual(self, idem: np.ndarray) -> float:
        n = idem.shape[0]
        res = float(np.max(np.abs(idem.sum(axis=0) - self.unit)))
        for i in range(n):
            for j in range(n):
                prod = self.multiply(idem[i], idem[j])
                target = idem[i] if i == j else 0.0
                res = max(res, float(np.max(np.abs(prod - target))))
        return res

    def __repr__(self):
        return f"FrobeniusAlgebra(dim={self.dim})"


def _min_gap(eigvals) -> float:
    n = len(eigvals)
    if n == 1:
        return np.inf
    diffs = np.abs(eigvals[:, None] - eigvals[None, :]) + np.diag([np.inf] * n)
    return float(np.min(diffs))


def _canonical_order(idem, weights):
    """Sort by (-|weight|, rounded coordinates): reproducible total order on a
    basis that is intrinsically only defined up to permutation."""
    def key(i):
        coords = tuple((_round6(z.real), _round6(z.imag)) for z in idem[i])
        return (-_round6(abs(weights[i])), coords)
    return sorted(range(idem.shape[0]), key=key)


def direct_sum(a: FrobeniusAlgebra, b: FrobeniusAlgebra) -> FrobeniusAlgebra:
    """Block-diagonal sum: structure constants in blocks, traces concatenated."""
    na, nb = a.dim, b.dim
    c = np.zeros((na + nb, na + nb, na + nb), dtype=complex)
    c[:na, :na, :na] = a.c
    c[na:, na:, na:] = b.c
    return FrobeniusAlgebra(c, np.concatenate([a.unit, b.unit]),
                            np.concatenate([a.trace, b.trace]))


def diagonal_algebra(weights) -> FrobeniusAlgebra:
    """C^n with componentwise product and trace theta(e_i) = weights[i]."""
    w = np.asarray(weights, dtype=complex)
    n = w.shape[0]
    c = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        c[i, i, i] = 1.0
    return FrobeniusAlgebra(c, np.ones(n), w)


def conjugate(a: FrobeniusAlgebra, p) -> FrobeniusAlgebra:
    """Transport of structure along the linear isomorphism x -> P x.

    The result has product x *' y = P((P^-1 x)(P^-1 y)), unit P e and trace
    theta o P^-1; its idempotents are P applied to those of `a`.
    """
    p = np.asarray(p, dtype=complex)
    q = np.linalg.inv(p)
    c = np.einsum("ai,bj,abm,km->ijk", q, q, a.c, p)
    return FrobeniusAlgebra(c, p @ a.unit, a.trace @ q)


def nilpotent_example() -> FrobeniusAlgebra:
    """C[x]/(x^2) with theta(1) = 0, theta(x) = 1: Frobenius but not
    semisimple (Gram is the swap matrix, x is nilpotent)."""
    c = np.zeros((2, 2, 2), dtype=complex)
    c[0, 0, 0] = 1.0
    c[0, 1, 1] = 1.0
    c[1, 0, 1] = 1.0
    return FrobeniusAlgebra(c, [1.0, 0.0], [0.0, 1.0])


def quadratic_extension(t=1.0) -> FrobeniusAlgebra:
    """C[x]/(x^2 - t) with theta = (1, 0) in the basis {1, x}."""
    c = np.zeros((2, 2, 2), dtype=complex)
    c[0, 0, 0] = 1.0
    c[0, 1, 1] = 1.0
    c[1, 0, 1] = 1.0
    c[1, 1, 0] = complex(t)
    return FrobeniusAlgebra(c, [1.0, 0.0], [1.0, 0.0])

"""Local differential operators, conjugation, metric transforms, locality.

A :class:`LocalOperator` is a finite list of (derivative order, coefficient
function) terms — a variable-coefficient differential operator. Its matrix
on a grid is built from the grid's differentiation matrices.

Changing coordinates by an integral kernel ``W`` conjugates operator
matrices (``W^+ A W``) and transforms metrics (``W* G W``). Conjugation
through a regularized pseudo-inverse always attaches its
:class:`~funcoord.kernels.ConditionReport`; for ill-conditioned transforms
prefer residual checks ``A W - W B`` over explicit conjugation.

Locality on a grid is quantified by band mass: the fraction of squared
Frobenius mass within a band around the diagonal. Banded matrices are the
discrete shadow of differential (local) operators, so a score near 1 is
the grid-level signature of locality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, MetricDegeneracyError
from .grid import Grid, OperatorMatrix, diff_matrix
from .kernels import invert

__all__ = [
    "LocalOperator",
    "Metric",
    "to_matrix",
    "conjugate",
    "transform_metric",
    "locality_score",
]

#: maximum differential order of a LocalOperator
MAX_LOCAL_ORDER = 4

Coefficient = Union[float, Callable]


@dataclass(frozen=True)
class LocalOperator:
    """Differential operator ``sum_q a_q(x) d^q/dx^q``.

    ``terms`` maps derivative orders to coefficient functions of x
    (constants allowed). At most one term per order; order <= 4.
    """

    terms: Tuple[Tuple[int, Coefficient], ...]

    def __init__(self, terms: Sequence[Tuple[int, Coefficient]]):
        seen = set()
        normalized = []
        for q, a in terms:
            q = int(q)
            if q < 0:
                raise DomainError(f"derivative order must be >= 0, got {q}")
            if q > MAX_LOCAL_ORDER:
                raise DomainError(
                    f"local operators support order <= {MAX_LOCAL_ORDER}, got {q}"
                )
            if q in seen:
                raise DomainError(f"duplicate term for derivative order {q}")
            seen.add(q)
            normalized.append((q, a))
        if not normalized:
            raise DomainError("operator needs at least one term")
        normalized.sort(key=lambda t: t[0])
        object.__setattr__(self, "terms", tuple(normalized))

    @property
    def order(self) -> int:
        return self.terms[-1][0]


def _coefficient_samples(a: Coefficient, nodes: np.ndarray) -> np.ndarray:
    if callable(a):
        return np.asarray(a(nodes), dtype=float) * np.ones_like(nodes)
    return np.full(nodes.shape, float(a))


def to_matrix(op: LocalOperator, grid: Grid) -> OperatorMatrix:
    """Assemble ``sum_q diag(a_q(x_i)) D_q`` on the grid (q = 0 is plain
    multiplication by ``a_0``)."""
    total = np.zeros((grid.n, grid.n))
    for q, a in op.terms:
        coeff = _coefficient_samples(a, grid.nodes)
        if q == 0:
            total += np.diag(coeff)
        else:
            total += coeff[:, None] * diff_matrix(grid, q).entries
    return OperatorMatrix(total, grid)


def conjugate(
    A: OperatorMatrix, W: OperatorMatrix, threshold: float = 1.0e-10
) -> OperatorMatrix:
    """Coordinate-transformed operator ``invert(W) A W``.

    The regularized inverse's :class:`ConditionReport` is attached to the
    result's ``condition`` field — always inspect it: a truncated rank
    means the conjugation is only determined on the resolved subspace.
    """
    if A.n != W.n:
        raise DomainError(f"dimension mismatch: A is {A.n}, W is {W.n}")
    w_inv, report = invert(W, threshold)
    out = OperatorMatrix(w_inv.entries @ A.entries @ W.entries, A.grid or W.grid)
    out.condition = report
    return out


@dataclass
class Metric:
    """Symmetric positive-definite bilinear form on grid samples."""

    matrix: OperatorMatrix

    def __post_init__(self):
        m = self.matrix.entries
        scale = float(np.max(np.abs(m))) or 1.0
        if float(np.max(np.abs(m - m.conj().T))) > 1.0e-12 * scale:
            raise MetricDegeneracyError("metric matrix is not symmetric")
        eigs = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
        if eigs[0] <= 0.0:
            raise MetricDegeneracyError(
                f"metric is not positive definite (min eigenvalue {eigs[0]:.3e})"
            )

    @property
    def n(self) -> int:
        return self.matrix.n


def transform_metric(G: Metric, W: OperatorMatrix) -> Metric:
    """Pull back a metric through a coordinate transformation: ``W* G W``.

    Verifies the result is symmetric positive (semi-)definite before
    wrapping it; a rank-deficient ``W`` degenerates the metric and raises
    :class:`MetricDegeneracyError`.
    """
    if G.n != W.n:
        raise DomainError(f"dimension mismatch: G is {G.n}, W is {W.n}")
    m = W.entries.conj().T @ G.matrix.entries @ W.entries
    scale = float(np.max(np.abs(m))) or 1.0
    if float(np.max(np.abs(m - m.conj().T))) > 1.0e-10 * scale:
        raise MetricDegeneracyError("transformed metric lost symmetry")
    sym = (m + m.conj().T) / 2.0
    eigs = np.linalg.eigvalsh(sym)
    if eigs[0] < -1.0e-10 * max(scale, float(eigs[-1])):
        raise MetricDegeneracyError(
            f"transformed metric is indefinite (min eigenvalue {eigs[0]:.3e})"
        )
    return Metric(OperatorMatrix(sym, W.grid or G.matrix.grid))


def locality_score(A: OperatorMatrix, bandwidth_nodes: int) -> float:
    """Fraction of squared Frobenius mass within ``|i - j| <= bandwidth``.

    Uses periodic index distance when the matrix carries a periodic grid.
    A zero matrix scores 1.0 (vacuously local). The physical bandwidth is
    ``bandwidth_nodes * grid.spacing``.
    """
    bandwidth_nodes = int(bandwidth_nodes)
    if bandwidth_nodes < 0:
        raise DomainError(f"bandwidth must be >= 0, got {bandwidth_nodes}")
    n = A.n
    i, j = np.indices((n, n))
    dist = np.abs(i - j)
    if A.grid is not None and A.grid.periodic:
        dist = np.minimum(dist, n - dist)
    mass = np.abs(A.entries) ** 2
    total = float(mass.sum())
    if total == 0.0:
        return 1.0
    return float(mass[dist <= bandwidth_nodes].sum() / total)

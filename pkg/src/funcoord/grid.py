"""Discretization substrate: uniform grids, quadrature, differentiation.

Every other module operates on the types defined here. A :class:`Grid` is a
uniform discretization of an interval ``[lo, hi]``; periodic grids exclude
the right endpoint and carry equal (rectangle-rule) quadrature weights,
which are spectrally accurate for smooth periodic integrands. Non-periodic
grids include both endpoints and carry trapezoid weights.

Differentiation matrices are spectral (via the discrete Fourier transform)
on periodic grids and 4th-order finite-difference stencils otherwise, so
that differentiation error sits far below the transform errors probed by
the verification suites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, UnsupportedOrderError

__all__ = [
    "Grid",
    "OperatorMatrix",
    "make_uniform_grid",
    "inner_product",
    "diff_matrix",
    "fd_weights",
    "wavenumbers",
    "derivative_symbol",
]

#: minimum node count accepted by make_uniform_grid
MIN_NODES = 8

#: maximum derivative order supported on non-periodic grids
MAX_FD_ORDER = 4


@dataclass(frozen=True)
class Grid:
    """Uniform discretization of an interval.

    Attributes
    ----------
    lo, hi : float
        Interval endpoints, ``hi > lo``.
    n : int
        Node count (>= 8).
    periodic : bool
        Periodic grids exclude ``hi``; spacing is ``(hi-lo)/n``.
        Non-periodic grids include both endpoints; spacing ``(hi-lo)/(n-1)``.
    nodes : ndarray
        Strictly increasing node coordinates, shape ``(n,)``.
    weights : ndarray
        Quadrature weights summing to ``hi - lo``.
    """

    lo: float
    hi: float
    n: int
    periodic: bool
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def spacing(self) -> float:
        span = self.hi - self.lo
        return span / self.n if self.periodic else span / (self.n - 1)

    def require_samples(self, values, name: str = "samples") -> np.ndarray:
        """Validate that ``values`` is a sample vector on this grid."""
        arr = np.asarray(values)
        if arr.shape != (self.n,):
            raise DomainError(
                f"{name} has shape {arr.shape}, expected ({self.n},) for this grid"
            )
        return arr


@dataclass
class OperatorMatrix:
    """Dense square matrix representing a discretized operator or kernel.

    The matrix acts on sample vectors of the grid it carries. ``grid`` may
    be ``None`` for detached matrices used in pure linear-algebra contexts
    (e.g. small inversion examples); whenever a grid is attached the matrix
    dimension must equal ``grid.n``.

    ``condition`` is populated by operations that performed a regularized
    inversion (see :func:`funcoord.kernels.invert`).
    """

    entries: np.ndarray
    grid: Optional[Grid] = None
    condition: Optional["object"] = None

    def __post_init__(self):
        self.entries = np.asarray(self.entries)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise DomainError(f"operator matrix must be square, got {self.entries.shape}")
        if self.grid is not None and self.entries.shape[0] != self.grid.n:
            raise DomainError(
                f"matrix dimension {self.entries.shape[0]} does not match grid.n = {self.grid.n}"
            )

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.entries @ other.entries, self.grid or other.grid)
        return self.entries @ np.asarray(other)

    def to_csv(self) -> str:
        """Entry-list CSV: ``i,j,value`` rows (``i,j,re,im`` when complex),
        full 17-significant-digit floats."""
        complex_valued = np.iscomplexobj(self.entries)
        lines = ["i,j,re,im"] if complex_valued else ["i,j,value"]
        for i in range(self.n):
            for j in range(self.n):
                v = self.entries[i, j]
                if complex_valued:
                    lines.append(f"{i},{j},{v.real:.17g},{v.imag:.17g}")
                else:
                    lines.append(f"{i},{j},{v:.17g}")
        return "\n".join(lines) + "\n"


def make_uniform_grid(lo: float, hi: float, n: int, periodic: bool = False) -> Grid:
    """Build a uniform grid with quadrature weights.

    Periodic grids use the rectangle rule (equal weights ``h``); non-periodic
    grids use the composite trapezoid rule (half weights at the endpoints).

    Raises
    ------
    DomainError
        If ``hi <= lo`` or ``n < 8``.
    """
    lo, hi = float(lo), float(hi)
    n = int(n)
    if not hi > lo:
        raise DomainError(f"need hi > lo, got [{lo}, {hi}]")
    if n < MIN_NODES:
        raise DomainError(f"need n >= {MIN_NODES}, got {n}")
    span = hi - lo
    if periodic:
        h = span / n
        nodes = lo + h * np.arange(n)
        weights = np.full(n, h)
    else:
        h = span / (n - 1)
        nodes = np.linspace(lo, hi, n)
        weights = np.full(n, h)
        weights[0] = weights[-1] = h / 2.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return Grid(lo=lo, hi=hi, n=n, periodic=periodic, nodes=nodes, weights=weights)


def inner_product(f, g, grid: Grid) -> complex:
    """Quadrature inner product ``sum_k w_k conj(f_k) g_k``.

    Conjugate-linear in the first slot, so for real samples this is the
    plain weighted dot product. Raises :class:`DomainError` on a length
    mismatch with the grid.
    """
    fa = grid.require_samples(f, "f")
    ga = grid.require_samples(g, "g")
    value = np.sum(grid.weights * np.conj(fa) * ga)
    if np.iscomplexobj(fa) or np.iscomplexobj(ga):
        return complex(value)
    return float(value.real)


def fd_weights(nodes, x0: float, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at ``x0``.

    Classic Fornberg recursion on an arbitrary node set: returns ``w`` such
    that ``sum_k w[k] f(nodes[k])`` approximates ``f^(order)(x0)`` with
    accuracy ``len(nodes) - order`` (one better for symmetric stencils).
    """
    x = np.asarray(nodes, dtype=float)
    p = len(x)
    if order >= p:
        raise UnsupportedOrderError(
            f"{p} nodes cannot resolve derivative order {order}"
        )
    c = np.zeros((p, order + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0] - x0
    for i in range(1, p):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def wavenumbers(grid: Grid) -> np.ndarray:
    """Signed wavenumbers of a periodic grid, in FFT bin order.

    For a grid on ``[0, 2*pi)`` these are the integers
    ``0, 1, ..., n/2-1, -n/2, ..., -1``.
    """
    if not grid.periodic:
        raise DomainError("wavenumbers are defined for periodic grids only")
    return 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.spacing)


def derivative_symbol(grid: Grid, q: int) -> np.ndarray:
    """Fourier multiplier ``(i*kappa)^q`` of the order-``q`` spectral
    differentiation, including the even-``n`` Nyquist convention: the
    unpaired Nyquist mode gets multiplier 0 for odd ``q`` (the real
    differentiation matrix annihilates the sawtooth mode) and the usual
    real value for even ``q``.
    """
    mult = (1j * wavenumbers(grid)) ** q
    if grid.n % 2 == 0 and q % 2 == 1:
        mult[grid.n // 2] = 0.0
    return mult


def _spectral_diff(grid: Grid, q: int) -> np.ndarray:
    """Spectral differentiation matrix on a periodic grid.

    Exact on every resolved trigonometric mode (see
    :func:`derivative_symbol` for the Nyquist convention).
    """
    n = grid.n
    mult = derivative_symbol(grid, q)
    dense = np.fft.ifft(mult[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)
    return np.ascontiguousarray(dense.real)


def _fd_diff(grid: Grid, q: int) -> np.ndarray:
    """4th-order finite-difference matrix on a non-periodic grid.

    Interior rows use centered stencils (5 points for q <= 2, 7 for
    q in {3, 4}); rows near the boundary use one-sided windows of q + 5
    points so the boundary closure does not degrade the interior order.
    The diagonal is corrected to enforce exact zero row sums (constants
    differentiate to exactly zero).
    """
    n = grid.n
    x = grid.nodes
    radius = 2 if q <= 2 else 3
    p_boundary = q + 5
    if p_boundary > n:
        raise DomainError(f"grid too small for derivative order {q}")
    d = np.zeros((n, n))
    for i in range(n):
        if radius <= i <= n - 1 - radius:
            window = slice(i - radius, i + radius + 1)
        elif i < radius:
            window = slice(0, p_boundary)
        else:
            window = slice(n - p_boundary, n)
        d[i, window] = fd_weights(x[window], x[i], q)
    # zero row sums: exact derivative of constants
    d[np.arange(n), np.arange(n)] -= d.sum(axis=1)
    return d


def diff_matrix(grid: Grid, q: int) -> OperatorMatrix:
    """Differentiation matrix of order ``q`` on ``grid``.

    Periodic grids get spectral differentiation (exact on resolved modes);
    non-periodic grids get 4th-order stencils, supported for ``q <= 4``.

    Raises
    ------
    UnsupportedOrderError
        If ``q < 1``, or ``q > 4`` on a non-periodic grid.
    """
    q = int(q)
    if q < 1:
        raise UnsupportedOrderError(f"derivative order must be >= 1, got {q}")
    if grid.periodic:
        entries = _spectral_diff(grid, q)
    else:
        if q > MAX_FD_ORDER:
            raise UnsupportedOrderError(
                f"non-periodic grids support derivative order <= {MAX_FD_ORDER}, got {q}"
            )
        entries = _fd_diff(grid, q)
    return OperatorMatrix(entries, grid)

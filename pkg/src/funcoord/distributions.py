"""Generalized functions: smooth samples plus weighted delta derivatives.

A :class:`GeneralizedFunction` is a smooth part (samples on a grid) plus a
finite list of singular terms ``a * D^q delta(x - x0)``. The pairing sign
convention is the standard distributional one,

    (D^q delta_{x0}, phi) = (-1)^q phi^(q)(x0),

consistent with repeated integration by parts.

Delta terms are never discretized as spike vectors; they stay symbolic and
are consumed analytically by :func:`pair` and by kernel application.

Smooth parts may additionally declare known discontinuities: a jump
annotation ``(x0, order, height)`` states that the ``order``-th derivative
of the smooth part jumps by ``height`` at ``x0`` (order 0 is a plain value
jump, order 1 a slope kink, ...). Declared structure is what lets
:func:`differentiate` emit the correct delta terms instead of finite-
differencing across a discontinuity, and lets kernel application integrate
the discontinuous piece exactly. Detecting jumps numerically from samples
is deliberately out of scope.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, UnsupportedOrderError
from .grid import Grid, diff_matrix, make_uniform_grid

__all__ = [
    "DEFAULT_ORDER_CAP",
    "SingularTerm",
    "GeneralizedFunction",
    "TestFunction",
    "pair",
    "differentiate",
    "apply_constant_coeff_operator",
]

#: default cap on delta-derivative orders
DEFAULT_ORDER_CAP = 8


@dataclass(frozen=True)
class SingularTerm:
    """One summand ``a * D^q delta(x - x0)``."""

    x0: float
    q: int
    a: float

    def __post_init__(self):
        if self.q < 0:
            raise DomainError(f"derivative order must be >= 0, got {self.q}")


def _step(t, at_zero=0.5):
    """Unit step samples with midpoint value at an exact node hit."""
    out = np.where(t > 0, 1.0, 0.0)
    return np.where(t == 0, at_zero, out)


def _ramp(t, order: int):
    """``H(t) t^order / order!`` — the one-sided monomial whose ``order``-th
    derivative jumps by one at t = 0."""
    t = np.asarray(t, dtype=float)
    if order == 0:
        return _step(t)
    return np.where(t > 0, t, 0.0) ** order / math.factorial(order)


@dataclass(frozen=True)
class GeneralizedFunction:
    """Distribution on a grid: optional smooth samples + singular terms.

    Parameters
    ----------
    grid : Grid
    smooth : array or None
        Samples of the regular part on ``grid.nodes``.
    singular : sequence of SingularTerm
        Canonicalized on construction: terms with identical ``(x0, q)``
        merge, exact-zero weights drop.
    jumps : sequence of (x0, order, height)
        Declared discontinuities of the smooth part (see module docstring).
        Pairs ``(x0, height)`` are accepted and mean ``order = 0``.
    order_cap : int
        Maximum allowed delta-derivative order.
    """

    grid: Grid
    smooth: Optional[np.ndarray] = None
    singular: tuple = ()
    jumps: tuple = ()
    order_cap: int = DEFAULT_ORDER_CAP

    def __post_init__(self):
        if self.smooth is not None:
            arr = np.asarray(self.smooth, dtype=float)
            self.grid.require_samples(arr, "smooth part")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, "smooth", arr)
        terms = []
        for t in self.singular:
            if not isinstance(t, SingularTerm):
                t = SingularTerm(float(t[0]), int(t[1]), float(t[2]))
            terms.append(t)
        object.__setattr__(self, "singular", _canonical_terms(terms, self.order_cap))
        jumps = []
        for j in self.jumps:
            if len(j) == 2:
                x0, order, height = float(j[0]), 0, float(j[1])
            else:
                x0, order, height = float(j[0]), int(j[1]), float(j[2])
            if order < 0:
                raise DomainError(f"jump order must be >= 0, got {order}")
            jumps.append((x0, order, height))
        if jumps and self.smooth is None:
            raise DomainError("jump annotations require a smooth part")
        object.__setattr__(self, "jumps", _canonical_jumps(jumps))
        for x0 in [t.x0 for t in self.singular] + [j[0] for j in self.jumps]:
            if not (self.grid.lo < x0 < self.grid.hi):
                raise DomainError(
                    f"singular point {x0} not strictly inside ({self.grid.lo}, {self.grid.hi})"
                )

    # -- structure helpers -------------------------------------------------

    @property
    def max_order(self) -> int:
        return max((t.q for t in self.singular), default=0)

    def declared_structure(self, nodes) -> np.ndarray:
        """Samples of the declared step/ramp structure at ``nodes``."""
        nodes = np.asarray(nodes, dtype=float)
        out = np.zeros_like(nodes)
        for x0, order, height in self.jumps:
            out += height * _ramp(nodes - x0, order)
        return out

    def smooth_remainder(self) -> Optional[np.ndarray]:
        """Smooth part minus declared structure — continuous by contract."""
        if self.smooth is None:
            return None
        if not self.jumps:
            return self.smooth
        return self.smooth - self.declared_structure(self.grid.nodes)

    # -- linear-space operations -------------------------------------------

    def scaled(self, c: float) -> "GeneralizedFunction":
        return GeneralizedFunction(
            grid=self.grid,
            smooth=None if self.smooth is None else c * self.smooth,
            singular=[SingularTerm(t.x0, t.q, c * t.a) for t in self.singular],
            jumps=[(x0, order, c * h) for x0, order, h in self.jumps],
            order_cap=self.order_cap,
        )

    def __add__(self, other: "GeneralizedFunction") -> "GeneralizedFunction":
        if other.grid is not self.grid and not _same_grid(self.grid, other.grid):
            raise DomainError("cannot add generalized functions on different grids")
        if self.smooth is None:
            smooth = other.smooth
        elif other.smooth is None:
            smooth = self.smooth
        else:
            smooth = self.smooth + other.smooth
        return GeneralizedFunction(
            grid=self.grid,
            smooth=smooth,
            singular=list(self.singular) + list(other.singular),
            jumps=list(self.jumps) + list(other.jumps),
            order_cap=max(self.order_cap, other.order_cap),
        )

    def __sub__(self, other: "GeneralizedFunction") -> "GeneralizedFunction":
        return self + other.scaled(-1.0)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        """JSON form: {"smooth": [...], "jumps": [[x0,h] | [x0,q,h]], ...}.

        Order-0 jumps serialize as pairs, higher orders as triples.
        """
        doc = {
            "smooth": None if self.smooth is None else [float(v) for v in self.smooth],
            "jumps": [
                [x0, h] if order == 0 else [x0, order, h]
                for x0, order, h in self.jumps
            ],
            "singular": [[t.x0, t.q, t.a] for t in self.singular],
            "grid": {
                "lo": self.grid.lo,
                "hi": self.grid.hi,
                "n": self.grid.n,
                "periodic": self.grid.periodic,
            },
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GeneralizedFunction":
        doc = json.loads(text)
        g = doc["grid"]
        grid = make_uniform_grid(g["lo"], g["hi"], g["n"], bool(g["periodic"]))
        return cls(
            grid=grid,
            smooth=doc.get("smooth"),
            singular=[tuple(t) for t in doc.get("singular", [])],
            jumps=[tuple(j) for j in doc.get("jumps", [])],
        )


def _same_grid(a: Grid, b: Grid) -> bool:
    return (
        a.lo == b.lo and a.hi == b.hi and a.n == b.n and a.periodic == b.periodic
    )


def _canonical_terms(terms, order_cap) -> tuple:
    merged: dict = {}
    for t in terms:
        if t.q > order_cap:
            raise UnsupportedOrderError(
                f"delta-derivative order {t.q} exceeds cap {order_cap}"
            )
        key = (t.x0, t.q)
        merged[key] = merged.get(key, 0.0) + t.a
    out = [
        SingularTerm(x0, q, a)
        for (x0, q), a in merged.items()
        if a != 0.0
    ]
    out.sort(key=lambda t: (t.x0, t.q))
    return tuple(out)


def _canonical_jumps(jumps) -> tuple:
    merged: dict = {}
    for x0, order, h in jumps:
        key = (x0, order)
        merged[key] = merged.get(key, 0.0) + h
    out = [(x0, order, h) for (x0, order), h in merged.items() if h != 0.0]
    out.sort()
    return tuple(out)


@dataclass(frozen=True)
class TestFunction:
    """Sampled test function with derivative samples up to some order.

    ``derivatives[q]`` holds samples of the q-th derivative; order 0 is the
    function itself. Pointwise derivative values at off-node locations are
    recovered by cubic interpolation.
    """

    __test__ = False  # not a pytest class despite the name

    grid: Grid
    derivatives: Mapping[int, np.ndarray]

    def __post_init__(self):
        derivs = {}
        for q, samples in self.derivatives.items():
            derivs[int(q)] = self.grid.require_samples(samples, f"derivative {q}")
        if 0 not in derivs:
            raise DomainError("test function must supply order-0 values")
        object.__setattr__(self, "derivatives", derivs)

    @property
    def values(self) -> np.ndarray:
        return self.derivatives[0]

    @classmethod
    def from_callables(cls, grid: Grid, fns: Sequence) -> "TestFunction":
        """Build from analytic callables ``fns[q]`` for each derivative order."""
        return cls(grid, {q: np.asarray(fn(grid.nodes), dtype=float) for q, fn in enumerate(fns)})

    @classmethod
    def from_samples(cls, grid: Grid, values, max_order: int) -> "TestFunction":
        """Build by numerically differentiating ``values`` with diff_matrix."""
        derivs = {0: np.asarray(values, dtype=float)}
        for q in range(1, max_order + 1):
            derivs[q] = diff_matrix(grid, 1).entries @ derivs[q - 1]
        return cls(grid, derivs)

    def derivative_at(self, q: int, x0: float) -> float:
        if q not in self.derivatives:
            raise DomainError(f"test function lacks derivative order {q}")
        nodes = self.grid.nodes
        samples = self.derivatives[q]
        if self.grid.periodic:
            # close the period so interpolation covers (lo, hi)
            nodes = np.append(nodes, self.grid.hi)
            samples = np.append(samples, samples[0])
            spline = CubicSpline(nodes, samples, bc_type="periodic")
        else:
            spline = CubicSpline(nodes, samples)
        return float(spline(x0))


def pair(f: GeneralizedFunction, test: TestFunction) -> float:
    """Dual pairing ``(f, test)``.

    Quadrature of ``smooth * test`` plus, for each singular term,
    ``a * (-1)^q * test^(q)(x0)`` with the derivative value interpolated
    from the supplied samples. Raises :class:`DomainError` if the test
    function lacks a required derivative order.
    """
    if not _same_grid(f.grid, test.grid):
        raise DomainError("generalized function and test function use different grids")
    total = 0.0
    if f.smooth is not None:
        total += float(np.sum(f.grid.weights * f.smooth * test.values))
    for t in f.singular:
        total += t.a * (-1.0) ** t.q * test.derivative_at(t.q, t.x0)
    return total


def differentiate(f: GeneralizedFunction) -> GeneralizedFunction:
    """Distributional derivative.

    The declared step/ramp structure is subtracted before numerical
    differentiation so the remainder is smooth; each order-0 jump then
    emits a delta term of matching weight, higher-order jump annotations
    drop one order, and every singular term's order increases by one.
    """
    new_singular = []
    for t in f.singular:
        if t.q + 1 > f.order_cap:
            raise UnsupportedOrderError(
                f"differentiation would exceed delta-order cap {f.order_cap}"
            )
        new_singular.append(SingularTerm(t.x0, t.q + 1, t.a))

    new_smooth = None
    new_jumps = []
    if f.smooth is not None:
        d = diff_matrix(f.grid, 1).entries
        new_smooth = d @ f.smooth_remainder()
        for x0, order, height in f.jumps:
            if order == 0:
                new_singular.append(SingularTerm(x0, 0, height))
            else:
                new_smooth = new_smooth + height * _ramp(f.grid.nodes - x0, order - 1)
                new_jumps.append((x0, order - 1, height))

    return GeneralizedFunction(
        grid=f.grid,
        smooth=new_smooth,
        singular=new_singular,
        jumps=new_jumps,
        order_cap=f.order_cap,
    )


def apply_constant_coeff_operator(
    L: Sequence, f: GeneralizedFunction
) -> GeneralizedFunction:
    """Apply ``sum_q c_q d^q/dx^q`` with constant coefficients ``c_q``.

    ``L`` is a sequence of ``(order, coefficient)`` pairs; coefficients must
    be numbers. The result is returned in canonical form.
    """
    terms = []
    for order, coeff in L:
        order = int(order)
        if order < 0:
            raise DomainError(f"operator order must be >= 0, got {order}")
        if not isinstance(coeff, (int, float, np.integer, np.floating)):
            raise DomainError("coefficients must be constants")
        terms.append((order, float(coeff)))
    if not terms:
        raise DomainError("operator has no terms")

    max_order = max(order for order, _ in terms)
    derivatives = [f]
    for _ in range(max_order):
        derivatives.append(differentiate(derivatives[-1]))

    result = None
    for order, coeff in terms:
        piece = derivatives[order].scaled(coeff)
        result = piece if result is None else result + piece
    return result

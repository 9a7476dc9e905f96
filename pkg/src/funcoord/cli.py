"""Command-line interface: configure grids and kernels, run verification
suites, transform generalized functions, and export residual fields.

Commands
--------
``verify``     run verification suites, write one JSON report per suite and
               an aggregate summary; exit 0 iff everything passed.
``transform``  apply the configured kernel to a generalized function read
               from JSON; write samples as CSV and JSON. ``--invert``
               additionally applies the regularized inverse transform and
               prints its condition report.
``residual``   evaluate the kernel intertwining-equation residual for given
               derivative orders and registry coefficients; write the field
               as CSV and a JSON summary.

Exit codes: 0 success, 1 suite failure, 2 configuration error, 3 I/O error.

Coefficient functions come from a fixed named registry (no expression
parser); kernels are selected by id. All floating-point output uses 17
significant digits so emitted files round-trip bit-exactly, and every
randomized draw is controlled by ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .distributions import GeneralizedFunction
from .errors import FuncoordError
from .grid import Grid, make_uniform_grid
from .kernels import (
    Kernel,
    apply,
    dilation,
    discretize,
    exp_exp,
    fourier,
    gaussian,
    invert,
    kernel_pde_residual,
    multiplication,
    riccati_kernel,
    translation_family,
)
from .theorems import (
    VerificationReport,
    check_derivative_preservation,
    check_fourier_diagonalizes,
    check_nonlinear_tensor,
    check_product_preservation,
    check_xdx_intertwine,
    ramp_instance,
    smooth_from_generalized,
    step_instance,
    theorem_property_suite,
)

__all__ = ["main", "RunConfig", "COEFFICIENTS", "KERNELS", "SUITES"]

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_CONFIG = 2
EXIT_IO = 3


class ConfigError(FuncoordError, ValueError):
    """Invalid CLI configuration."""


# ---------------------------------------------------------------------------
# registries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NamedCoefficient:
    """Registry coefficient: callable plus its analytic derivatives."""

    name: str
    fn: Callable
    derivs: Tuple[Callable, ...]

    def __call__(self, t):
        return self.fn(t)


def _const(value):
    return lambda t: np.full(np.shape(t), value) if np.ndim(t) else value


COEFFICIENTS: Dict[str, NamedCoefficient] = {
    c.name: c
    for c in [
        NamedCoefficient("1", _const(1.0), (_const(0.0), _const(0.0))),
        NamedCoefficient("x", lambda t: np.asarray(t, dtype=float), (_const(1.0), _const(0.0))),
        NamedCoefficient("x^2", lambda t: np.asarray(t, dtype=float) ** 2,
                         (lambda t: 2.0 * np.asarray(t, dtype=float), _const(2.0))),
        NamedCoefficient("y", lambda t: np.asarray(t, dtype=float), (_const(1.0), _const(0.0))),
        NamedCoefficient("y^2", lambda t: np.asarray(t, dtype=float) ** 2,
                         (lambda t: 2.0 * np.asarray(t, dtype=float), _const(2.0))),
        NamedCoefficient("e^y", np.exp, (np.exp, np.exp)),
        NamedCoefficient("e^-y", lambda t: np.exp(-np.asarray(t, dtype=float)),
                         (lambda t: -np.exp(-np.asarray(t, dtype=float)),
                          lambda t: np.exp(-np.asarray(t, dtype=float)))),
        NamedCoefficient("-iy", lambda t: -1j * np.asarray(t, dtype=float),
                         (_const(-1j), _const(0.0))),
        NamedCoefficient("-y^2", lambda t: -(np.asarray(t, dtype=float) ** 2),
                         (lambda t: -2.0 * np.asarray(t, dtype=float), _const(-2.0))),
    ]
}


def _coefficient(name: str) -> NamedCoefficient:
    if name not in COEFFICIENTS:
        raise ConfigError(
            f"unknown coefficient {name!r}; registry: {sorted(COEFFICIENTS)}"
        )
    return COEFFICIENTS[name]


def _kernel_gaussian(params):
    return gaussian()


def _kernel_fourier(params):
    return fourier()


def _kernel_identity(params):
    return dilation(1.0)


def _kernel_dilation(params):
    return dilation(float(params.get("c", 1.0)))


def _kernel_multiplication(params):
    a0 = _coefficient(params.get("a0", "1"))
    return multiplication(a0.fn)


def _kernel_exp_exp_plus(params):
    return exp_exp(+1)


def _kernel_exp_exp_minus(params):
    return exp_exp(-1)


def _kernel_translation_tgauss(params):
    # profile t*exp(-t^2) with analytic derivatives
    f = lambda t: t * np.exp(-(t**2))
    d1 = lambda t: (1.0 - 2.0 * t**2) * np.exp(-(t**2))
    d2 = lambda t: (4.0 * t**3 - 6.0 * t) * np.exp(-(t**2))
    return translation_family(f, [d1, d2], tail_integrable=True, id="translation_tgauss")


KERNELS: Dict[str, Callable] = {
    "gaussian": _kernel_gaussian,
    "fourier": _kernel_fourier,
    "identity": _kernel_identity,
    "dilation": _kernel_dilation,
    "multiplication": _kernel_multiplication,
    "exp_exp_plus": _kernel_exp_exp_plus,
    "exp_exp_minus": _kernel_exp_exp_minus,
    "translation_tgauss": _kernel_translation_tgauss,
}


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Resolved run configuration (config file merged with flag overrides)."""

    lo: Optional[float] = None
    hi: Optional[float] = None
    n: Optional[int] = None
    periodic: Optional[bool] = None
    kernel: Dict = field(default_factory=lambda: {"id": "gaussian"})
    suites: List[str] = field(default_factory=lambda: ["all"])
    tolerances: Dict[str, float] = field(default_factory=dict)
    out: str = "funcoord-out"
    formats: List[str] = field(default_factory=lambda: ["csv", "json"])
    seed: int = 7
    threshold: float = 1.0e-10
    invert: bool = False
    a: str = "1"
    b: str = "1"

    def validate(self) -> "RunConfig":
        if self.n is not None and self.n < 8:
            raise ConfigError(f"n must be >= 8, got {self.n}")
        if self.lo is not None and self.hi is not None and not self.hi > self.lo:
            raise ConfigError(f"need hi > lo, got [{self.lo}, {self.hi}]")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold must lie in (0, 1), got {self.threshold}")
        kid = self.kernel.get("id")
        if kid not in KERNELS:
            raise ConfigError(f"unknown kernel {kid!r}; registry: {sorted(KERNELS)}")
        suites = []
        for s in self.suites:
            if s == "all":
                suites.extend(SUITE_ORDER)
            elif s in SUITES:
                suites.append(s)
            else:
                raise ConfigError(f"unknown suite {s!r}; registry: {SUITE_ORDER}")
        # preserve declared order, drop duplicates
        seen = set()
        self.suites = [s for s in suites if not (s in seen or seen.add(s))]
        for key, value in self.tolerances.items():
            if not isinstance(value, (int, float)) or not value > 0:
                raise ConfigError(f"tolerance override {key!r} must be positive")
        for fmt in self.formats:
            if fmt not in ("csv", "json"):
                raise ConfigError(f"unknown output format {fmt!r}")
        for name in (self.a, self.b):
            if name not in COEFFICIENTS:
                raise ConfigError(
                    f"unknown coefficient {name!r}; registry: {sorted(COEFFICIENTS)}"
                )
        return self

    def make_kernel(self) -> Kernel:
        params = {k: v for k, v in self.kernel.items() if k != "id"}
        return KERNELS[self.kernel["id"]](params)

    def grid_or(self, lo: float, hi: float, n: int, periodic: bool) -> Grid:
        """Suite default grid with any user overrides applied."""
        return make_uniform_grid(
            lo if self.lo is None else self.lo,
            hi if self.hi is None else self.hi,
            n if self.n is None else self.n,
            periodic if self.periodic is None else self.periodic,
        )

    def suite_tolerances(self, suite: str) -> Dict[str, float]:
        """Overrides for one suite, given as '<suite>.<residual>' keys."""
        prefix = suite + "."
        return {
            key[len(prefix):]: float(value)
            for key, value in self.tolerances.items()
            if key.startswith(prefix)
        }


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(doc) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    return doc


def _resolve_config(args) -> RunConfig:
    doc = _load_config(getattr(args, "config", None))
    config = RunConfig(**doc)
    if getattr(args, "n", None) is not None:
        config.n = args.n
    if getattr(args, "lo", None) is not None:
        config.lo = args.lo
    if getattr(args, "hi", None) is not None:
        config.hi = args.hi
    if getattr(args, "periodic", False):
        config.periodic = True
    if getattr(args, "kernel", None) is not None:
        config.kernel = {"id": args.kernel}
    if getattr(args, "suite", None):
        config.suites = list(args.suite)
    if getattr(args, "out", None) is not None:
        config.out = args.out
    if getattr(args, "format", None) is not None:
        config.formats = [f.strip() for f in args.format.split(",") if f.strip()]
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "threshold", None) is not None:
        config.threshold = args.threshold
    if getattr(args, "invert", False):
        config.invert = True
    if getattr(args, "a", None) is not None:
        config.a = args.a
    if getattr(args, "b", None) is not None:
        config.b = args.b
    return config.validate()


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def _suite_fourier(config: RunConfig) -> List[VerificationReport]:
    grid = make_uniform_grid(0.0, 2.0 * np.pi, config.n or 32, periodic=True)
    tol = config.suite_tolerances("fourier") or None
    return [check_fourier_diagonalizes(grid, order=1, tolerances=tol)]


def _suite_derivative(config: RunConfig) -> List[VerificationReport]:
    grid = config.grid_or(-6.0, 6.0, 48, True)
    tol = config.suite_tolerances("derivative") or None
    return [
        check_derivative_preservation(gaussian(), grid, tolerances=tol),
        check_derivative_preservation(
            _kernel_translation_tgauss({}), grid, tolerances=tol
        ),
    ]


def _suite_theorem(config: RunConfig) -> List[VerificationReport]:
    eval_first = make_uniform_grid(-0.8, 0.8, 64, periodic=False)
    L, u, v = step_instance()
    first = smooth_from_generalized(
        L, u, v, eval_first, seed=config.seed, tolerance=1.0e-6,
        name="theorem_step_first_order",
    )
    L2, u2, v2 = ramp_instance()
    second = smooth_from_generalized(
        L2, u2, v2, eval_first, seed=config.seed, tolerance=1.0e-5,
        name="theorem_ramp_second_order",
    )
    suite = theorem_property_suite(count=50, seed=config.seed, tolerance=1.0e-5)
    return [first, second, suite]


def _suite_product(config: RunConfig) -> List[VerificationReport]:
    grid = config.grid_or(-6.0, 6.0, 64, False)
    tol = config.suite_tolerances("product") or None
    x2p1 = lambda t: np.asarray(t, dtype=float) ** 2 + 1.0
    ident = lambda t: np.asarray(t, dtype=float)
    return [
        check_product_preservation(1.0, gaussian(), grid, config.threshold, tol),
        check_product_preservation(ident, multiplication(x2p1), grid, config.threshold, tol),
        check_product_preservation(ident, gaussian(), grid, config.threshold, tol),
    ]


def _suite_xdx(config: RunConfig) -> List[VerificationReport]:
    grid = make_uniform_grid(0.0, 1.0, config.n or 32, periodic=False)
    tol = config.suite_tolerances("xdx") or None
    return [check_xdx_intertwine(grid, tolerances=tol)]


def _suite_nonlinear(config: RunConfig) -> List[VerificationReport]:
    tol = config.suite_tolerances("nonlinear") or None
    grid_id = make_uniform_grid(0.0, 2.0 * np.pi, 32, periodic=True)
    ident = check_nonlinear_tensor(
        dilation(1.0), np.sin(grid_id.nodes), grid_id, config.threshold,
        tolerances={**{"tensor_residual": 1.0e-9}, **(tol or {})},
    )
    grid_g = make_uniform_grid(-2.0 * np.pi, 2.0 * np.pi, 64, periodic=True)
    gauss = check_nonlinear_tensor(
        gaussian(), np.sin(grid_g.nodes), grid_g, config.threshold, tolerances=tol
    )
    return [ident, gauss]


def _suite_riccati(config: RunConfig) -> List[VerificationReport]:
    grid = make_uniform_grid(0.0, 1.0, config.n or 64, periodic=False)
    y2 = COEFFICIENTS["y^2"]
    kernel = riccati_kernel(1.0, y2.fn, COEFFICIENTS["y"].fn, grid)
    if "csv" in config.formats:
        from .kernels import table_csv

        _write_text(Path(config.out) / "riccati_table.csv", table_csv(kernel))
    _, max_norm = kernel_pde_residual(
        kernel, 2, 0, 1.0, y2.fn, grid, db=y2.derivs
    )
    tol = {"kernel_equation_residual": 1.0e-6}
    tol.update(config.suite_tolerances("riccati"))
    return [
        VerificationReport.build(
            name="riccati_second_order",
            residuals={"kernel_equation_residual": max_norm},
            tolerances=tol,
            notes=(
                "slope data b = y^2, g0 = y reproduces the separable kernel "
                "e^{x y}; residual of a d^2 w/dx^2 = w b on interior nodes",
            ),
        )
    ]


SUITES: Dict[str, Callable] = {
    "fourier": _suite_fourier,
    "derivative": _suite_derivative,
    "theorem": _suite_theorem,
    "product": _suite_product,
    "xdx": _suite_xdx,
    "nonlinear": _suite_nonlinear,
    "riccati": _suite_riccati,
}

SUITE_ORDER = ["fourier", "derivative", "theorem", "product", "xdx", "nonlinear", "riccati"]


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _samples_csv(x: np.ndarray, values: np.ndarray) -> str:
    if np.iscomplexobj(values):
        lines = ["x,re,im"]
        for xi, vi in zip(x, values):
            lines.append(f"{_fmt(xi)},{_fmt(vi.real)},{_fmt(vi.imag)}")
    else:
        lines = ["x,value"]
        for xi, vi in zip(x, values):
            lines.append(f"{_fmt(xi)},{_fmt(vi)}")
    return "\n".join(lines) + "\n"


def _field_csv(x: np.ndarray, y: np.ndarray, values: np.ndarray) -> str:
    complex_field = np.iscomplexobj(values)
    lines = ["x,y,re,im"] if complex_field else ["x,y,R"]
    for i, xi in enumerate(x):
        for j, yj in enumerate(y):
            v = values[i, j]
            if complex_field:
                lines.append(f"{_fmt(xi)},{_fmt(yj)},{_fmt(v.real)},{_fmt(v.imag)}")
            else:
                lines.append(f"{_fmt(xi)},{_fmt(yj)},{_fmt(v)}")
    return "\n".join(lines) + "\n"


def _dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify(config: RunConfig) -> int:
    """Run the selected suites in declared order; write per-suite reports
    and an aggregate summary; exit 0 iff everything passed."""
    out = Path(config.out)
    summary = {"suites": {}, "all_passed": True, "seed": config.seed}
    for suite in config.suites:
        reports = SUITES[suite](config)
        passed = all(r.passed for r in reports)
        summary["suites"][suite] = passed
        summary["all_passed"] = summary["all_passed"] and passed
        doc = {"suite": suite, "passed": passed, "reports": [r.to_dict() for r in reports]}
        _write_text(out / f"suite_{suite}.json", _dump_json(doc))
        for r in reports:
            status = "PASS" if r.passed else "FAIL"
            print(f"[{status}] {suite}: {r.name}")
    _write_text(out / "summary.json", _dump_json(summary))
    print(f"summary: {'all passed' if summary['all_passed'] else 'FAILURES'}")
    return EXIT_OK if summary["all_passed"] else EXIT_SUITE_FAILURE


def cmd_transform(config: RunConfig, input_path: str) -> int:
    """Apply the configured kernel to a generalized function from JSON."""
    try:
        text = Path(input_path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        gf = GeneralizedFunction.from_json(text)
    except (FuncoordError, KeyError, ValueError) as exc:
        print(f"error: invalid generalized-function JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    kernel = config.make_kernel()
    values = apply(kernel, gf)
    out = Path(config.out)
    x = gf.grid.nodes
    if "csv" in config.formats:
        _write_text(out / "transform.csv", _samples_csv(x, values))
    if "json" in config.formats:
        doc = {
            "kernel": config.kernel,
            "x": [float(v) for v in x],
            "value": [float(v) for v in np.real(values)],
        }
        if np.iscomplexobj(values):
            doc["value_im"] = [float(v) for v in np.imag(values)]
        _write_text(out / "transform.json", _dump_json(doc))

    if config.invert:
        if gf.smooth is None:
            print("error: --invert needs a smooth part to invert", file=sys.stderr)
            return EXIT_CONFIG
        matrix = discretize(kernel, gf.grid)
        inverse, report = invert(matrix, config.threshold)
        recovered = inverse.entries @ gf.smooth
        if "csv" in config.formats:
            _write_text(out / "transform_inverse.csv", _samples_csv(x, recovered))
        print(_dump_json(report.to_dict()), end="")
    return EXIT_OK


def cmd_residual(config: RunConfig, n: int, m: int) -> int:
    """Evaluate the kernel-equation residual field for orders (n, m)."""
    grid = config.grid_or(-6.0, 6.0, 32, False)
    kernel = config.make_kernel()
    a = COEFFICIENTS[config.a]
    b = COEFFICIENTS[config.b]
    field_, max_norm = kernel_pde_residual(
        kernel, n, m, a.fn, b.fn, grid, db=b.derivs
    )
    out = Path(config.out)
    if "csv" in config.formats:
        _write_text(out / "residual.csv", _field_csv(field_.x, field_.y, field_.values))
    summary = {
        "kernel": config.kernel,
        "n": n,
        "m": m,
        "a": config.a,
        "b": config.b,
        "max_norm": float(max_norm),
        "sign_convention": (
            "residual = a(x) d^n w/dx^n - (-1)^n d^m(w b)/dy^m; pick the sign "
            "of b accordingly (registry carries -iy and -y^2 for the "
            "oscillatory-kernel cases)"
        ),
    }
    if "json" in config.formats:
        _write_text(out / "residual.json", _dump_json(summary))
    print(_dump_json({"max_norm": float(max_norm)}), end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="funcoord",
        description="coordinate-transformation verification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file (flags override it)")
        p.add_argument("--kernel", help="kernel id", choices=sorted(KERNELS))
        p.add_argument("--n", type=int, help="node count (>= 8)")
        p.add_argument("--lo", type=float, help="left endpoint")
        p.add_argument("--hi", type=float, help="right endpoint")
        p.add_argument("--periodic", action="store_true", help="periodic grid")
        p.add_argument("--threshold", type=float, help="SVD truncation threshold")
        p.add_argument("--seed", type=int, help="seed for randomized draws")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", help="comma-separated outputs: csv,json")

    verify = sub.add_parser("verify", help="run verification suites")
    add_common(verify)
    verify.add_argument(
        "--suite", action="append", help="suite id or 'all' (repeatable)"
    )

    transform = sub.add_parser("transform", help="transform a generalized function")
    add_common(transform)
    transform.add_argument("--input", required=True, help="generalized-function JSON file")
    transform.add_argument(
        "--invert", action="store_true",
        help="also apply the regularized inverse and print its condition report",
    )

    residual = sub.add_parser("residual", help="kernel-equation residual field")
    add_common(residual)
    # distinct dest names: --n is the grid size, these are derivative orders
    residual.add_argument("dx_order", type=int, help="x-derivative order")
    residual.add_argument("dy_order", type=int, help="y-derivative order")
    residual.add_argument("--a", help="coefficient a(x) registry name")
    residual.add_argument("--b", help="coefficient b(y) registry name")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "transform":
            return cmd_transform(config, args.input)
        if args.command == "residual":
            return cmd_residual(config, args.dx_order, args.dy_order)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FuncoordError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

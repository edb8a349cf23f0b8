"""Operator convexity checks and heat-flow positivity experiments.

A function f is operator convex when the gap matrix

    G = mu f(A) + (1 - mu) f(B) - f(mu A + (1 - mu) B)

is PSD for all Hermitian A, B and mu in (0, 1).  The sampler refutes
convexity by finding a gap with a negative eigenvalue; passing it only
builds confidence.  The integral representation of operator convex
functions on [0, inf) is exercised through its closed-form building
blocks: x, x^2, and the shifted resolvent integrand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .geometry import TorusModel, delta1, delta2, laplacian_apply
from .flows import heat_flow_spectral
from .linalg import hermitian_eig, hs_norm, matrix_function, require_hermitian
from .sampling import random_hermitian, random_psd, rng_from_seed

MU_GRID = tuple(k / 10.0 for k in range(1, 10))
GAP_TOL = 1e-9


@dataclass(frozen=True)
class ScalarFunction:
    """A real scalar function applied through functional calculus.

    `domain` is the interval where f can be evaluated; `sample_psd` selects
    the PSD ensemble for convexity sampling (operator convexity of the
    [0, inf) family is only claimed there).
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float] = (-np.inf, np.inf)
    sample_psd: bool = False

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    @property
    def needs_psd(self) -> bool:
        return self.sample_psd


def identity_function() -> ScalarFunction:
    return ScalarFunction("identity", lambda x: x)


def square_function() -> ScalarFunction:
    return ScalarFunction("square", lambda x: x * x)


def cube_function() -> ScalarFunction:
    return ScalarFunction("cube", lambda x: x * x * x, sample_psd=True)


def resolvent(shift: float) -> ScalarFunction:
    """f(x) = shift / (x + shift); evaluates wherever x + shift != 0 stays
    positive, operator convex on [0, inf) for shift > 0."""
    if shift <= 0:
        raise ValueError("resolvent shift must be positive")
    return ScalarFunction(
        f"resolvent:{shift:g}",
        lambda x: shift / (x + shift),
        domain=(-shift, np.inf),
        sample_psd=True,
    )


def loewner_integrand(shift: float) -> ScalarFunction:
    """Building block x/(1 + shift) - 1 + shift/(x + shift) of the integral
    representation of operator convex functions on [0, inf)."""
    if shift <= 0:
        raise ValueError("integrand shift must be positive")
    return ScalarFunction(
        f"loewner:{shift:g}",
        lambda x: x / (1.0 + shift) - 1.0 + shift / (x + shift),
        domain=(-shift, np.inf),
        sample_psd=True,
    )


def custom_function(name, fn, domain=(-np.inf, np.inf), sample_psd=False) -> ScalarFunction:
    return ScalarFunction(name, fn, domain, sample_psd)


_FIXED = {
    "identity": identity_function,
    "square": square_function,
    "cube": cube_function,
}


def parse_function_spec(spec: str) -> ScalarFunction:
    """Parse "identity" | "square" | "cube" | "resolvent:<shift>" |
    "loewner:<shift>"."""
    spec = spec.strip()
    if spec in _FIXED:
        return _FIXED[spec]()
    if ":" in spec:
        head, _, tail = spec.partition(":")
        try:
            shift = float(tail)
        except ValueError:
            raise ValueError(f"bad shift in function spec {spec!r}") from None
        if head == "resolvent":
            return resolvent(shift)
        if head == "loewner":
            return loewner_integrand(shift)
    raise ValueError(f"unknown function spec {spec!r}")


def _check_domain(f: ScalarFunction, h: np.ndarray, what: str) -> None:
    w = hermitian_eig(h).eigenvalues
    lo, hi = f.domain
    if w[0] < lo - 1e-12 or w[-1] > hi + 1e-12:
        raise DomainError(
            f"spectrum of {what} ([{w[0]:.6g}, {w[-1]:.6g}]) leaves the domain of {f.name}"
        )


def apply_function(f: ScalarFunction, h: np.ndarray) -> np.ndarray:
    h = require_hermitian(h, "functional calculus input")
    _check_domain(f, h, "input")
    return matrix_function(h, f.fn, name=f.name)


def convexity_gap(f: ScalarFunction, a: np.ndarray, b: np.ndarray, mu: float) -> np.ndarray:
    """Hermitian gap matrix mu f(A) + (1-mu) f(B) - f(mu A + (1-mu) B)."""
    if not 0.0 < mu < 1.0:
        raise ValueError("mu must lie strictly between 0 and 1")
    a = require_hermitian(a, "convexity gap A")
    b = require_hermitian(b, "convexity gap B")
    mix = mu * a + (1.0 - mu) * b
    return mu * apply_function(f, a) + (1.0 - mu) * apply_function(f, b) - apply_function(f, mix)


@dataclass(frozen=True)
class ConvexityVerdict:
    is_convex_on_samples: bool
    worst_gap_min_eig: float
    witness: tuple[np.ndarray, np.ndarray, float] | None
    trials: int
    dim: int
    seed: int

    def __post_init__(self):
        assert (self.witness is not None) == (not self.is_convex_on_samples)


def is_operator_convex_sampled(
    f: ScalarFunction,
    dim: int,
    trials: int,
    seed: int,
    tol: float = GAP_TOL,
) -> ConvexityVerdict:
    """Search for a convexity violation over seeded random pairs.

    Each trial draws a pair (Hermitian, or PSD when f lives on [0, inf))
    from the sub-stream (seed, trial) and checks the gap for mu in
    0.1 .. 0.9.  The first gap whose smallest eigenvalue drops below -tol
    is returned as a witness; the search is deterministic given the seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    worst = np.inf
    witness = None
    for trial in range(trials):
        rng = rng_from_seed(seed, trial)
        if f.needs_psd:
            a = random_psd(dim, rng)
            b = random_psd(dim, rng)
        else:
            a = random_hermitian(dim, rng)
            b = random_hermitian(dim, rng)
        fa = apply_function(f, a)
        fb = apply_function(f, b)
        for mu in MU_GRID:
            gap = mu * fa + (1.0 - mu) * fb - apply_function(f, mu * a + (1.0 - mu) * b)
            low = float(hermitian_eig((gap + gap.conj().T) / 2.0).eigenvalues[0])
            if low < worst:
                worst = low
            if low < -tol and witness is None:
                witness = (a, b, mu)
        if witness is not None:
            break
    return ConvexityVerdict(
        is_convex_on_samples=witness is None,
        worst_gap_min_eig=float(worst),
        witness=witness,
        trials=trials,
        dim=dim,
        seed=seed,
    )


@dataclass(frozen=True)
class HeatPositivityReport:
    """Outcome of monitoring f(a(t)) > 0 along the plain heat flow."""

    refused: bool
    reason: str | None
    times: np.ndarray
    min_eig_f: np.ndarray
    min_eig_state: np.ndarray
    all_positive: bool | None
    function: str


def heat_positivity_experiment(
    m: TorusModel,
    f: ScalarFunction,
    a0: np.ndarray,
    t_grid: np.ndarray,
) -> HeatPositivityReport:
    """Evolve a0 by the heat flow (not the normalized flow) and record the
    smallest eigenvalue of f(a(t)) and of a(t) itself on the grid.

    Refused (not raised) when f(a0) is not PD, since the monitored claim
    presupposes a positive start.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or np.any(t_grid < 0) or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be nonempty, nonnegative, strictly increasing")
    a0 = require_hermitian(m.check_dim(a0), "heat positivity initial data")
    try:
        f_a0 = apply_function(f, a0)
    except DomainError as exc:
        return HeatPositivityReport(
            refused=True, reason=str(exc), times=t_grid,
            min_eig_f=np.full(t_grid.shape, np.nan),
            min_eig_state=np.full(t_grid.shape, np.nan),
            all_positive=None, function=f.name,
        )
    if hermitian_eig(f_a0).eigenvalues[0] <= 0.0:
        return HeatPositivityReport(
            refused=True, reason=f"{f.name}(a0) is not positive definite",
            times=t_grid,
            min_eig_f=np.full(t_grid.shape, np.nan),
            min_eig_state=np.full(t_grid.shape, np.nan),
            all_positive=None, function=f.name,
        )

    min_f = np.empty(t_grid.shape)
    min_a = np.empty(t_grid.shape)
    for j, t in enumerate(t_grid):
        a = heat_flow_spectral(m, a0, float(t))
        a = (a + a.conj().T) / 2.0
        min_a[j] = hermitian_eig(a).eigenvalues[0]
        min_f[j] = hermitian_eig(apply_function(f, a)).eigenvalues[0]
    return HeatPositivityReport(
        refused=False, reason=None, times=t_grid,
        min_eig_f=min_f, min_eig_state=min_a,
        all_positive=bool(np.all(min_f > 0.0)), function=f.name,
    )


def bochner_identity_check(m: TorusModel, a: np.ndarray) -> float:
    """HS norm of lap(a^2) - (lap(a) a + a lap(a) + 2 sum_mu (delta_mu a)^2).

    The right-hand side follows from applying the Leibniz rule twice, since
    the Laplacian is the sum of the squared derivations; the residual is
    pure floating-point error, <= 1e-9 * max(1, |a|^2) on sane inputs.
    """
    a = m.check_dim(a)
    la = laplacian_apply(m, a)
    d1 = delta1(m, a)
    d2 = delta2(m, a)
    rhs = la @ a + a @ la + 2.0 * (d1 @ d1 + d2 @ d2)
    return hs_norm(laplacian_apply(m, a @ a) - rhs)

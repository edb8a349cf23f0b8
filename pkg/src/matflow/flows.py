"""Solvers for the heat flow and the norm-preserving flow.

Three routes solve the same initial value problem

    a_t = -lap(a) + lambda(t) a,   lambda(t) = D(a)/M(a),   |a(0)| = 1

* spectral: exact mode-by-mode solution, a(t) = b(t)/|b(t)| where b solves
  the plain heat equation b_t = -lap(b);
* picard: the constructive iteration that freezes lambda_k(t), solves the
  resulting linear equation spectrally, then recomputes lambda;
* rk4: classical 4th-order time stepping of the right-hand side.

The spectral solvers work in eigen-coefficient space.  Mode coefficients
below 1e-14 of the largest are zeroed there: they are double-precision
noise, and letting them ride would let a spurious slow mode take over the
normalized flow at large times.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    TorusModel,
    laplacian_apply,
    rayleigh,
    spectral_coefficient_data,
    unvec,
)
from .linalg import CLUSTER_GAP, hermitian_eig, hs_norm, hs_norm_sq, is_hermitian

COEFF_NOISE = 1e-14
UNIT_NORM_TOL = 1e-9
_EXP_LIMIT = 700.0


@dataclass(frozen=True)
class FlowObservation:
    """Scalar observables of one state along a trajectory.

    min_eig is populated only for Hermitian states, log_det only for
    Hermitian positive definite ones.
    """

    t: float
    lam: float
    norm_sq: float
    trace: complex
    residual: float
    min_eig: float | None = None
    log_det: float | None = None


@dataclass(frozen=True)
class ConvergenceReport:
    converged: bool
    lambda_inf: float
    matched_index: int
    cluster: tuple[int, int]
    final_residual: float
    t_converged: float | None
    trace_free_input: bool
    gap_bound_ok: bool | None


@dataclass
class FlowTrace:
    """Time-ordered observations of one solved trajectory."""

    observations: list[FlowObservation]
    solver: str
    states: list[np.ndarray] | None = None
    info: dict = field(default_factory=dict)
    convergence: ConvergenceReport | None = None

    def __post_init__(self):
        ts = [o.t for o in self.observations]
        if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
            raise ValueError("observation times must be strictly increasing")

    def times(self) -> np.ndarray:
        return np.array([o.t for o in self.observations])

    def lambdas(self) -> np.ndarray:
        return np.array([o.lam for o in self.observations])

    def residuals(self) -> np.ndarray:
        return np.array([o.residual for o in self.observations])

    def norms_sq(self) -> np.ndarray:
        return np.array([o.norm_sq for o in self.observations])

    def traces(self) -> np.ndarray:
        return np.array([o.trace for o in self.observations])


def observe(m: TorusModel, t: float, a: np.ndarray) -> FlowObservation:
    """Measure one state: Rayleigh quotient, mass, trace, eigen-residual,
    and (for Hermitian states) min eigenvalue and log-determinant."""
    a = m.check_dim(a)
    lam = rayleigh(m, a)
    residual = hs_norm(laplacian_apply(m, a) - lam * a)
    min_eig = None
    log_det = None
    if is_hermitian(a):
        w = hermitian_eig((a + a.conj().T) / 2.0).eigenvalues
        min_eig = float(w[0])
        if min_eig > 0.0:
            log_det = float(np.sum(np.log(w)))
    return FlowObservation(
        t=float(t),
        lam=lam,
        norm_sq=hs_norm_sq(a),
        trace=complex(np.trace(a)),
        residual=residual,
        min_eig=min_eig,
        log_det=log_det,
    )


def _denoised_coefficients(m: TorusModel, a0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, u = spectral_coefficient_data(m, a0)
    mags = np.abs(u)
    u = np.where(mags > COEFF_NOISE * mags.max(initial=0.0), u, 0.0)
    return w, u


def _require_unit(a0: np.ndarray) -> None:
    if abs(hs_norm_sq(a0) - 1.0) > UNIT_NORM_TOL:
        raise ValueError("initial data must have unit HS norm")


def heat_flow_spectral(m: TorusModel, a0: np.ndarray, t: float) -> np.ndarray:
    """Solve b_t = -lap(b), b(0) = a0, exactly: sum_i u_i e^(-lambda_i t) phi_i."""
    if t < 0:
        raise ValueError("heat flow time must be >= 0")
    a0 = m.check_dim(a0)
    w, u = spectral_coefficient_data(m, a0)
    basis = m.eigenbasis()
    return unvec(basis.vectors @ (u * np.exp(-w * t)), m.n)


def _normalized_coefficients(w: np.ndarray, u: np.ndarray, t: float) -> np.ndarray:
    # shift by the slowest active mode so arbitrarily large t stays finite
    active = u != 0.0
    w_ref = w[active].min()
    c = np.where(active, u * np.exp(-(w - w_ref) * t), 0.0)
    return c / np.linalg.norm(c)


def normalized_flow_spectral(m: TorusModel, a0: np.ndarray, t: float) -> np.ndarray:
    """State of the norm-preserving flow at time t, via heat flow plus
    renormalization; |result| = 1 by construction."""
    if t < 0:
        raise ValueError("flow time must be >= 0")
    a0 = m.check_dim(a0)
    _require_unit(a0)
    w, u = _denoised_coefficients(m, a0)
    basis = m.eigenbasis()
    return unvec(basis.vectors @ _normalized_coefficients(w, u, t), m.n)


def spectral_trace(
    m: TorusModel,
    a0: np.ndarray,
    times: np.ndarray,
    normalized: bool = True,
    store_states: bool = False,
) -> FlowTrace:
    """Evaluate the spectral solution on a time grid and record observables.

    The grid must start at 0 so the first observation matches the initial
    data.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0 or times[0] != 0.0:
        raise ValueError("time grid must start at t = 0")
    a0 = m.check_dim(a0)
    basis = m.eigenbasis()
    if normalized:
        _require_unit(a0)
        w, u = _denoised_coefficients(m, a0)
    else:
        w, u = spectral_coefficient_data(m, a0)

    observations = []
    states = [] if store_states else None
    for t in times:
        if normalized:
            c = _normalized_coefficients(w, u, float(t))
        else:
            c = u * np.exp(-w * float(t))
        a = unvec(basis.vectors @ c, m.n)
        observations.append(observe(m, float(t), a))
        if store_states is True:
            states.append(a)
    return FlowTrace(
        observations=observations,
        solver="spectral" if normalized else "heat",
        states=states,
    )


def _cumulative_trapezoid(f: np.ndarray, dt: float) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum((f[1:] + f[:-1]) * (dt / 2.0))])


def normalized_flow_picard(
    m: TorusModel,
    a0: np.ndarray,
    t_end: float,
    k_max: int = 50,
    tol: float = 1e-10,
    dt: float = 1e-3,
    store_states: bool = False,
) -> FlowTrace:
    """Solve the norm-preserving flow by the freeze-lambda iteration.

    Starting from lambda_0(t) = lambda(a0) constant, each round solves the
    linear equation with the previous lambda curve,

        a_{k+1}(t) = sum_i u_i(0) exp(-lambda_i t + int_0^t lambda_k ds) phi_i,

    with the integral by the trapezoid rule on a uniform grid of step ~dt,
    then recomputes lambda_{k+1}(t) from a_{k+1}.  Iteration stops when
    sup_t |a_{k+1} - a_k| <= tol or after k_max rounds; running out of
    rounds is reported in trace.info["converged"], not raised.

    info carries: iterations, converged, step_sups (per-round sup
    distances), oracle_sup (sup distance to the exact spectral solution).
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    a0 = m.check_dim(a0)
    _require_unit(a0)

    num = max(1, int(round(t_end / dt)))
    ts = np.linspace(0.0, t_end, num + 1)
    step = ts[1] - ts[0]

    w, u = _denoised_coefficients(m, a0)
    basis = m.eigenbasis()

    lam_prev = np.full(ts.shape, float(np.real(np.vdot(u, w * u) / np.vdot(u, u))))
    coeffs_prev = np.tile(u[:, None], (1, ts.size))
    step_sups: list[float] = []
    converged = False
    iterations = 0
    coeffs = coeffs_prev
    for _ in range(k_max):
        integral = _cumulative_trapezoid(lam_prev, step)
        exponent = -np.outer(w, ts) + integral[None, :]
        if exponent.max() > _EXP_LIMIT:
            raise OverflowError(
                "iteration exponent overflow; shorten t_end or use the "
                "spectral solver"
            )
        coeffs = u[:, None] * np.exp(exponent)
        iterations += 1
        dist = float(np.linalg.norm(coeffs - coeffs_prev, axis=0).max())
        step_sups.append(dist)
        mass = np.real(np.sum(np.conj(coeffs) * coeffs, axis=0))
        energy = np.real(np.sum(np.conj(coeffs) * (w[:, None] * coeffs), axis=0))
        lam_prev = energy / mass
        coeffs_prev = coeffs
        if dist <= tol:
            converged = True
            break

    oracle = np.stack(
        [_normalized_coefficients(w, u, float(t)) for t in ts], axis=1
    )
    oracle_sup = float(np.linalg.norm(coeffs - oracle, axis=0).max())

    observations = []
    states = [] if store_states else None
    for j, t in enumerate(ts):
        a = unvec(basis.vectors @ coeffs[:, j], m.n)
        observations.append(observe(m, float(t), a))
        if store_states is True:
            states.append(a)
    return FlowTrace(
        observations=observations,
        solver="picard",
        states=states,
        info={
            "iterations": iterations,
            "converged": converged,
            "step_sups": step_sups,
            "oracle_sup": oracle_sup,
            "dt": float(step),
        },
    )


def normalized_flow_rk4(
    m: TorusModel,
    a0: np.ndarray,
    dt: float,
    t_end: float,
    renormalize_each_step: bool = False,
    store_states: bool = False,
) -> FlowTrace:
    """Classical RK4 integration of a_t = -lap(a) + lambda(a) a.

    Observables are recorded at every step.  With renormalize_each_step the
    state is projected back to unit HS norm after each update; without it
    the drift of |a|^2 measures the integrator's conservation error.
    """
    if dt < 1e-12:
        raise ValueError("step size underflow (dt < 1e-12)")
    if not 0 < dt <= t_end:
        raise ValueError("require 0 < dt <= t_end")
    a0 = m.check_dim(a0)
    _require_unit(a0)

    l = m.superoperator()
    num = max(1, int(round(t_end / dt)))
    h = t_end / num

    def rhs(v: np.ndarray) -> np.ndarray:
        lam = np.real(np.vdot(v, l @ v) / np.vdot(v, v))
        return -(l @ v) + lam * v

    v = a0.reshape(-1, order="F").astype(complex)
    observations = [observe(m, 0.0, a0)]
    states = [np.array(a0)] if store_states else None
    for k in range(num):
        k1 = rhs(v)
        k2 = rhs(v + (h / 2.0) * k1)
        k3 = rhs(v + (h / 2.0) * k2)
        k4 = rhs(v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if renormalize_each_step:
            v = v / np.linalg.norm(v)
        a = unvec(v, m.n)
        observations.append(observe(m, (k + 1) * h, a))
        if store_states is True:
            states.append(a)
    return FlowTrace(
        observations=observations,
        solver="rk4",
        states=states,
        info={"dt": h, "renormalized": bool(renormalize_each_step)},
    )


def detect_convergence(trace: FlowTrace, basis, tol: float = 1e-8) -> ConvergenceReport:
    """Decide whether a trajectory has reached an eigen-matrix.

    Converged means: final eigen-residual <= tol and lambda stabilized (its
    spread over the last 10% of samples <= tol).  The limit value is matched
    to the nearest Laplacian eigenvalue; a degenerate match is reported as
    the full cluster index range.  For trace-free initial data the report
    also says whether lambda_inf clears the spectral gap.
    """
    obs = trace.observations
    if not obs:
        raise ValueError("cannot analyze an empty trace")
    lams = trace.lambdas()
    lam_inf = float(lams[-1])
    final_residual = float(obs[-1].residual)

    window = max(2, int(np.ceil(0.1 * len(obs))))
    tail = lams[-window:]
    stabilized = float(tail.max() - tail.min()) <= tol
    converged = final_residual <= tol and stabilized

    evals = basis.eigenvalues
    matched = int(np.argmin(np.abs(evals - lam_inf)))
    lo = matched
    while lo > 0 and abs(evals[lo - 1] - evals[matched]) < CLUSTER_GAP:
        lo -= 1
    hi = matched
    while hi + 1 < evals.shape[0] and abs(evals[hi + 1] - evals[matched]) < CLUSTER_GAP:
        hi += 1

    t_converged = None
    if converged:
        residuals = trace.residuals()
        ok_from = len(obs) - 1
        for j in range(len(obs) - 1, -1, -1):
            if residuals[j] <= tol:
                ok_from = j
            else:
                break
        t_converged = float(obs[ok_from].t)

    trace_free = abs(obs[0].trace) <= 1e-10
    gap_ok = None
    if trace_free:
        gap_ok = lam_inf >= basis.gap - tol
    return ConvergenceReport(
        converged=converged,
        lambda_inf=lam_inf,
        matched_index=matched,
        cluster=(lo, hi),
        final_residual=final_residual,
        t_converged=t_converged,
        trace_free_input=trace_free,
        gap_bound_ok=gap_ok,
    )

"""Christoffel symbols, lowered curvature and its covariant derivative.

Conventions (fixed here once):

* ``gamma[i, j, k] = Gamma^i_{jk}``;
* ``R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj} + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}``
  and ``R_{ijkl} = g_{im} R^m_{jkl}``, so the round unit sphere has
  ``R_{1212} = g_11 g_22 - g_12^2``;
* ``nabla_R[i, j, k, l, m] = R_{ijkl;m}``: the derivative index sits in
  the fifth slot.

Derivatives that have no closed form are central differences with step h.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import MetricChart
from .perm import op_apply, phi
from .report import NUMERIC_FAIL, NUMERIC_PASS, VerdictReport
from .symclass import is_in_class
from .tensor import FLOAT, DenseTensor, inf_norm

DEFAULT_STEP = 1e-3
DET_THRESHOLD = 1e-10


class DegenerateMetricError(ValueError):
    pass


class ChartDomainError(ValueError):
    pass


@dataclass(frozen=True)
class CurvatureBundle:
    point: np.ndarray
    gamma: np.ndarray
    R_lowered: DenseTensor
    nabla_R: DenseTensor
    step: float


def _check_point(chart: MetricChart, x, margin: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (chart.dim,):
        raise ChartDomainError(f"point has shape {x.shape}, chart dimension is {chart.dim}")
    if not chart.contains(x, margin):
        raise ChartDomainError(f"point {x.tolist()} is not inside the {chart.name} chart with margin {margin}")
    return x


def metric_at(chart: MetricChart, x) -> np.ndarray:
    g = np.asarray(chart.metric(np.asarray(x, dtype=float)), dtype=float)
    if abs(np.linalg.det(g)) < DET_THRESHOLD:
        raise DegenerateMetricError(f"metric of {chart.name} is degenerate at {np.asarray(x).tolist()}")
    return g


def _unit(n, m, h):
    e = np.zeros(n)
    e[m] = h
    return e


def christoffel_fd(chart: MetricChart, x, h: float = DEFAULT_STEP) -> np.ndarray:
    """Levi-Civita symbols from central differences of the metric."""
    x = np.asarray(x, dtype=float)
    n = chart.dim
    ginv = np.linalg.inv(metric_at(chart, x))
    # dg[l, k, m] = d_m g_lk
    dg = np.stack([(metric_at(chart, x + _unit(n, m, h)) - metric_at(chart, x - _unit(n, m, h))) / (2 * h)
                   for m in range(n)], axis=-1)
    # Gamma^i_jk = 1/2 g^il (d_j g_lk + d_k g_lj - d_l g_jk)
    A = np.einsum("lkj->ljk", dg) + np.einsum("ljk->ljk", dg) - np.einsum("jkl->ljk", dg)
    gamma = 0.5 * np.einsum("il,ljk->ijk", ginv, A)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def christoffel(chart: MetricChart, x, h: float = DEFAULT_STEP) -> np.ndarray:
    """Gamma^i_jk at x, closed form when the chart provides one."""
    x = _check_point(chart, x, 2 * h)
    metric_at(chart, x)
    if chart.christoffel is not None:
        gamma = np.asarray(chart.christoffel(x), dtype=float)
        return 0.5 * (gamma + gamma.transpose(0, 2, 1))
    return christoffel_fd(chart, x, h)


def _christoffel_deriv(chart: MetricChart, x, h: float) -> np.ndarray:
    # out[i, j, k, m] = d_m Gamma^i_jk
    if chart.christoffel_deriv is not None:
        return np.asarray(chart.christoffel_deriv(x), dtype=float)
    n = chart.dim
    return np.stack([(christoffel_fd(chart, x + _unit(n, m, h), h) - christoffel_fd(chart, x - _unit(n, m, h), h)) / (2 * h)
                     for m in range(n)], axis=-1)


def _riemann_array(chart: MetricChart, x, h: float) -> np.ndarray:
    g = metric_at(chart, x)
    gamma = chart.christoffel(x) if chart.christoffel is not None else christoffel_fd(chart, x, h)
    dgamma = _christoffel_deriv(chart, x, h)
    up = (np.einsum("iljk->ijkl", dgamma) - np.einsum("ikjl->ijkl", dgamma)
          + np.einsum("ikm,mlj->ijkl", gamma, gamma) - np.einsum("ilm,mkj->ijkl", gamma, gamma))
    return np.einsum("im,mjkl->ijkl", g, up)


def riemann_lowered(chart: MetricChart, x, h: float = DEFAULT_STEP) -> DenseTensor:
    x = _check_point(chart, x, 3 * h)
    R = _riemann_array(chart, x, h)
    return DenseTensor(chart.dim, 4, FLOAT, R)


def sectional_curvature(R: DenseTensor, g: np.ndarray, a: int = 0, b: int = 1) -> float:
    return float(R.data[a, b, a, b] / (g[a, a] * g[b, b] - g[a, b] ** 2))


def nabla_R(chart: MetricChart, x, h: float = DEFAULT_STEP) -> DenseTensor:
    """R_{ijkl;m}; the derivative of R is a central difference with step h."""
    x = _check_point(chart, x, 4 * h)
    n = chart.dim
    R = _riemann_array(chart, x, h)
    dR = np.stack([(_riemann_array(chart, x + _unit(n, m, h), h) - _riemann_array(chart, x - _unit(n, m, h), h)) / (2 * h)
                   for m in range(n)], axis=-1)
    G = christoffel(chart, x, h)
    out = (dR
           - np.einsum("pmi,pjkl->ijklm", G, R)
           - np.einsum("pmj,ipkl->ijklm", G, R)
           - np.einsum("pmk,ijpl->ijklm", G, R)
           - np.einsum("pml,ijkp->ijklm", G, R))
    return DenseTensor(n, 5, FLOAT, out)


def curvature_bundle(chart: MetricChart, x, h: float = DEFAULT_STEP) -> CurvatureBundle:
    x = _check_point(chart, x, 4 * h)
    return CurvatureBundle(x, christoffel(chart, x, h), riemann_lowered(chart, x, h), nabla_R(chart, x, h), h)


def riemann_symmetry_residuals(R: DenseTensor) -> dict:
    r = R.data
    return {
        "antisym12": float(np.max(np.abs(r + r.transpose(1, 0, 2, 3)))),
        "antisym34": float(np.max(np.abs(r + r.transpose(0, 1, 3, 2)))),
        "pair_swap": float(np.max(np.abs(r - r.transpose(2, 3, 0, 1)))),
        "bianchi": float(np.max(np.abs(r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3)))),
    }


def residual_scale(R: DenseTensor) -> float:
    """Magnitude used to scale finite-difference tolerances."""
    return max(1.0, inf_norm(R))


def fd_floor(R: DenseTensor, h: float) -> float:
    return 10 * h * h * residual_scale(R)


def local_symmetry_report(chart: MetricChart, points, h: float = DEFAULT_STEP, tol: float = 1e-6) -> VerdictReport:
    """Per-point norms of nabla R, its class residuals and Phi(nabla R)."""
    phi_op = phi()
    per_point = []
    symmetric = True
    worst_floor = 0.0
    for x in points:
        b = curvature_bundle(chart, x, h)
        norm = inf_norm(b.nabla_R)
        symmetric &= norm <= tol
        worst_floor = max(worst_floor, fd_floor(b.R_lowered, h))
        per_point.append({
            "point": [float(v) for v in b.point],
            "nabla_R_norm": norm,
            "R_norm": inf_norm(b.R_lowered),
            "class_residuals": {k: float(v) for k, v in is_in_class(b.nabla_R).items()},
            "phi_nabla_R_norm": inf_norm(op_apply(phi_op, b.nabla_R)),
        })
    derived = {
        "metric": chart.name,
        "params": chart.params,
        "dim": chart.dim,
        "signature": list(chart.signature),
        "step": h,
        "points": per_point,
        "verdict": "locally symmetric within tol" if symmetric else "not locally symmetric",
        "locally_symmetric": symmetric,
        "fd_error_floor": worst_floor,
    }
    if chart.expected_symmetric is not None:
        derived["expected_symmetric"] = chart.expected_symmetric
    status = NUMERIC_PASS if symmetric else NUMERIC_FAIL
    return VerdictReport("local_symmetry", chart.dim, status, None, derived, tol=tol)


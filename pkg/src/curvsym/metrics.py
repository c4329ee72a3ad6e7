"""Coordinate charts for the built-in test metrics.

Every built-in is diagonal, ``g = diag(d_0(x), ..., d_{n-1}(x))``, with the
first and second derivatives of the ``d_i`` in closed form.  That gives
closed-form Christoffel symbols and their derivatives, so the only finite
difference left in the covariant derivative of curvature is the one for the
derivative of R itself.

Charts
------
sphere(a)
    Hyperspherical angles: ``d_0 = a^2``, ``d_i = a^2 prod_{j<i} sin^2 x_j``.
    Polar angles are kept near the equator (see ANGLE_BOX); sectional
    curvature 1/a^2.
hyperbolic(a)
    Upper half space with height ``y = x_{n-1}``: ``d_i = a^2 / y^2``.
    Sectional curvature -1/a^2.
product-sphere-line(a)
    The sphere chart on the first n-1 coordinates times a line.
perturbed-flat(eps)
    ``d_i = 1 + eps * x_0^2``; not locally symmetric for eps != 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class UnknownMetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricChart:
    name: str
    dim: int
    signature: tuple
    metric: Callable[[np.ndarray], np.ndarray]
    lower: np.ndarray
    upper: np.ndarray
    params: dict = field(default_factory=dict)
    # closed forms; None means "use finite differences"
    christoffel: Optional[Callable[[np.ndarray], np.ndarray]] = None
    christoffel_deriv: Optional[Callable[[np.ndarray], np.ndarray]] = None
    expected_symmetric: Optional[bool] = None

    def contains(self, x, margin: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x - margin >= self.lower) and np.all(x + margin <= self.upper))

    def sample_points(self, count: int, rng: np.random.Generator, margin: float = 0.05) -> list[np.ndarray]:
        span = self.upper - self.lower
        lo = self.lower + margin * span
        hi = self.upper - margin * span
        return [lo + (hi - lo) * rng.random(self.dim) for _ in range(count)]


def diagonal_chart(name, n, diag, grad, hess, lower, upper, params, expected_symmetric, signature=None) -> MetricChart:
    """Chart for ``g = diag(diag(x))``.

    ``grad(x)[i, k] = d/dx_k diag_i`` and ``hess(x)[i, k, l]`` the second
    derivatives.
    """

    def metric(x):
        return np.diag(diag(np.asarray(x, dtype=float)))

    def gamma_parts(x):
        d = diag(x)
        G = grad(x)
        eye = np.eye(n)
        # A[i,j,k] = d_j g_ik + d_k g_ij - d_i g_jk for diagonal g
        A = (np.einsum("ik,ij->ijk", eye, G) + np.einsum("ij,ik->ijk", eye, G)
             - np.einsum("jk,ji->ijk", eye, G))
        return d, G, A

    def christoffel(x):
        x = np.asarray(x, dtype=float)
        d, _, A = gamma_parts(x)
        return A / (2.0 * d[:, None, None])

    def christoffel_deriv(x):
        # out[i,j,k,m] = d/dx_m Gamma^i_jk
        x = np.asarray(x, dtype=float)
        d, G, A = gamma_parts(x)
        H = hess(x)
        eye = np.eye(n)
        dA = (np.einsum("ik,ijm->ijkm", eye, H) + np.einsum("ij,ikm->ijkm", eye, H)
              - np.einsum("jk,jim->ijkm", eye, H))
        return dA / (2.0 * d[:, None, None, None]) - A[..., None] * G[:, None, None, :] / (2.0 * d[:, None, None, None] ** 2)

    if signature is None:
        signature = tuple(int(s) for s in np.sign(diag(0.5 * (np.asarray(lower) + np.asarray(upper)))))
    return MetricChart(
        name=name,
        dim=n,
        signature=signature,
        metric=metric,
        lower=np.asarray(lower, dtype=float),
        upper=np.asarray(upper, dtype=float),
        params=dict(params),
        christoffel=christoffel,
        christoffel_deriv=christoffel_deriv,
        expected_symmetric=expected_symmetric,
    )


def _constant(name, n, values, params):
    values = np.asarray(values, dtype=float)
    return diagonal_chart(
        name, n,
        lambda x: values.copy(),
        lambda x: np.zeros((n, n)),
        lambda x: np.zeros((n, n, n)),
        [-1.0] * n, [1.0] * n, params, True,
    )


def _sphere_parts(a, m):
    """Diagonal, gradient and Hessian of the round sphere metric on m angles."""

    def diag(x):
        d = np.empty(m)
        acc = a * a
        for i in range(m):
            d[i] = acc
            acc *= np.sin(x[i]) ** 2
        return d

    def grad(x):
        d = diag(x)
        cot = np.cos(x[: m - 1]) / np.sin(x[: m - 1])
        G = np.zeros((m, m))
        for i in range(m):
            for k in range(i):
                G[i, k] = 2.0 * cot[k] * d[i]
        return G

    def hess(x):
        d = diag(x)
        cot = np.cos(x[: m - 1]) / np.sin(x[: m - 1])
        csc2 = 1.0 / np.sin(x[: m - 1]) ** 2
        H = np.zeros((m, m, m))
        for i in range(m):
            for k in range(i):
                for l in range(i):
                    if k == l:
                        H[i, k, l] = d[i] * (4.0 * cot[k] ** 2 - 2.0 * csc2[k])
                    else:
                        H[i, k, l] = 4.0 * d[i] * cot[k] * cot[l]
        return H

    return diag, grad, hess


# Polar angles stay within 0.1 of the equator: the central-difference error
# of d R is about h^2/6 * d^3(sin^4), which is at most ~9 elsewhere but
# vanishes at pi/2; this keeps |nabla R| below 1e-6 at h = 1e-3.
ANGLE_BOX = (np.pi / 2 - 0.1, np.pi / 2 + 0.1)


def sphere(n, radius=1.0):
    diag, grad, hess = _sphere_parts(radius, n)
    lower = [ANGLE_BOX[0]] * (n - 1) + [-3.0]
    upper = [ANGLE_BOX[1]] * (n - 1) + [3.0]
    return diagonal_chart("sphere", n, diag, grad, hess, lower, upper, {"radius": radius}, True)


def product_sphere_line(n, radius=1.0):
    if n < 2:
        raise ValueError("product-sphere-line needs n >= 2")
    m = n - 1
    sdiag, sgrad, shess = _sphere_parts(radius, m)

    def diag(x):
        return np.append(sdiag(x[:m]), 1.0)

    def grad(x):
        G = np.zeros((n, n))
        G[:m, :m] = sgrad(x[:m])
        return G

    def hess(x):
        H = np.zeros((n, n, n))
        H[:m, :m, :m] = shess(x[:m])
        return H

    lower = [ANGLE_BOX[0]] * (m - 1) + [-3.0, -2.0]
    upper = [ANGLE_BOX[1]] * (m - 1) + [3.0, 2.0]
    return diagonal_chart("product-sphere-line", n, diag, grad, hess, lower, upper, {"radius": radius}, True)


HALF_SPACE_HEIGHT = (2.0, 4.0)


def hyperbolic(n, radius=1.0):
    a2 = radius * radius

    def diag(x):
        return np.full(n, a2 / x[-1] ** 2)

    def grad(x):
        G = np.zeros((n, n))
        G[:, -1] = -2.0 * a2 / x[-1] ** 3
        return G

    def hess(x):
        H = np.zeros((n, n, n))
        H[:, -1, -1] = 6.0 * a2 / x[-1] ** 4
        return H

    lower = [-1.0] * (n - 1) + [HALF_SPACE_HEIGHT[0]]
    upper = [1.0] * (n - 1) + [HALF_SPACE_HEIGHT[1]]
    return diagonal_chart("hyperbolic", n, diag, grad, hess, lower, upper, {"radius": radius}, True)


def perturbed_flat(n, eps=0.1):
    def diag(x):
        return np.full(n, 1.0 + eps * x[0] ** 2)

    def grad(x):
        G = np.zeros((n, n))
        G[:, 0] = 2.0 * eps * x[0]
        return G

    def hess(x):
        H = np.zeros((n, n, n))
        H[:, 0, 0] = 2.0 * eps
        return H

    return diagonal_chart("perturbed-flat", n, diag, grad, hess, [-1.0] * n, [1.0] * n, {"eps": eps}, eps == 0)


def general_chart(name, n, metric, lower, upper, signature, params=None, expected_symmetric=None) -> MetricChart:
    """Chart with only the metric known; all derivatives by finite differences."""
    return MetricChart(name, n, tuple(signature), metric, np.asarray(lower, float), np.asarray(upper, float),
                       dict(params or {}), expected_symmetric=expected_symmetric)


BUILTINS = ("flat-euclidean", "flat-minkowski", "sphere", "hyperbolic", "product-sphere-line", "perturbed-flat")


def builtin_metric(name: str, n: int = 3, **params) -> MetricChart:
    if not 2 <= n <= 6:
        raise ValueError(f"curvature lab supports 2 <= n <= 6, got {n}")
    if name == "flat-euclidean":
        return _constant(name, n, [1.0] * n, params)
    if name == "flat-minkowski":
        return _constant(name, n, [-1.0] + [1.0] * (n - 1), params)
    if name in ("sphere", "hyperbolic", "product-sphere-line"):
        radius = float(params.get("radius", 1.0))
        if not radius > 0:
            raise ValueError(f"radius must be positive, got {radius}")
        if name == "product-sphere-line" and n < 3:
            raise ValueError("product-sphere-line needs n >= 3")
        return {"sphere": sphere, "hyperbolic": hyperbolic, "product-sphere-line": product_sphere_line}[name](n, radius)
    if name == "perturbed-flat":
        return perturbed_flat(n, float(params.get("eps", 0.1)))
    raise UnknownMetricError(f"unknown metric {name!r}; choose from {', '.join(BUILTINS)}")

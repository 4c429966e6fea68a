"""Oscillatory quadrature helpers.

Two workhorses: a node-doubling composite Gauss-Legendre rule for finite
oscillatory integrals, and a steepest-descent contour rotation for tails of
the form  int_rho0^inf h(rho) exp(i (c2 rho^2 + a rho)) drho.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def gl_nodes(npts: int):
    return np.polynomial.legendre.leggauss(npts)


def composite_gl(f, a: float, b: float, npanels: int, nodes: int = 32):
    """Composite Gauss-Legendre; f must accept an ndarray."""
    x, w = gl_nodes(nodes)
    edges = np.linspace(a, b, npanels + 1)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return np.sum(wts * f(pts))


def osc_integral(f, a: float, b: float, phase_span: float, tol: float = 1e-9,
                 max_points: int = 600_000):
    """Integrate f over [a, b] where f oscillates with total phase variation
    phase_span.  Node count doubles until two successive composite rules agree.

    Returns (value, error_estimate).
    """
    if b <= a:
        return 0.0 + 0.0j, 0.0
    cycles = max(phase_span / (2.0 * math.pi), 1.0)
    npanels = max(2, int(math.ceil(cycles / 3.0)))
    prev = composite_gl(f, a, b, npanels)
    err = math.inf
    scale = max(abs(prev), 1e-300)
    while 2 * npanels * 32 <= max_points:
        npanels *= 2
        cur = composite_gl(f, a, b, npanels)
        err = abs(cur - prev)
        prev = cur
        scale = max(abs(cur), scale)
        if err <= tol * max(1.0, scale):
            break
    return prev, err


def rotated_tail(h, rho0: float, a: float, c2: float = 1.0, tol: float = 1e-9,
                 nodes: int = 96):
    """int_rho0^inf h(rho) e^{i(c2 rho^2 + a rho)} drho by rotating onto the
    ray rho = rho0 + tau e^{i pi/4}.

    h must accept complex ndarray input and be analytic (and at most
    polynomially growing) in the closed sector swept by the rotation.  If the
    stationary point -a/(2 c2) lies beyond rho0, the real-axis segment up to
    it is integrated first.

    Returns (value, error_estimate).
    """
    if c2 <= 0:
        raise ValueError("need c2 > 0")
    extra = 0.0 + 0.0j
    extra_err = 0.0
    if a < -2.0 * c2 * rho0:
        rho1 = -a / (2.0 * c2) + 1.0
        span = abs(c2 * (rho1 ** 2 - rho0 ** 2) + a * (rho1 - rho0)) + 2.0

        def real_seg(rho):
            return h(rho.astype(complex)) * np.exp(1j * (c2 * rho * rho + a * rho))

        extra, extra_err = osc_integral(real_seg, rho0, rho1, span, tol)
        rho0 = rho1

    c = (2.0 * c2 * rho0 + a) / math.sqrt(2.0)   # linear decay rate along ray
    # tau* solves c2 tau^2 + c tau = 45 (integrand ~ e^{-45} at the far end)
    tau_star = (-c + math.sqrt(c * c + 180.0 * c2)) / (2.0 * c2)
    rot = cmath.exp(1j * math.pi / 4.0)
    phi0 = 1j * (c2 * rho0 * rho0 + a * rho0)
    lin = (2.0 * c2 * rho0 + a) * complex(-1.0, 1.0) / math.sqrt(2.0)

    def integrand(tau):
        rho = rho0 + tau * rot
        return h(rho) * np.exp(phi0 + lin * tau - c2 * tau * tau)

    x, w = gl_nodes(nodes)
    edges = np.array([0.0, 0.15, 0.5, 1.0]) * tau_star
    total = 0.0 + 0.0j
    check = 0.0 + 0.0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        total += np.sum(half * w * integrand(mid + half * x))
        x2, w2 = gl_nodes(nodes // 2)
        check += np.sum(half * w2 * integrand(mid + half * x2))
    err = abs(total - check)
    return rot * total + extra, err + extra_err

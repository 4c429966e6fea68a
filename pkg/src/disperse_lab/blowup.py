"""Self-similar focusing for the quadratically chirped power datum.

The datum  phi(x) = e^{-i|x|^2/4} 1_{|x|>=1} |x|^{-sigma}  focuses at t = 1:
near the focusing time the solution concentrates on an annulus of radius
~ k_t, with modulus ~ k_t^{sigma-n} and a universal limit profile V(z).
The resulting L^q growth rates rule out space-time (Strichartz) estimates
with data measured in L^r for every r > 2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from . import special
from .decay import DecayFit, _envelope_fit
from .propagator import ComplexAmplitude, EvalPoint, _prefactor
from .quadrature import gl_nodes, osc_integral, rotated_tail

INF = math.inf


@dataclass(frozen=True)
class ChirpDatum:
    n: int
    sigma: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("dimension must be an integer >= 2")
        lo = (self.n - 3) / 2.0
        if not (lo < self.sigma < self.n):
            raise ValueError(
                f"need (n-3)/2 = {lo} < sigma < n = {self.n}, got {self.sigma}")


def k_of_t(t: float) -> float:
    """Focusing scale k_t = sqrt(1/(4t) - 1/4), positive for 0 < t < 1."""
    if not (0.0 < t < 1.0):
        raise ValueError("k_t defined for 0 < t < 1")
    return math.sqrt(1.0 / (4.0 * t) - 0.25)


@dataclass(frozen=True)
class SelfSimilarFrame:
    t: float

    def __post_init__(self):
        k_of_t(self.t)   # validates the range

    @property
    def k(self) -> float:
        return k_of_t(self.t)

    def x_of_z(self, z):
        return 2.0 * self.t * self.k * np.asarray(z, dtype=float)


def _bessel_split_integral(n: int, sigma: float, c: float, quad: float,
                           r_lo: float, tol: float = 1e-9, K: int = 8
                           ) -> Tuple[complex, float]:
    """int_{r_lo}^infty r^{n/2-sigma} J_{(n-2)/2}(c r) e^{i quad r^2} dr.

    Head by phase-resolved panels; beyond r0 (where c*r >= 10) the Bessel
    factor is replaced by its oscillatory splitting and each piece is pushed
    onto a steepest-descent ray.  quad may be negative (defocusing side);
    quad = 0 is rejected.
    """
    if quad == 0.0:
        raise ValueError("quadratic phase must be nonzero")
    nu = special.order_from_dim(n)
    coeffs = special.alpha_coeffs(n, K)
    aq = abs(quad)
    conj = quad < 0.0

    # start the rotated tails beyond the splitting region (c*r >= 10) and the
    # stationary point r = c/(2|quad|) of the defocusing-phase piece
    r0 = max(r_lo, 10.0 / c, c / (2.0 * aq) + 1.0)

    def head_f(r):
        return (r ** (n / 2.0 - sigma) * special.bessel_j(nu, c * r)
                * np.exp(1j * quad * r * r))

    span = aq * (r0 * r0 - r_lo * r_lo) + c * (r0 - r_lo) + 2.0
    head, e_head = osc_integral(head_f, r_lo, r0, span, tol)

    cn = c ** (-n / 2.0)

    # z^{n/2} J_nu(z) = A_n + e^{iz} B_n + e^{-iz} conj(B_n), so the tail
    # pieces carry the bare envelope r^{-sigma} times c^{-n/2} B_n(c r)
    def h2(r):
        return cn * r ** (-sigma) * special.splitting_B_series(coeffs, c * r)

    def h3(r):
        return cn * r ** (-sigma) * special.splitting_B_series_conj(coeffs, c * r)

    if not conj:
        t2, e2 = rotated_tail(h2, r0, c, c2=aq, tol=tol)
        t3, e3 = rotated_tail(h3, r0, -c, c2=aq, tol=tol)
    else:
        # int h e^{-i(aq r^2 -+ c r)} = conj(int conj(h) e^{i(aq r^2 +- c r)})
        u2, e2 = rotated_tail(lambda r: np.conj(h3(np.conj(r))), r0, -c, c2=aq, tol=tol)
        u3, e3 = rotated_tail(lambda r: np.conj(h2(np.conj(r))), r0, c, c2=aq, tol=tol)
        t2, t3 = np.conj(u2), np.conj(u3)

    zmin = c * r0
    trunc_coef = abs(special._hankel_symbol_float(nu, K + 1)) / 2.0 ** (K + 1) / special.SQRT_2PI
    trunc = 2.0 * cn * r0 ** (-sigma) * trunc_coef * zmin ** ((n - 1) / 2.0 - K - 1)
    return head + t2 + t3, e_head + e2 + e3 + trunc


def chirp_solution(datum: ChirpDatum, t: float, x_abs: float,
                   tol: float = 1e-9) -> ComplexAmplitude:
    """psi(x, t) for the chirped datum, valid for 0 < t < 1 and t > 1."""
    if t <= 0 or t == 1.0:
        raise ValueError("need t > 0, t != 1 (the phase degenerates at t = 1)")
    n = datum.n
    quad = 1.0 / (4.0 * t) - 0.25          # = k_t^2 for t < 1, negative for t > 1
    c = x_abs / (2.0 * t)
    val, err = _bessel_split_integral(n, datum.sigma, c, quad, 1.0, tol=tol)
    pref = _prefactor(EvalPoint(n, x_abs, t)) / (2.0 * math.sqrt(t))
    return ComplexAmplitude(pref * val, abs(pref) * err)


# ---------------------------------------------------------------------------
# the limit profile and the rescaled collapse
# ---------------------------------------------------------------------------

@dataclass
class LimitProfile:
    datum: ChirpDatum
    z: np.ndarray
    v: np.ndarray              # V(z) samples
    err: np.ndarray


def limit_profile(datum: ChirpDatum, z_grid: Sequence[float],
                  tol: float = 1e-9) -> LimitProfile:
    """V(z) = (2z)^{(2-n)/2} |int_0^infty J_{(n-2)/2}(sz) s^{n/2-sigma} e^{is^2} ds|."""
    n = datum.n
    z_grid = np.asarray(z_grid, dtype=float)
    vals = np.empty_like(z_grid)
    errs = np.empty_like(z_grid)
    for i, z in enumerate(z_grid):
        if z <= 0:
            raise ValueError("z grid must be positive")
        val, err = _bessel_split_integral(n, datum.sigma, z, 1.0, 0.0, tol=tol)
        vals[i] = (2.0 * z) ** ((2 - n) / 2.0) * abs(val)
        errs[i] = (2.0 * z) ** ((2 - n) / 2.0) * err
    if np.max(vals) <= 0.0:
        # one retry on a wider grid before reporting failure
        wide = np.geomspace(z_grid[0] / 10.0, z_grid[-1] * 10.0, 4 * z_grid.size)
        prof = limit_profile(datum, wide, tol)
        if np.max(prof.v) <= 0.0:
            raise RuntimeError("limit profile numerically zero on widened grid")
        return prof
    return LimitProfile(datum=datum, z=z_grid, v=vals, err=errs)


def rescaled_modulus(datum: ChirpDatum, t: float, z_grid) -> np.ndarray:
    """2 |psi(2 t k_t z, t)| k_t^{n-sigma}; collapses onto V(z) as t -> 1-."""
    frame = SelfSimilarFrame(t)
    xs = frame.x_of_z(z_grid)
    out = np.empty(len(xs))
    for i, x in enumerate(xs):
        out[i] = 2.0 * abs(chirp_solution(datum, t, x).value) * frame.k ** (datum.n - datum.sigma)
    return out


def select_annulus(profile: LimitProfile, frac: float = 0.5) -> Tuple[float, float]:
    """Widest window [R1, R2] of the sampled grid with V >= frac * max V."""
    thresh = frac * float(np.max(profile.v))
    best = None
    i = 0
    v = profile.v
    while i < len(v):
        if v[i] >= thresh:
            j = i
            while j + 1 < len(v) and v[j + 1] >= thresh:
                j += 1
            if best is None or profile.z[j] - profile.z[i] > best[1] - best[0]:
                best = (float(profile.z[i]), float(profile.z[j]))
            i = j + 1
        else:
            i += 1
    if best is None or best[0] == best[1]:
        raise RuntimeError("no annulus with V above the threshold")
    return best


# ---------------------------------------------------------------------------
# L^q growth on the focusing annulus
# ---------------------------------------------------------------------------

def annulus_lq(datum: ChirpDatum, t: float, q: float, r1: float, r2: float,
               npanels: int = 8, nodes: int = 16) -> float:
    """(int over R1 k_t <= ... annulus |psi|^q dx)^{1/q}, radial part only
    (the constant angular measure drops out of growth-exponent fits)."""
    frame = SelfSimilarFrame(t)
    x, w = gl_nodes(nodes)
    edges = np.linspace(r1, r2, npanels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        for xi, wi in zip(x, w):
            z = mid + half * xi
            xx = float(frame.x_of_z(z))
            a = abs(chirp_solution(datum, t, xx).value)
            total += half * wi * a ** q * xx ** (datum.n - 1) * 2.0 * t * frame.k
    return total ** (1.0 / q)


def lq_annulus_growth(datum: ChirpDatum, q: float,
                      t_grid: Optional[Sequence[float]] = None,
                      annulus: Optional[Tuple[float, float]] = None) -> DecayFit:
    """Fit of the annulus L^q norm against 1 - t = 4 t k_t^2 (exact identity).

    In the blow-up regime q > n/(n-sigma) the fitted exponent matches
    (n + (sigma-n) q) / (2q) (negative = growth as t -> 1).  Below the
    threshold the norm stays bounded and the fit reports exponent ~ 0.
    """
    n, sigma = datum.n, datum.sigma
    if t_grid is None:
        u = np.geomspace(1e-4, 0.1, 10)
        t_grid = 1.0 - u
    t_grid = np.asarray(sorted(t_grid))
    if annulus is None:
        prof = limit_profile(datum, np.geomspace(0.05, 20.0, 120), tol=1e-7)
        annulus = select_annulus(prof)
    r1, r2 = annulus
    us = 4.0 * t_grid * np.array([k_of_t(t) ** 2 for t in t_grid])   # = 1 - t
    vals = np.array([annulus_lq(datum, t, q, r1, r2) for t in t_grid])
    order = np.argsort(us)
    return _envelope_fit("time", us[order], vals[order])


def lq_growth_exponent(datum: ChirpDatum, q: float) -> float:
    """Closed-form exponent (n + (sigma-n) q) / (2 q)."""
    return (datum.n + (datum.sigma - datum.n) * q) / (2.0 * q)


def lq_blowup_threshold(datum: ChirpDatum) -> float:
    """Blow-up occurs in L^q exactly for q > n/(n - sigma)."""
    return datum.n / (datum.n - datum.sigma)


def lr_membership(datum: ChirpDatum, r: float) -> Tuple[bool, float]:
    """Whether the datum lies in L^r, by radial quadrature with the exact
    power-law tail: finite iff sigma > n/r; value is the radial integral
    int_1^infty r^{n-1-sigma r} dr (angular factor dropped)."""
    if not (r > 0):
        raise ValueError("need r > 0")
    p = datum.n - 1 - datum.sigma * r
    body = float(np.trapezoid(np.linspace(1.0, 8.0, 2001) ** p,
                              np.linspace(1.0, 8.0, 2001)))
    if p >= -1.0:
        return False, INF
    tail = -(8.0 ** (p + 1)) / (p + 1)
    return True, body + tail


# ---------------------------------------------------------------------------
# Strichartz admissibility gate
# ---------------------------------------------------------------------------

@dataclass
class AdmissibilityVerdict:
    n: int
    p: float
    q: float
    r: float
    permitted: bool
    binding: str               # constraint that decided the verdict
    p_bound: float             # gate bound on p (inf = no finite bound)
    scaling_ok: bool


def _pos(x: float) -> float:
    return x if x > 0 else 0.0


def gate_p_bound(n: int, q: float, r: float) -> float:
    """max{ 2qr / (n((r-1)q - r)_+), 4q / (((n+3)q - 2n)_+) } with the
    convention value/0_+ = +inf (that term imposes no finite bound on p);
    q = inf and r = inf are handled as limits."""
    # first term 2qr / (n((r-1)q - r)_+)
    if math.isinf(q) and math.isinf(r):
        t1 = 2.0 / n
    elif math.isinf(q):
        t1 = INF if r <= 1.0 else 2.0 * r / (n * (r - 1.0))
    elif math.isinf(r):
        t1 = INF if q <= 1.0 else 2.0 * q / (n * (q - 1.0))
    else:
        d1 = _pos((r - 1.0) * q - r)
        t1 = INF if d1 == 0.0 else 2.0 * q * r / (n * d1)
    # second term 4q / (((n+3)q - 2n)_+)
    if math.isinf(q):
        t2 = 4.0 / (n + 3.0)
    else:
        d2 = _pos((n + 3.0) * q - 2.0 * n)
        t2 = INF if d2 == 0.0 else 4.0 * q / d2
    return max(t1, t2)


def scaling_ok(n: int, p: float, q: float, r: float, tol: float = 1e-9) -> bool:
    """2/p + n/q = n/r with 1/inf = 0."""
    inv = lambda v: 0.0 if math.isinf(v) else 1.0 / v
    return abs(2.0 * inv(p) + n * inv(q) - n * inv(r)) <= tol


def strichartz_gate(n: int, p: float, q: float, r: float) -> AdmissibilityVerdict:
    """Admissibility verdict for || . ||_{L^p_t L^q_x} <= C ||phi||_{L^r}.

    r <= 2: the classical conditions apply (p, q >= 2, scaling, the excluded
    endpoint (p,q,n) = (2,inf,2)).  r > 2: the focusing example forces
    p <= gate_p_bound(n, q, r); combined with scaling no pair survives.
    """
    for e, name in ((p, "p"), (q, "q"), (r, "r")):
        if not (1.0 <= e):
            raise ValueError(f"exponent {name} must be >= 1 (inf allowed)")
    s_ok = scaling_ok(n, p, q, r)
    bound = gate_p_bound(n, q, r)
    if not s_ok:
        return AdmissibilityVerdict(n, p, q, r, False, "scaling", bound, False)
    if r <= 2.0:
        if p < 2.0 or q < 2.0:
            return AdmissibilityVerdict(n, p, q, r, False, "p,q >= 2", bound, True)
        if p == 2.0 and math.isinf(q) and n == 2:
            return AdmissibilityVerdict(n, p, q, r, False,
                                        "endpoint (2,inf,2) excluded", bound, True)
        return AdmissibilityVerdict(n, p, q, r, True, "classical admissible",
                                    bound, True)
    if p > bound:
        return AdmissibilityVerdict(n, p, q, r, False, "focusing p-bound",
                                    bound, True)
    return AdmissibilityVerdict(n, p, q, r, True, "gate satisfied", bound, True)


def scaling_p(n: int, q: float, r: float) -> float:
    """p solving 2/p + n/q = n/r; inf when 1/p = 0, nan when no p >= 1 exists."""
    inv = (0.0 if math.isinf(r) else 1.0 / r) - (0.0 if math.isinf(q) else 1.0 / q)
    ip = 0.5 * n * inv
    if ip == 0.0:
        return INF
    if ip < 0.0 or ip > 1.0:
        return math.nan
    return 1.0 / ip


def forbidden_for_all_p(n: int, r: float, q_grid: Sequence[float]) -> bool:
    """True when every scaling-compatible (p, q) with q in q_grid is forbidden."""
    any_pair = False
    for q in q_grid:
        p = scaling_p(n, q, r)
        if math.isnan(p):
            continue
        any_pair = True
        if strichartz_gate(n, p, q, r).permitted:
            return False
    return any_pair

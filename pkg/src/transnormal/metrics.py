"""Closed-form metrics on R x (surface chart) and numerical certificates for
their foils {t} x S: principal curvatures, deck isometries, normal geodesics.

Chart coordinates are ``p = (t, x, y)``.  Every chart supplies ``metric(p)``
(3x3) and ``partials(p)`` with ``partials(p)[k, i, j] = d g_ij / d p_k``.

Sign convention: unit normal ``n = d_t / sqrt(g_tt)`` and second fundamental
form ``h_ab = -(1 / (2 sqrt(g_tt))) d_t g_ab``; the shape operator is
``g^{ab} h_bc``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .lattice import IntMat2, anosov_eigen

DEFAULT_GRID = 17
DEFAULT_T_SAMPLES = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_TOL = 1e-6


class NotPositiveDefinite(ValueError):
    pass


class GeodesicStepError(RuntimeError):
    pass


# -- chart maps -----------------------------------------------------------------


@dataclass(frozen=True)
class ChartMap:
    """(t, x, y) -> (sign*t + shift, L (x, y) + offset)."""

    shift: float
    linear: tuple = ((1.0, 0.0), (0.0, 1.0))
    offset: tuple = (0.0, 0.0)
    reflect: bool = False

    @property
    def L(self) -> np.ndarray:
        return np.array(self.linear, dtype=float)

    def jacobian(self) -> np.ndarray:
        j = np.zeros((3, 3))
        j[0, 0] = -1.0 if self.reflect else 1.0
        j[1:, 1:] = self.L
        return j

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        t = -p[0] if self.reflect else p[0]
        xy = self.L @ p[1:] + np.asarray(self.offset, dtype=float)
        return np.array([t + self.shift, xy[0], xy[1]])

    def foil_part(self, xy) -> np.ndarray:
        return self.L @ np.asarray(xy, dtype=float) + np.asarray(self.offset, dtype=float)

    def then(self, other: "ChartMap") -> "ChartMap":
        """``other o self``."""
        s1 = -1.0 if self.reflect else 1.0
        s2 = -1.0 if other.reflect else 1.0
        lin = other.L @ self.L
        off = other.L @ np.asarray(self.offset) + np.asarray(other.offset)
        return ChartMap(
            s2 * self.shift + other.shift,
            tuple(map(tuple, lin)),
            tuple(off),
            reflect=(s1 * s2) < 0,
        )


def integer_chart_map(m: IntMat2, shift: float = 1.0) -> ChartMap:
    """Foil translation ``(t, v) -> (t + shift, m v)`` for an integer matrix."""
    return ChartMap(shift, ((m.a, m.b), (m.c, m.d)))


# -- metric families -----------------------------------------------------------


class MetricChart:
    name = "chart"
    period = 1.0
    deck: ChartMap = ChartMap(1.0)

    def metric(self, p) -> np.ndarray:
        raise NotImplementedError

    def partials(self, p) -> np.ndarray:
        raise NotImplementedError


class NilChart(MetricChart):
    """dt^2 + dx^2 + (dy - t dx)^2 with deck map (t, x, y) -> (t+1, x, x+y)."""

    name = "nil"
    deck = ChartMap(1.0, ((1.0, 0.0), (1.0, 1.0)))

    def metric(self, p):
        t = p[0]
        return np.array([[1.0, 0, 0], [0, 1 + t * t, -t], [0, -t, 1.0]])

    def partials(self, p):
        t = p[0]
        d = np.zeros((3, 3, 3))
        d[0, 1:, 1:] = [[2 * t, -1.0], [-1.0, 0.0]]
        return d


class SolChart(MetricChart):
    """ln^2(lam) dt^2 + lam^(-2t) (w1.dv)^2 + lam^(2t) (w2.dv)^2.

    ``w1``, ``w2`` are the coordinate covectors of the eigen-frame.  When the
    chart is built from an Anosov matrix ``A`` they are its expanding and
    contracting eigenvectors and the deck map is ``v -> A^T v``, i.e. the row
    action ``(x, y) -> (x, y) A``.
    """

    name = "sol"

    def __init__(self, lam: float, frame=((1.0, 0.0), (0.0, 1.0)), deck: Optional[ChartMap] = None):
        if not lam > 1:
            raise ValueError("Sol chart needs lambda > 1")
        self.lam = float(lam)
        self.log = math.log(self.lam)
        self.w = np.array(frame, dtype=float)
        self.deck = deck or ChartMap(1.0, ((self.lam, 0.0), (0.0, 1.0 / self.lam)))

    @classmethod
    def from_matrix(cls, m: IntMat2) -> "SolChart":
        eig = anosov_eigen(m)
        w1 = [float(c) for c in eig.v1]
        w2 = [float(c) for c in eig.v2]
        return cls(eig.lam, (w1, w2), ChartMap(1.0, ((m.a, m.c), (m.b, m.d))))

    def _block(self, t, deriv: bool):
        w1, w2 = self.w
        e1, e2 = self.lam ** (-2 * t), self.lam ** (2 * t)
        if deriv:
            e1, e2 = -2 * self.log * e1, 2 * self.log * e2
        return e1 * np.outer(w1, w1) + e2 * np.outer(w2, w2)

    def metric(self, p):
        g = np.zeros((3, 3))
        g[0, 0] = self.log ** 2
        g[1:, 1:] = self._block(p[0], False)
        return g

    def partials(self, p):
        d = np.zeros((3, 3, 3))
        d[0, 1:, 1:] = self._block(p[0], True)
        return d


def _fiber(kind: str):
    """Surface metric on the unit square chart and its x, y derivatives."""
    if kind == "flat":
        return (lambda x, y: np.eye(2), lambda x, y: np.zeros((2, 2, 2)))
    if kind == "round_sphere":
        # theta = pi/2 + (x - 1/2), phi = 2 pi y: away from the poles
        def g(x, y):
            s = math.sin(math.pi / 2 + x - 0.5)
            return np.array([[1.0, 0.0], [0.0, 4 * math.pi ** 2 * s * s]])

        def dg(x, y):
            th = math.pi / 2 + x - 0.5
            out = np.zeros((2, 2, 2))
            out[0, 1, 1] = 4 * math.pi ** 2 * 2 * math.sin(th) * math.cos(th)
            return out

        return g, dg
    if kind == "hyperbolic":
        # upper half-plane with height 1 + y
        def g(x, y):
            return np.eye(2) / (1 + y) ** 2

        def dg(x, y):
            out = np.zeros((2, 2, 2))
            out[1] = -2 * np.eye(2) / (1 + y) ** 3
            return out

        return g, dg
    raise ValueError(f"unknown fiber metric {kind!r}")


class ProductChart(MetricChart):
    """dt^2 + g_S with g_S independent of t: totally geodesic foils."""

    name = "product"

    def __init__(self, fiber: str = "round_sphere"):
        self.fiber = fiber
        self._g, self._dg = _fiber(fiber)

    def metric(self, p):
        g = np.eye(3)
        g[1:, 1:] = self._g(p[1], p[2])
        return g

    def partials(self, p):
        d = np.zeros((3, 3, 3))
        d[1:, 1:, 1:] = self._dg(p[1], p[2])
        return d


class WarpedChart(MetricChart):
    """dt^2 + f(t)^2 g_S with f(t) = 1 + amp sin(2 pi t).

    Foils are umbilic with both principal curvatures equal to -f'/f.
    """

    name = "warped"

    def __init__(self, amplitude: float = 0.3, fiber: str = "hyperbolic"):
        if not 0 <= amplitude < 1:
            raise ValueError("warping amplitude must lie in [0, 1)")
        self.amp = amplitude
        self.fiber = fiber
        self._g, self._dg = _fiber(fiber)

    def f(self, t):
        return 1 + self.amp * math.sin(2 * math.pi * t)

    def fprime(self, t):
        return 2 * math.pi * self.amp * math.cos(2 * math.pi * t)

    def metric(self, p):
        g = np.eye(3)
        g[1:, 1:] = self.f(p[0]) ** 2 * self._g(p[1], p[2])
        return g

    def partials(self, p):
        t = p[0]
        f = self.f(t)
        d = np.zeros((3, 3, 3))
        d[0, 1:, 1:] = 2 * f * self.fprime(t) * self._g(p[1], p[2])
        d[1:, 1:, 1:] = f * f * self._dg(p[1], p[2])
        return d


class FlatLatticeChart(MetricChart):
    """Flat dt^2 + dx^2 + dy^2 with deck map (t, x, y) -> (t+1, x, y+c)."""

    name = "flat"

    def __init__(self, c: float = 0.0):
        if not 0 <= c < 1:
            raise ValueError("lattice shift c must lie in [0, 1)")
        self.c = float(c)
        self.deck = ChartMap(1.0, offset=(0.0, self.c))

    def metric(self, p):
        return np.eye(3)

    def partials(self, p):
        return np.zeros((3, 3, 3))


class PerturbedChart(MetricChart):
    """``base`` plus eps(x) dx^2, eps(x) = amp (1 + cos 2 pi x) / 2."""

    name = "perturbed"

    def __init__(self, base: MetricChart, amplitude: float = 0.2):
        self.base = base
        self.amp = amplitude
        self.deck = base.deck

    def metric(self, p):
        g = self.base.metric(p).copy()
        g[1, 1] += self.amp * (1 + math.cos(2 * math.pi * p[1])) / 2
        return g

    def partials(self, p):
        d = self.base.partials(p).copy()
        d[1, 1, 1] += -self.amp * math.pi * math.sin(2 * math.pi * p[1])
        return d


# -- curvature -------------------------------------------------------------------


@dataclass
class CurvatureReport:
    t: float
    grid: int
    kappa: np.ndarray  # (grid, grid, 2), kappa1 >= kappa2
    deviation: float  # max distance from the value at the first grid point
    tolerance: Optional[float] = None

    @property
    def pair(self) -> tuple[float, float]:
        return (float(self.kappa[0, 0, 0]), float(self.kappa[0, 0, 1]))

    def deviation_from(self, pair) -> float:
        return float(np.max(np.abs(self.kappa - np.asarray(pair, dtype=float))))


def _grid_points(grid: int):
    if grid < 2:
        raise ValueError("grid must be at least 2x2")
    return np.arange(grid) / grid


def _check_pd(g: np.ndarray, p):
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"metric not positive definite at {tuple(float(c) for c in p)}") from None


def shape_operator(chart: MetricChart, p) -> np.ndarray:
    g = chart.metric(p)
    _check_pd(g, p)
    dt = chart.partials(p)[0]
    h = -dt[1:, 1:] / (2 * math.sqrt(g[0, 0]))
    return np.linalg.solve(g[1:, 1:], h)


def principal_curvatures(s: np.ndarray) -> tuple[float, float]:
    """Eigenvalues of a 2x2 shape operator via trace and determinant."""
    half = (s[0, 0] + s[1, 1]) / 2
    det = s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
    r = math.sqrt(max(half * half - det, 0.0))
    return (half + r, half - r)


def shape_operator_foliation(chart: MetricChart, t: float, grid: int = DEFAULT_GRID) -> CurvatureReport:
    xs = _grid_points(grid)
    kappa = np.empty((grid, grid, 2))
    for i, x in enumerate(xs):
        for j, y in enumerate(xs):
            kappa[i, j] = principal_curvatures(shape_operator(chart, (t, x, y)))
    dev = float(np.max(np.abs(kappa - kappa[0, 0])))
    return CurvatureReport(float(t), grid, kappa, dev)


def verify_cpc(
    chart: MetricChart,
    t_samples: Sequence[float] = DEFAULT_T_SAMPLES,
    tolerance: float = DEFAULT_TOL,
    grid: int = DEFAULT_GRID,
):
    """Each sampled foil has principal curvatures constant across the grid."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    reports = []
    for t in t_samples:
        r = shape_operator_foliation(chart, t, grid)
        r.tolerance = tolerance
        reports.append(r)
    return all(r.deviation <= tolerance for r in reports), reports


# -- isometries --------------------------------------------------------------------


def verify_isometry(
    chart: MetricChart,
    chart_map: ChartMap,
    grid: int = 9,
    tolerance: float = 1e-9,
    t_samples: Sequence[float] = DEFAULT_T_SAMPLES,
) -> bool:
    """``J^T g(F(p)) J == g(p)`` on a sample grid."""
    j = chart_map.jacobian()
    xs = _grid_points(grid)
    for t in t_samples:
        for x in xs:
            for y in xs:
                p = np.array([t, x, y])
                pulled = j.T @ chart.metric(chart_map(p)) @ j
                if np.max(np.abs(pulled - chart.metric(p))) > tolerance:
                    return False
    return True


# -- geodesics -------------------------------------------------------------------


def christoffel(chart: MetricChart, p) -> np.ndarray:
    """``gamma[i, j, k] = Gamma^i_jk``."""
    ginv = np.linalg.inv(chart.metric(p))
    d = chart.partials(p)  # d[l, j, k] = d_l g_jk
    # lower[l, j, k] = 1/2 (d_j g_lk + d_k g_lj - d_l g_jk)
    lower = 0.5 * (np.einsum("jlk->ljk", d) + np.einsum("klj->ljk", d) - d)
    return np.einsum("il,ljk->ijk", ginv, lower)


def _geodesic_rhs(chart, state):
    p, v = state[:3], state[3:]
    acc = -np.einsum("ijk,j,k->i", christoffel(chart, p), v, v)
    return np.concatenate([v, acc])


def _rk4(chart, state, h):
    k1 = _geodesic_rhs(chart, state)
    k2 = _geodesic_rhs(chart, state + h / 2 * k1)
    k3 = _geodesic_rhs(chart, state + h / 2 * k2)
    k4 = _geodesic_rhs(chart, state + h * k3)
    return state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass
class FirstReturn:
    arrival: tuple[float, float]  # chart point on the t = period slice
    return_point: tuple[float, float]  # deck foil map applied to the arrival, mod 1
    return_time: float
    max_energy_drift: float


def geodesic_first_return(
    chart: MetricChart,
    start=(0.0, 0.0),
    tolerance: float = 1e-8,
    step: float = 1e-3,
    max_steps: int = 1_000_000,
) -> FirstReturn:
    """Follow the unit normal geodesic from (0, start) until t reaches the period."""
    p0 = np.array([0.0, float(start[0]), float(start[1])])
    state = np.concatenate([p0, [1.0 / math.sqrt(chart.metric(p0)[0, 0]), 0.0, 0.0]])
    time, drift = 0.0, 0.0
    target = chart.period
    for _ in range(max_steps):
        t, vt = state[0], state[3]
        if vt <= 0:
            raise GeodesicStepError("geodesic turned back before returning to the foil")
        h = step
        if t + h * vt >= target:
            h = (target - t) / vt
        state = _rk4(chart, state, h)
        time += h
        g = chart.metric(state[:3])
        drift = max(drift, abs(state[3:] @ g @ state[3:] - 1.0))
        if drift > tolerance:
            raise GeodesicStepError(
                f"energy drift {drift:.3e} exceeds tolerance {tolerance:.1e}; use a smaller step"
            )
        if abs(state[0] - target) < 1e-12:
            break
    else:
        raise GeodesicStepError("no return within max_steps")
    # polish the final slice crossing
    for _ in range(3):
        gap = target - state[0]
        if abs(gap) < 1e-14:
            break
        h = gap / state[3]
        state = _rk4(chart, state, h)
        time += h
    arrival = (float(state[1]), float(state[2]))
    ret = chart.deck.foil_part(arrival) % 1.0
    ret = tuple(float(c) if abs(c - 1.0) > 1e-12 else 0.0 for c in ret)
    return FirstReturn(arrival, ret, float(time), float(drift))


# -- utilities ---------------------------------------------------------------------


def finite_difference_partials(chart: MetricChart, p, h: float = 1e-5) -> np.ndarray:
    out = np.zeros((3, 3, 3))
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        out[k] = (chart.metric(np.asarray(p) + e) - chart.metric(np.asarray(p) - e)) / (2 * h)
    return out


def sol_from_trace(n: int) -> SolChart:
    """Sol chart of the Anosov matrix (n-1, 1; n-2, 1) of trace ``n``."""
    return SolChart.from_matrix(IntMat2(n - 1, 1, n - 2, 1))

"""Frame-size, persistence and round-count selection.

For a load factor ``r = t_m * p / f`` the per-frame statistic is close to
Gaussian once ``eps**2 * f >= k(r)``; ``eps`` is then charged against the
reliability budget (``alpha + eps`` must stay below 1). The planner scans
``r`` over ``(0, r_max]`` and, for each ``r``, the admissible frame sizes
``[f_min, f_max]``, and keeps the plan with the smallest slot cost
``(f + l) * n``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from gert.errors import DomainError, Infeasible
from gert.estimator import AccuracySpec, ChannelParams, g, variance_z
from gert.normal import inverse_q

LN2 = math.log(2.0)

PLAN_CSV_COLUMNS = ("r", "f", "p", "n", "epsilon", "z_star", "t_m", "cost")

# relative slack when turning real-valued bounds into integers, so that e.g.
# k(ln 2) / 0.05**2 = 400.0000000000001 still gives f_min = 400
_ROUND_SLACK = 1e-12


@dataclass(frozen=True)
class PlannerConfig:
    r_grid_step: float = 0.01
    f_grid_max_points: int = 256
    inter_frame_gap_slots: float = 3.33
    r_max_tol: float = 1e-6

    def __post_init__(self):
        if not self.r_grid_step > 0:
            raise DomainError("r_grid_step must be positive")
        if self.f_grid_max_points < 2:
            raise DomainError("f_grid_max_points must be at least 2")
        if self.inter_frame_gap_slots < 0:
            raise DomainError("inter_frame_gap_slots must be non-negative")
        if not self.r_max_tol > 0:
            raise DomainError("r_max_tol must be positive")


@dataclass(frozen=True)
class FramePlan:
    r: float
    f: int
    p: float
    n: int
    epsilon: float
    z_star: float
    t_m: int
    cost: float
    l: float = 3.33
    waec: bool = False

    @property
    def channel(self) -> ChannelParams:
        return ChannelParams(f=self.f, p=self.p)

    def violations(self, spec: AccuracySpec) -> list[str]:
        """Broken plan invariants; empty when the plan is valid for ``spec``."""
        bad = []
        if abs(self.r - self.t_m * self.p / self.f) > 1e-9 * self.r:
            bad.append("r != t_m * p / f")
        if not 0 < self.p <= 1:
            bad.append("p outside (0, 1]")
        if self.n < 1:
            bad.append("n < 1")
        f_lo, f_hi = f_bounds(self.r, self.t_m, spec, waec=self.waec)
        if not f_lo <= self.f <= f_hi:
            bad.append(f"f={self.f} outside [{f_lo}, {f_hi}]")
        if not self.waec:
            if self.epsilon**2 * self.f < k(self.r) - 1e-12:
                bad.append("eps**2 * f < k(r)")
            if not spec.alpha + self.epsilon < 1:
                bad.append("alpha + eps >= 1")
        if abs(self.cost - (self.f + self.l) * self.n) > 1e-9 * self.cost:
            bad.append("cost != (f + l) * n")
        return bad

    def as_dict(self) -> dict:
        return asdict(self)

    def to_kv(self) -> str:
        return "\n".join(f"{key}={_fmt(getattr(self, key))}" for key in PLAN_CSV_COLUMNS) + "\n"

    def csv_row(self) -> str:
        return ",".join(_fmt(getattr(self, key)) for key in PLAN_CSV_COLUMNS) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.10g}"


def _check_r(r):
    if not np.all(np.asarray(r) > 0):
        raise DomainError(f"load factor must be positive, got {r}")


def k1(r):
    """``e**-r / (1 - e**-r)``."""
    _check_r(r)
    return np.exp(-r) / -np.expm1(-r) if isinstance(r, np.ndarray) else math.exp(-r) / -math.expm1(-r)


def k2(r):
    """``(1 - e**-r) / e**-r``, i.e. ``e**r - 1``."""
    _check_r(r)
    return np.expm1(r) if isinstance(r, np.ndarray) else math.expm1(r)


def k(r):
    """Lindeberg bound ``max(k1, k2)``; at least 1, equal to 1 only at ``r = ln 2``."""
    return np.maximum(k1(r), k2(r)) if isinstance(r, np.ndarray) else max(k1(r), k2(r))


def epsilon_max(spec: AccuracySpec) -> float:
    return 1.0 - spec.alpha


def epsilon_for(f: int, r: float) -> float:
    """Smallest approximation error ``eps`` with ``eps**2 * f >= k(r)``."""
    if f < 1:
        raise DomainError(f"frame size must be >= 1, got {f}")
    return math.sqrt(k(r) / f)


def f_bounds(r: float, t_m: int, spec: AccuracySpec, *, waec: bool = False) -> tuple[int, int]:
    """``(f_min, f_max)``; raises Infeasible when ``f_min > f_max``.

    ``waec`` drops the Gaussian-approximation constraint (``f_min = 1``).
    """
    _check_r(r)
    if t_m < 1:
        raise DomainError(f"t_m must be >= 1, got {t_m}")
    f_max = math.floor(t_m / r * (1 + _ROUND_SLACK))
    if waec:
        f_min = 1
    else:
        f_min = max(1, math.ceil(k(r) / epsilon_max(spec) ** 2 * (1 - _ROUND_SLACK)))
    if f_max < 1 or f_min > f_max:
        raise Infeasible(f"no frame size for r={r:g}, t_m={t_m}: f_min={f_min} > f_max={f_max}")
    return f_min, f_max


def persistence_for(f: int, r: float, t_m: int) -> float:
    p = r * f / t_m
    if 1.0 < p <= 1.0 + _ROUND_SLACK:
        p = 1.0
    if not 0.0 < p <= 1.0:
        raise DomainError(f"persistence r*f/t_m = {p:g} outside (0, 1]")
    return p


def z_star(spec: AccuracySpec, epsilon: float) -> float:
    """Two-sided normal cutoff for coverage ``alpha + eps``."""
    tail = (1.0 - spec.alpha - epsilon) / 2.0
    if tail <= 0.0:
        raise Infeasible(f"alpha + eps = {spec.alpha + epsilon:g} >= 1")
    if tail >= 0.5:
        return 0.0
    return inverse_q(tail)


def _round_terms(spec: AccuracySpec, t_m: float, q: float) -> tuple[float, float, float]:
    """``(1 - mu**2, gap_left**2, gap_right**2)``; only depends on ``q = p/f``."""
    log_empty = math.log1p(-q)
    def gf(t):
        return 1.0 - 2.0 * math.exp(t * log_empty)
    mu = gf(t_m)
    left = gf((1.0 - spec.beta) * t_m) - mu
    right = gf((1.0 + spec.beta) * t_m) - mu
    return 1.0 - mu * mu, left * left, right * right


def rounds_required(f: int, p: float, t_m: float, spec: AccuracySpec, epsilon: float) -> int:
    """Rounds needed so that the averaged statistic lands inside the
    ``(1 +- beta) * t_m`` image with probability ``alpha + eps``."""
    ch = ChannelParams(f=f, p=p)
    zs = z_star(spec, epsilon)
    mu = g(t_m, ch)
    var = variance_z(t_m, ch)
    gap_left = g((1.0 - spec.beta) * t_m, ch) - mu
    gap_right = g((1.0 + spec.beta) * t_m, ch) - mu
    if gap_left >= 0.0 or gap_right <= 0.0:
        raise DomainError("accuracy interval has zero width at this operating point")
    n_left = zs * zs * var / gap_left**2
    n_right = zs * zs * var / gap_right**2
    return max(1, math.ceil(max(n_left, n_right)))


def r_max(t_m: int, spec: AccuracySpec, tol: float = 1e-6) -> float:
    """Largest load factor for which some frame size is admissible.

    Admissibility ``eps_max**2 * t_m / r >= k(r)`` is equivalent to
    ``r * k(r) <= eps_max**2 * t_m``. ``r * k(r)`` falls from 1 (as r -> 0) to
    ``ln 2`` at ``r = ln 2`` and then increases, so above ``ln 2`` there is a
    single crossing, found by bisection.
    """
    if t_m < 1:
        raise DomainError(f"t_m must be >= 1, got {t_m}")
    budget = epsilon_max(spec) ** 2 * t_m
    if budget < LN2:
        raise Infeasible(
            f"t_m={t_m} too small for alpha={spec.alpha}: needs t_m >= {LN2 / epsilon_max(spec) ** 2:.1f}"
        )

    def ok(r):
        return r * k2(r) <= budget

    lo, hi = LN2, 2.0 * LN2
    while ok(hi):
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def min_planning_population(spec: AccuracySpec) -> int:
    """Smallest ``t_m`` for which every ``r`` in ``(0, r_max]`` is admissible."""
    return math.ceil(1.0 / epsilon_max(spec) ** 2 * (1 - _ROUND_SLACK))


class _RoundsAtR:
    """``n(f)`` for a fixed ``r``; non-increasing in ``f``."""

    def __init__(self, r: float, t_m: int, spec: AccuracySpec, waec: bool):
        self.r = r
        self.t_m = t_m
        self.spec = spec
        self.waec = waec
        self.kr = k(r)
        self.spread, self.left2, self.right2 = _round_terms(spec, t_m, r / t_m)
        self.gap2 = min(self.left2, self.right2)
        self._z_waec = z_star(spec, 0.0) if waec else None
        self._cache: dict[int, tuple[int, float, float]] = {}

    def __call__(self, f: int) -> tuple[int, float, float]:
        hit = self._cache.get(f)
        if hit is not None:
            return hit
        if self.waec:
            eps, zs = 0.0, self._z_waec
        else:
            eps = math.sqrt(self.kr / f)
            zs = z_star(self.spec, eps)
        n = max(1, math.ceil(zs * zs * self.spread / (f * self.gap2)))
        out = (n, eps, zs)
        self._cache[f] = out
        return out


def _best_f(rounds: _RoundsAtR, f_lo: int, f_hi: int, max_points: int, l: float) -> tuple[float, int]:
    """Minimum of ``(f + l) * n(f)`` over integers in ``[f_lo, f_hi]``.

    Within a run of equal ``n`` the cost grows with ``f``, so only ``f_lo`` and
    the frame sizes where ``n`` steps down can be optimal. A grid of at most
    ``max_points`` nodes (endpoints included) seeds the search; every grid
    interval whose endpoints disagree on ``n`` is bisected until each step is
    located exactly.
    """
    if f_hi - f_lo + 1 <= max_points:
        nodes = list(range(f_lo, f_hi + 1))
    else:
        nodes = sorted({int(round(x)) for x in np.linspace(f_lo, f_hi, max_points)})
    candidates = {f_lo}
    stack = list(zip(nodes[:-1], nodes[1:]))
    while stack:
        a, b = stack.pop()
        na, nb = rounds(a)[0], rounds(b)[0]
        if na == nb:
            continue
        if b - a == 1:
            candidates.add(b)
            continue
        mid = (a + b) // 2
        stack.append((a, mid))
        stack.append((mid, b))
    best = None
    for f in sorted(candidates):
        cost = (f + l) * rounds(f)[0]
        if best is None or cost < best[0]:
            best = (cost, f)
    return best


def plan(
    t_m: int,
    spec: AccuracySpec,
    cfg: Optional[PlannerConfig] = None,
    *,
    waec: bool = False,
) -> FramePlan:
    """Cheapest admissible ``(r, f, p, n)`` for population bound ``t_m``.

    ``waec`` plans without charging the Gaussian approximation error: ``eps = 0``
    in the normal cutoff and no lower bound on the frame size. The ``r`` range
    is the same as for the full planner.
    """
    cfg = cfg or PlannerConfig()
    if t_m < 1:
        raise DomainError(f"t_m must be >= 1, got {t_m}")
    rmax = r_max(t_m, spec, cfg.r_max_tol)
    l = cfg.inter_frame_gap_slots
    best = None  # (cost, f, r, n, eps, zs)
    steps = math.floor(rmax / cfg.r_grid_step * (1 + _ROUND_SLACK))
    for i in range(1, steps + 1):
        r = round(i * cfg.r_grid_step, 12)
        try:
            f_lo, f_hi = f_bounds(r, t_m, spec, waec=waec)
        except Infeasible:
            continue
        rounds = _RoundsAtR(r, t_m, spec, waec)
        cost, f = _best_f(rounds, f_lo, f_hi, cfg.f_grid_max_points, l)
        key = (cost, f, r)
        if best is None or key < best[:3]:
            n, eps, zs = rounds(f)
            best = (cost, f, r, n, eps, zs)
    if best is None:
        raise Infeasible(f"no admissible (r, f) for t_m={t_m}, alpha={spec.alpha}")
    cost, f, r, n, eps, zs = best
    return FramePlan(
        r=r,
        f=f,
        p=persistence_for(f, r, t_m),
        n=n,
        epsilon=eps,
        z_star=zs,
        t_m=t_m,
        cost=cost,
        l=l,
        waec=waec,
    )

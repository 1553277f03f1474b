"""Bloch/BMOA seminorm estimators, vanishing tests, and minimality verdicts.

Seminorms are certified grid lower bounds with refinement diagnostics, never
exact norms.  Box averages over the dyadic arc family are computed on a master
polar grid with per-ring angular prefix sums, so the whole family costs one
density evaluation.  The a-dependent Garsia-style integrals are evaluated
after the substitution z = phi_a(u), which pulls the concentration near a
back to the origin where the fixed grid resolves it:

    int g(z) (1 - |phi_a(z)|^2) dm(z)
        = int g(phi_a(u)) |phi_a'(u)|^2 (1 - |u|^2) dm(u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expr as _expr
from .hypgeo import Arc, GeodesicBox, one_minus_abs_sq, phi, translate
from .quad import (LimitVerdict, QuadConfig, SupEstimate, _gl_nodes,
                   _radial_panels, classify_sequence, grid_sup, radial_limit,
                   radial_schedule)
from .semigroup import classify, gamma_symbol

__all__ = [
    "Weight",
    "SeminormReport",
    "ConditionReport",
    "MinimalityReport",
    "bloch_seminorm",
    "bloch_vanishing",
    "bmoa_seminorm",
    "bmoa_vanishing",
    "garsia_quantity",
    "lvb_check",
    "logbloch_check",
    "lvmo_check",
    "lbmo_check",
    "minimality",
    "weight_regularity",
    "pommerenke_check",
    "lemma31_integral",
]


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Weight:
    """Radial weight on the disc: omega = 1 or omega_K = log(K/(1-|z|^2)).

    K = e reproduces the classical logarithmic weight log(e/(1-|z|^2)); the
    declared regularity constant C_omega is the closed-form bound from
    (1-|z|^2)|grad omega_K| = 2|z| <= 2 and omega_K >= log K.
    """

    tag: str                 # "unit" | "logK"
    K: float = math.e

    def __post_init__(self):
        if self.tag not in ("unit", "logK"):
            raise ValueError("unknown weight tag %r" % (self.tag,))
        if self.tag == "logK" and self.K <= 1.0:
            raise ValueError("logK weight requires K > 1")

    @staticmethod
    def unit() -> "Weight":
        return Weight("unit")

    @staticmethod
    def log() -> "Weight":
        return Weight("logK", math.e)

    @staticmethod
    def log_K(K) -> "Weight":
        return Weight("logK", float(K))

    @property
    def c_omega(self) -> float:
        return 0.0 if self.tag == "unit" else 2.0 / math.log(self.K)

    def from_oms(self, oms):
        """Weight value as a function of 1 - |z|^2 (vectorized)."""
        if self.tag == "unit":
            return np.ones_like(np.asarray(oms, dtype=float))
        return np.log(self.K / np.asarray(oms, dtype=float))

    def omega(self, z):
        return self.from_oms(one_minus_abs_sq(np.asarray(z)))

    def arc_factor(self, length) -> float:
        """Multiplier on a box average over an arc of normalized length l."""
        if self.tag == "unit":
            return 1.0
        return math.log(self.K / length) ** 2

    def grad_times_oms(self, z):
        """(1 - |z|^2) |grad omega|, in closed form."""
        r = np.abs(np.asarray(z))
        if self.tag == "unit":
            return np.zeros_like(r)
        return 2.0 * r


def weight_regularity(w: Weight, n_check=400) -> float:
    """Declared regularity constant C_omega with a grid verification.

    For omega_K the closed form (1-|z|^2)|grad omega_K| = 2|z| <= 2 together
    with omega_K >= log K gives C_omega = 2/log K; the pointwise inequality
    (1-|z|^2)|grad omega| <= C_omega omega is checked on an n_check grid.
    """
    c = w.c_omega
    n_r = max(4, n_check // 20)
    r = np.linspace(0.01, 1.0 - 1e-9, n_r)
    t = np.arange(20) * (2.0 * math.pi / 20)
    z = (r[:, None] * np.exp(1j * t[None, :])).ravel()
    lhs = w.grad_times_oms(z)
    rhs = c * w.omega(z)
    if np.any(lhs > rhs * (1.0 + 1e-12) + 1e-12):
        raise AssertionError("weight regularity inequality failed on the grid")
    return c


# ---------------------------------------------------------------------------
# function handles
# ---------------------------------------------------------------------------

def _as_pair(f):
    """Normalize f into (value, derivative) vectorized callables.

    Accepts a HoloExpr, a source string, a (value, derivative) pair of
    callables, or a bare callable derivative-carrying object is not needed:
    most estimators only use the derivative.
    """
    if isinstance(f, str):
        f = _expr.parse(f)
    if isinstance(f, _expr.HoloExpr):
        tree, dtree = f, _expr.differentiate(f)
        return (lambda z: _expr.evaluate_array(tree, z),
                lambda z: _expr.evaluate_array(dtree, z))
    if isinstance(f, tuple) and len(f) == 2:
        return f
    raise TypeError("expected expression, source, or (f, f') pair")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class SeminormReport:
    space: str                # "bloch" | "bmoa"
    weight: Weight
    value: float              # certified grid lower bound
    argmax: object            # point (bloch) or Arc (bmoa)
    resolution: int
    history: list             # (resolution, value), nondecreasing
    scale_series: list = field(default_factory=list)  # (j, sup over centers)
    trend: str = ""           # "", "growing", "stable", "decaying"


@dataclass
class ConditionReport:
    condition: str            # LVB | LVMO | LOGBLOCH | LBMO
    verdict: LimitVerdict
    satisfied: bool
    gamma_form: bool = False


@dataclass
class MinimalityReport:
    kind: str
    elliptic: bool
    lvb: ConditionReport
    lvmo: ConditionReport
    minimal: bool
    verdicts_agree: bool


# ---------------------------------------------------------------------------
# Bloch estimators
# ---------------------------------------------------------------------------

def _bloch_sampler(f, w):
    _, fp = _as_pair(f)

    def sampler(z):
        oms = one_minus_abs_sq(z)
        return np.abs(fp(z)) * oms * w.from_oms(oms)

    return sampler


def bloch_seminorm(f, w=Weight.unit(), resolution=12,
                   cfg=QuadConfig()) -> SeminormReport:
    """Grid lower bound for sup |f'(z)| (1-|z|^2) omega(z)."""
    sampler = _bloch_sampler(f, w)
    history = []
    best = None
    for res in range(4, resolution + 1, 2):
        est = grid_sup(sampler, ("disc",), res, cfg)
        if best is None or est.value >= best.value:
            best = est
        history.append((res, best.value))
    if history[-1][0] != resolution:
        est = grid_sup(sampler, ("disc",), resolution, cfg)
        if est.value >= best.value:
            best = est
        history.append((resolution, best.value))
    return SeminormReport("bloch", w, best.value, best.argmax,
                          resolution, history)


def bloch_vanishing(f, w=Weight.unit(), n_angles=256,
                    cfg=QuadConfig(), slope_rule=True) -> LimitVerdict:
    """Limit of the angular sup of the Bloch integrand as r -> 1.

    The slope rule admits 1/log-type decay (e.g. (log(e/(1-z)))^{1/2}, which
    lies in the little Bloch space but decays too slowly for the literal
    threshold); the verdict records when the rule fired.
    """
    sampler = _bloch_sampler(f, w)
    thetas = np.arange(n_angles) * (2.0 * math.pi / n_angles)
    eit = np.exp(1j * thetas)

    def angular_sup(r):
        vals = np.asarray(sampler(r * eit), dtype=float)
        vals = vals[np.isfinite(vals)]
        if vals.size == 0:
            raise ArithmeticError("no finite samples on the circle")
        return float(np.max(vals))

    return radial_limit(angular_sup, cfg, slope_rule=slope_rule)


# ---------------------------------------------------------------------------
# Carleson-box averages on the master grid
# ---------------------------------------------------------------------------

def _master_grid(J, n_gl=4, tail_depth=8):
    """Polar grid: dyadic annuli with GL radial nodes, uniform angles.

    Returns (r nodes, ring weights with the 2 r dr factor, n_theta).  The
    integral of a density against dm is sum_i wr_i * mean_over_theta(row_i).
    """
    n_theta = 1 << (min(J, 12) + 4)
    k_cap = min(max(J + tail_depth, 16), 38)
    radii, weights = [], []
    gap = 1.0
    for _ in range(k_cap):
        a, b = 1.0 - gap, 1.0 - gap / 2.0
        r, wr = _gl_nodes(a, b, n_gl)
        radii.append(r)
        weights.append(wr * 2.0 * r)
        gap /= 2.0
    return np.concatenate(radii), np.concatenate(weights), n_theta


def _box_average_family(f, w, J, n_gl=4, fracs=(1.0, 0.75)):
    """Box averages of |f'|^2 (1-|z|^2) over the dyadic arc family.

    Returns {j: (centers, averages)} for arcs of length 2^-j, j = 0..J, with
    centers on the 2^(j+2)-point angular grid, each average already carrying
    the 1/l normalization and the weight's arc factor.
    """
    _, fp = _as_pair(f)
    r, wr, n_theta = _master_grid(J, n_gl)
    thetas = np.arange(n_theta) * (2.0 * math.pi / n_theta)
    z = r[:, None] * np.exp(1j * thetas[None, :])
    vals = np.abs(fp(z)) ** 2 * one_minus_abs_sq(z)
    vals = np.where(np.isfinite(vals), vals, 0.0)
    # per-ring prefix sums of cell values; windows read off by interpolation
    pref = np.concatenate([np.zeros((r.size, 1)), np.cumsum(vals, axis=1)],
                          axis=1)
    totals = pref[:, -1]
    dtheta = 2.0 * math.pi / n_theta

    def window(i, lo, hi):
        """Integral of ring i cell values over angle-index window [lo, hi]."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        wrap = np.floor(lo / n_theta)
        lo = lo - wrap * n_theta
        hi = hi - wrap * n_theta

        def cum(x):
            full = np.floor(x / n_theta)
            x = x - full * n_theta
            k = np.minimum(x.astype(int), n_theta - 1)
            return full * totals[i] + pref[i, k] + (x - k) * vals[i, k]

        return cum(hi) - cum(lo)

    out = []
    for j in range(J + 1):
        for frac in fracs:
            length = frac * 2.0 ** (-j)
            if length > 1.0:
                continue
            n_c = 1 << (j + 2)
            centers = np.arange(n_c) * (2.0 * math.pi / n_c)
            box = GeodesicBox(Arc(0.0, length))
            half = box.angular_halfwidth(r)  # per-ring halfwidth, nan = empty
            acc = np.zeros(n_c)
            for i in range(r.size):
                h = float(half[i])
                if math.isnan(h) or h <= 0.0:
                    continue
                lo = (centers - h) / dtheta
                hi = (centers + h) / dtheta
                acc += wr[i] * window(i, lo, hi) / n_theta
            out.append((j, length, centers,
                        w.arc_factor(length) * acc / length))
    return out


def bmoa_seminorm(f, w=Weight.unit(), J=8, cfg=QuadConfig(),
                  fracs=(1.0, 0.75)) -> SeminormReport:
    """Sqrt of the sup over the dyadic arc family of weighted box averages.

    fracs sets the arc lengths per octave (fracs=(1.0,) with J=0 restricts
    to the full-circle arc, whose average is the plain disc integral).
    """
    fam = _box_average_family(f, w, J, fracs=fracs)
    best_val, best_arc = -math.inf, None
    history = []
    octave_sup = {}
    for j, length, centers, avgs in fam:
        k = int(np.argmax(avgs))
        octave_sup[j] = max(octave_sup.get(j, 0.0), float(avgs[k]))
        if avgs[k] > best_val:
            best_val = float(avgs[k])
            best_arc = Arc(float(centers[k]), length)
        if not history or j > history[-1][0]:
            history.append((j, math.sqrt(max(best_val, 0.0))))
        else:
            history[-1] = (j, math.sqrt(max(best_val, 0.0)))
    series = sorted(octave_sup.items())
    tail = [v for _, v in series[-6:]]
    ratios = [b / a for a, b in zip(tail, tail[1:]) if a > 0]
    if ratios and min(ratios) >= 1.02:
        trend = "growing"
    elif ratios and max(ratios) <= 0.98:
        trend = "decaying"
    else:
        trend = "stable"
    return SeminormReport("bmoa", w, math.sqrt(max(best_val, 0.0)), best_arc,
                          J, history, scale_series=series, trend=trend)


def bmoa_vanishing(f, w=Weight.unit(), J=12, j_lo=2,
                   cfg=QuadConfig()) -> LimitVerdict:
    """Limit of sup-over-centers box averages as the arc length 2^-j -> 0."""
    fam = _box_average_family(f, w, J)
    octave_sup = {}
    for j, _, _, avgs in fam:
        octave_sup[j] = max(octave_sup.get(j, 0.0), float(np.max(avgs)))
    samples = [(j, octave_sup[j]) for j in range(j_lo, J + 1)]
    return classify_sequence(samples, cfg, slope_rule=True)


# ---------------------------------------------------------------------------
# Mobius-pullback Garsia integrals
# ---------------------------------------------------------------------------

def _adaptive_angles(hot_angles, n_base=64, k_max=41):
    """Base uniform angles plus geometric clusters around each hot angle.

    Offsets shrink to ~pi 2^-41 ~ 1.4e-12 so the trapezoid mesh resolves
    kernel or density spikes of any width the double grid can reach.
    """
    offs = math.pi * 2.0 ** (-np.arange(2.0, k_max))
    parts = [np.arange(n_base) * (2.0 * math.pi / n_base)]
    for th in hot_angles:
        parts.append(np.concatenate(([th], th + offs, th - offs)))
    t = np.unique(np.concatenate(parts) % (2.0 * math.pi))
    return t


class GarsiaIntegrator:
    """Evaluates a -> int sq_density(z) (1 - |phi_a(z)|^2) dm(z).

    The density is sampled once on a polar grid with dyadic radial annuli and
    an angular mesh clustered around the given hot angles (where the density
    or the kernel (1-|a|^2)(1-|z|^2)/|1 - conj(a) z|^2 peaks); each query a
    then costs one kernel dot-product.  The kernel spike at angle arg(a) is
    only resolved if arg(a) was passed as a hot angle.
    """

    def __init__(self, sq_density, hot_angles=(), cfg=QuadConfig(), n_gl=4):
        t = _adaptive_angles(sorted(set(float(h) % (2.0 * math.pi)
                                        for h in hot_angles)))
        # periodic trapezoid weights on the nonuniform angular mesh
        gaps = np.diff(np.concatenate((t, [t[0] + 2.0 * math.pi])))
        wt = 0.5 * (gaps + np.roll(gaps, 1))
        rs, wrs, oms = [], [], []
        for lo, hi in _radial_panels(cfg.eps_min):
            r, wr = _gl_nodes(lo, hi, n_gl)
            rs.append(r)
            wrs.append(wr)
            oms.append((1.0 - r) * (1.0 + r))
        r = np.concatenate(rs)
        wr = np.concatenate(wrs)
        oms = np.concatenate(oms)
        z = r[:, None] * np.exp(1j * t[None, :])
        g = np.asarray(sq_density(z), dtype=float)
        g = np.where(np.isfinite(g), g, 0.0)
        # everything except the a-kernel, including (1-|z|^2) and dm weights
        self._base = (g * (oms * r * wr)[:, None] * wt[None, :] / math.pi).ravel()
        self._z = z.ravel()

    def __call__(self, a_values):
        a = np.atleast_1d(np.asarray(a_values, dtype=complex))
        out = np.empty(a.size)
        for i, ai in enumerate(a):
            kernel = (1.0 - abs(ai) ** 2) / \
                np.abs(1.0 - ai.conjugate() * self._z) ** 2
            out[i] = float(self._base @ kernel)
        return out


def _density_hot_angles(sq_density, n_scan=4096, r_probe=1.0 - 1e-6,
                        ratio=1e4):
    """Angles where the density blows up near the boundary (local maxima
    exceeding ratio x median on a fine circle scan)."""
    t = np.arange(n_scan) * (2.0 * math.pi / n_scan)
    v = np.asarray(sq_density(r_probe * np.exp(1j * t)), dtype=float)
    v = np.where(np.isfinite(v), v, np.inf)
    med = float(np.median(v[np.isfinite(v)])) if np.any(np.isfinite(v)) else 1.0
    big = v > max(ratio * med, 1e-300)
    peaks = big & (v >= np.roll(v, 1)) & (v >= np.roll(v, -1))
    return [float(t[k]) for k in np.nonzero(peaks)[0]][:8]


def garsia_integrals(sq_density, a_values, cfg=QuadConfig(), hot_angles=()):
    """int sq_density(z) (1 - |phi_a(z)|^2) dm(z) for each a (one-shot)."""
    a = np.atleast_1d(np.asarray(a_values, dtype=complex))
    hot = list(hot_angles) + [float(np.angle(ai)) for ai in a if ai != 0]
    return GarsiaIntegrator(sq_density, hot, cfg)(a)


def garsia_quantity(f, w=Weight.unit(), a_values=(0.0,),
                    cfg=QuadConfig()):
    """omega(a)^2 int |f'|^2 (1 - |phi_a|^2) dm for each a."""
    _, fp = _as_pair(f)
    a = np.atleast_1d(np.asarray(a_values, dtype=complex))
    sq = lambda z: np.abs(fp(z)) ** 2
    vals = garsia_integrals(sq, a, cfg, hot_angles=_density_hot_angles(sq))
    return w.omega(a) ** 2 * vals


# ---------------------------------------------------------------------------
# LVB / LVMO condition checkers
# ---------------------------------------------------------------------------

def _lvb_verdict(gen, cfg, n_angles=64):
    thetas = np.arange(n_angles) * (2.0 * math.pi / n_angles)
    eit = np.exp(1j * thetas)
    skipped = [0]

    def angular_sup(r):
        z = r * eit
        gv = np.abs(_expr.evaluate_array(gen.G, z))
        oms = 1.0 - r * r
        with np.errstate(divide="ignore", over="ignore"):
            vals = oms / gv * math.log(1.0 / oms)
        ok = np.isfinite(vals) & (gv > 1e-300)
        skipped[0] += int(np.sum(~ok))
        if not np.any(ok):
            raise ArithmeticError("generator vanished on the whole circle")
        return float(np.max(vals[ok]))

    verdict = radial_limit(angular_sup, cfg)
    if skipped[0]:
        verdict.flags.append("skipped %d samples at zeros of G" % skipped[0])
    return verdict


def lvb_check(gen, cfg=QuadConfig()) -> ConditionReport:
    """lim_{|z|->1} (1-|z|^2)/|G(z)| log(1/(1-|z|^2)) = 0 along angular sups."""
    v = _lvb_verdict(gen, cfg)
    return ConditionReport("LVB", v, v.tag == "vanishes")


def logbloch_check(gen, cfg=QuadConfig()) -> ConditionReport:
    """limsup-finite variant of the same quantity."""
    v = _lvb_verdict(gen, cfg)
    return ConditionReport("LOGBLOCH", v,
                           v.tag in ("vanishes", "bounded_nonvanishing"))


def _lvmo_verdict(gen, cfg, n_angles=16, printed_form=False):
    cls = classify(gen, cfg)
    if cls.kind == "elliptic" and not printed_form:
        _, gp = gamma_symbol(gen, cfg)
    else:
        gp = lambda z: 1j / _expr.evaluate_array(gen.G, z)
    thetas = np.arange(n_angles) * (2.0 * math.pi / n_angles)
    eit = np.exp(1j * thetas)
    sq = lambda z: np.abs(gp(z)) ** 2
    integ = GarsiaIntegrator(sq, list(thetas) + _density_hot_angles(sq), cfg)

    samples = []
    for j, r in radial_schedule(cfg):
        inner = integ(r * eit)
        oms = (1.0 - r) * (1.0 + r)
        lam = (math.log(math.e / oms)) ** 2 * float(np.max(inner))
        if math.isfinite(lam):
            samples.append((r, lam))
    return classify_sequence(samples, cfg)


def lvmo_check(gen, cfg=QuadConfig(), printed_form=False) -> ConditionReport:
    """Lambda(a) = log(e/(1-|a|^2))^2 int |gamma'|^2 (1-|phi_a|^2) dm -> 0.

    Uses the gamma-symbol integrand (gamma' = (z-tau)/G elliptic, i/G
    boundary); printed_form=True forces the i/G integrand.
    """
    v = _lvmo_verdict(gen, cfg, printed_form=printed_form)
    return ConditionReport("LVMO", v, v.tag == "vanishes",
                           gamma_form=not printed_form)


def lbmo_check(gen, cfg=QuadConfig(), printed_form=False) -> ConditionReport:
    v = _lvmo_verdict(gen, cfg, printed_form=printed_form)
    return ConditionReport("LBMO", v,
                           v.tag in ("vanishes", "bounded_nonvanishing"),
                           gamma_form=not printed_form)


def minimality(gen, cfg=QuadConfig()) -> MinimalityReport:
    """Maximal-subspace minimality verdict: elliptic and LVB (equiv. LVMO)."""
    cls = classify(gen, cfg)
    elliptic = cls.kind == "elliptic"
    lvb = lvb_check(gen, cfg)
    lvmo = lvmo_check(gen, cfg)
    agree = lvb.satisfied == lvmo.satisfied
    return MinimalityReport(cls.kind, elliptic, lvb, lvmo,
                            elliptic and lvb.satisfied and agree, agree)


# ---------------------------------------------------------------------------
# weighted Pommerenke machinery
# ---------------------------------------------------------------------------

def _univalence_probe(fv, n=400):
    r = np.linspace(0.05, 0.95, n // 20)
    t = np.arange(20) * (2.0 * math.pi / 20)
    z = (r[:, None] * np.exp(1j * t[None, :])).ravel()
    vals = fv(z)
    d = np.abs(vals[:, None] - vals[None, :])
    np.fill_diagonal(d, np.inf)
    sep = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(sep, 1.0)
    collisions = (d < 1e-10) & (sep > 1e-6)
    return not bool(np.any(collisions))


@dataclass
class PommerenkeReport:
    univalent: bool
    hypothesis: LimitVerdict | None
    conclusion: LimitVerdict | None
    contract_applies: bool
    contract_holds: bool | None


def pommerenke_check(f, w: Weight, cfg=QuadConfig(),
                     n_angles=8) -> PommerenkeReport:
    """Univalent transfer: omega-Bloch vanishing forces omega-BMOA vanishing.

    Hypothesis quantity: sup_theta |f'| (1-|z|^2) omega at radius r.
    Conclusion quantity: sup_theta omega(a)^2 int |f'|^2 (1-|phi_a|^2) dm
    along |a| = r.  If the hypothesis verdict is not "vanishes" the report
    records that and makes no contract claim.
    """
    fv, fp = _as_pair(f)
    if not _univalence_probe(fv):
        raise ValueError("collision probe failed: f is not univalent on grid")
    if weight_regularity(w) >= 1.0:
        raise ValueError("weight regularity constant must be < 1")
    hyp = bloch_vanishing((fv, fp), w, cfg=cfg)

    thetas = np.arange(n_angles) * (2.0 * math.pi / n_angles)
    eit = np.exp(1j * thetas)
    sq = lambda z: np.abs(fp(z)) ** 2
    integ = GarsiaIntegrator(sq, list(thetas) + _density_hot_angles(sq), cfg)
    samples = []
    for j, r in radial_schedule(cfg):
        inner = integ(r * eit)
        om = float(w.from_oms(np.array([(1.0 - r) * (1.0 + r)]))[0])
        samples.append((r, om * om * float(np.max(inner))))
    concl = classify_sequence(samples, cfg)
    applies = hyp.tag == "vanishes"
    holds = (concl.tag == "vanishes") if applies else None
    return PommerenkeReport(True, hyp, concl, applies, holds)


def lemma31_integral(f, w: Weight, cfg=QuadConfig(), J=30):
    """Estimate int_0^1 sup_{a, |z| <= r} (omega(a) |f_a(z)|)^2 dr.

    f_a = f(phi_a) - f(a); the inner sup runs over a coarse a-grid and 16
    angles at |z| = r (|f_a| is subharmonic so the sup sits on the circle).
    Returns (estimate, "finite" | "growth") where "growth" flags an
    increasing dyadic tail.
    """
    fv, _ = _as_pair(f)
    a_grid = [rr * np.exp(2j * math.pi * k / 8)
              for rr in (0.0, 0.5, 0.9, 0.99, 1.0 - 1e-4, 1.0 - 1e-8)
              for k in range(8)]
    a_grid = np.array(a_grid, dtype=complex)
    fa = [translate(fv, a) for a in a_grid]
    zt = np.exp(2j * math.pi * np.arange(16) / 16)

    def inner(r):
        z = r * zt
        best = 0.0
        for a, h in zip(a_grid, fa):
            om = float(w.omega(np.array([a]))[0])
            vals = np.abs(h(z)) * om
            vals = vals[np.isfinite(vals)]
            if vals.size:
                best = max(best, float(np.max(vals)))
        return best * best

    # [0, 1/2] panel by Gauss-Legendre, then dyadic midpoint segments
    r0, w0 = _gl_nodes(0.0, 0.5, 8)
    total = float(np.sum([inner(r) * ww for r, ww in zip(r0, w0)]))
    contribs = []
    gap = 0.5
    for _ in range(1, J + 1):
        c = inner(1.0 - 0.75 * gap) * 0.5 * gap
        contribs.append(c)
        total += c
        gap /= 2.0
    tail = contribs[-6:]
    growing = all(b >= a for a, b in zip(tail, tail[1:])) and tail[-1] > tail[0]
    return total, ("growth" if growing else "finite")

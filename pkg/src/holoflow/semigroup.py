"""Generators, Berkson-Porta construction, classification, flows, Koenigs map.

A Generator wraps the holomorphic vector field G driving the Cauchy problem
dw/dt = G(w), w(0) = z, together with optional Berkson-Porta data (tau, p)
with G(z) = (z - tau)(conj(tau) z - 1) p(z), Re p >= 0.  Classification finds
the Denjoy-Wolff point and the spectral value; the flow integrates the ODE
with the variational equation dJ/dt = G'(w) J carried alongside.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import expr as _expr
from .expr import Const, Var, div, mul, sub
from .quad import QuadConfig, classify_sequence, line_integral, radial_schedule

__all__ = [
    "Generator",
    "Classification",
    "Trajectory",
    "AdmissibilityError",
    "ClassificationError",
    "FlowBlowupError",
    "berkson_porta",
    "classify",
    "flow",
    "flow_points",
    "koenigs",
    "gamma_symbol",
]


class AdmissibilityError(Exception):
    """Berkson-Porta factor p violates Re p >= 0 on the sample grid."""


class ClassificationError(Exception):
    """Denjoy-Wolff analysis did not converge."""


class FlowBlowupError(Exception):
    """Numerical trajectory reached the guard annulus |w| = 1 - eps_min."""


@dataclass(frozen=True)
class Classification:
    kind: str           # elliptic | hyperbolic | parabolic
    tau: complex
    lam: complex        # spectral value; complex for elliptic, real >= 0 else

    def as_dict(self):
        return {"kind": self.kind, "tau": self.tau, "lambda": self.lam}


@dataclass
class Generator:
    """Holomorphic vector field with cached derivative and optional metadata."""

    G: _expr.HoloExpr
    bp_tau: complex | None = None
    bp_p: _expr.HoloExpr | None = None
    _dG: _expr.HoloExpr | None = field(default=None, repr=False)
    _classification: Classification | None = field(default=None, repr=False)

    @staticmethod
    def from_source(text, bp_tau=None, bp_p=None) -> "Generator":
        return Generator(_expr.parse(text), bp_tau,
                         _expr.parse(bp_p) if isinstance(bp_p, str) else bp_p)

    @property
    def dG(self) -> _expr.HoloExpr:
        if self._dG is None:
            self._dG = _expr.differentiate(self.G)
        return self._dG

    def __call__(self, z):
        return self.G(z)

    def deriv(self, z):
        return self.dG(z)


def _sample_grid(n_r=20, n_t=20, r_max=0.95):
    r = np.linspace(0.05, r_max, n_r)
    t = np.arange(n_t) * (2.0 * math.pi / n_t)
    return (r[:, None] * np.exp(1j * t[None, :])).ravel()


def berkson_porta(tau, p, tol=1e-9) -> Generator:
    """Generator with G(z) = (z - tau)(conj(tau) z - 1) p(z)."""
    if isinstance(p, str):
        p = _expr.parse(p)
    tau = complex(tau)
    if abs(tau) > 1.0 + 1e-12:
        raise ValueError("tau must lie in the closed disc")
    grid = _sample_grid()
    pv = _expr.evaluate_array(p, grid)
    if np.nanmin(pv.real) < -tol:
        raise AdmissibilityError("Re p < %g on the sample grid (min %g)"
                                 % (-tol, float(np.nanmin(pv.real))))
    G = mul(mul(sub(Var(), Const(tau)),
                sub(mul(Const(tau.conjugate()), Var()), Const(1.0))), p)
    return Generator(G, bp_tau=tau, bp_p=p)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def _newton_zero(gen, seed, max_iter=60, tol=1e-14):
    """Damped Newton iteration for G(z) = 0 from one seed."""
    z = complex(seed)
    fz = abs(gen(z)) if _finite_at(gen, z) else math.inf
    for _ in range(max_iter):
        try:
            g = gen.G(z)
            dg = gen.dG(z)
        except _expr.EvalDomainError:
            return None
        if abs(dg) == 0.0:
            return None
        step = g / dg
        lam = 1.0
        for _ in range(30):
            cand = z - lam * step
            try:
                fc = abs(gen.G(cand))
            except _expr.EvalDomainError:
                fc = math.inf
            if fc < fz:
                z, fz = cand, fc
                break
            lam *= 0.5
        else:
            break
        if fz < tol:
            return z
    return z if fz < 1e-10 else None


def _finite_at(gen, z):
    try:
        gen.G(z)
        return True
    except _expr.EvalDomainError:
        return False


def _boundary_lambda(gen, tau, cfg):
    """Spectral value at a boundary Denjoy-Wolff point from radial samples.

    Samples f(r) = Re(conj(tau) G(r tau)) / (1 - r) along the dyadic radius
    schedule and Richardson-extrapolates the last pair.
    """
    samples = []
    for j, r in radial_schedule(cfg):
        try:
            v = (tau.conjugate() * gen.G(r * tau)).real / (1.0 - r)
        except _expr.EvalDomainError:
            continue
        if math.isfinite(v):
            samples.append((r, v))
    if len(samples) < 4:
        raise ClassificationError("boundary spectral-value analysis failed")
    mags = [(r, abs(v)) for r, v in samples]
    verdict = classify_sequence(mags, cfg)
    if verdict.tag == "vanishes":
        return 0.0, verdict
    lam = 2.0 * samples[-1][1] - samples[-2][1]
    if lam < -1e-9:
        raise ClassificationError("negative boundary spectral value %r" % lam)
    return max(lam, 0.0), verdict


def classify(gen: Generator, cfg=QuadConfig()) -> Classification:
    """Find the Denjoy-Wolff point and spectral value of the semigroup."""
    if gen._classification is not None:
        return gen._classification

    # interior zero search: multi-start damped Newton on a 7 x 16 polar grid
    seeds = [0.0 + 0.0j]
    for r in (0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 0.95):
        for k in range(16):
            seeds.append(r * cmath.exp(2j * math.pi * k / 16))
    best = None
    for s in seeds:
        z = _newton_zero(gen, s)
        # a genuine interior Denjoy-Wolff point is a simple zero well inside
        # the disc; boundary zeros of higher order stall Newton just inside
        # |z| = 1 with a vanishing derivative and must not be accepted here
        if z is not None and abs(z) < 1.0 - 1e-6 and abs(gen.dG(z)) > 1e-7:
            if best is None or abs(gen.G(z)) < abs(gen.G(best)):
                best = z
    if best is not None:
        lam = -gen.dG(best)
        if lam.real < -1e-9:
            raise ClassificationError("interior fixed point is repelling")
        cls = Classification("elliptic", best, lam)
        gen._classification = cls
        return cls

    # boundary Denjoy-Wolff point
    candidates = []
    if gen.bp_tau is not None and abs(abs(gen.bp_tau) - 1.0) < 1e-12:
        candidates.append(complex(gen.bp_tau))
    else:
        r_probe = 1.0 - 1e-6
        thetas = np.arange(512) * (2.0 * math.pi / 512)
        vals = np.abs(_expr.evaluate_array(gen.G, r_probe * np.exp(1j * thetas)))
        vals = np.where(np.isfinite(vals), vals, np.inf)
        order = np.argsort(vals)
        picked = []
        for k in order[:16]:
            th = thetas[k]
            if all(min(abs(th - t), 2 * math.pi - abs(th - t)) > 0.2 for t in picked):
                picked.append(th)
        for th in picked[:4]:
            z = _newton_zero(gen, r_probe * cmath.exp(1j * th))
            if z is not None and abs(abs(z) - 1.0) < 1e-5:
                candidates.append(z / abs(z))
    seen = []
    for tau in candidates:
        if any(abs(tau - s) < 1e-6 for s in seen):
            continue
        seen.append(tau)
        try:
            lam, verdict = _boundary_lambda(gen, tau, cfg)
        except ClassificationError:
            continue
        kind = "parabolic" if lam == 0.0 else "hyperbolic"
        cls = Classification(kind, tau, lam)
        gen._classification = cls
        return cls
    raise ClassificationError("no interior zero and boundary analysis inconclusive")


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    times: np.ndarray
    points: np.ndarray      # phi_t(z0) samples
    derivs: np.ndarray      # d phi_t / dz samples
    n_steps: int
    residual: float         # |dw/dt - G(w)| at the final sample (FD check)

    @property
    def endpoint(self) -> complex:
        return complex(self.points[-1])

    @property
    def end_deriv(self) -> complex:
        return complex(self.derivs[-1])


def _flow_rhs(gen):
    def rhs(t, y):
        n = y.size // 2
        w = y[:n]
        j = y[n:]
        gw = _expr.evaluate_array(gen.G, w)
        dgw = _expr.evaluate_array(gen.dG, w)
        return np.concatenate([gw, dgw * j])
    return rhs


def flow_points(gen, z0, t, cfg=QuadConfig(), rtol=1e-10, atol=1e-10):
    """Flow an array of initial points for time t; returns (phi_t, dphi_t/dz)."""
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return z0.copy(), np.ones_like(z0)
    n = z0.size
    y0 = np.concatenate([z0, np.ones_like(z0)])
    guard = 1.0 - cfg.eps_min

    def escape(_, y):
        return guard - float(np.max(np.abs(y[:n])))
    escape.terminal = True

    sol = solve_ivp(_flow_rhs(gen), (0.0, float(t)), y0, method="RK45",
                    rtol=rtol, atol=atol, events=escape)
    if not sol.success or (sol.t_events[0].size and sol.t[-1] < t):
        raise FlowBlowupError("trajectory reached the guard annulus before t=%g" % t)
    y = sol.y[:, -1]
    return y[:n], y[n:], sol


def flow(gen, z0, t, cfg=QuadConfig(), n_samples=17) -> Trajectory:
    """Integrate the Cauchy problem from z0 up to time t with samples."""
    z0 = complex(z0)
    if t < 0:
        raise ValueError("t must be nonnegative")
    times = np.linspace(0.0, float(t), n_samples)
    if t == 0:
        pts = np.full(n_samples, z0, dtype=complex)
        return Trajectory(times, pts, np.ones(n_samples, dtype=complex), 0, 0.0)
    guard = 1.0 - cfg.eps_min

    def escape(_, y):
        return guard - abs(y[0])
    escape.terminal = True

    sol = solve_ivp(_flow_rhs(gen), (0.0, float(t)),
                    np.array([z0, 1.0 + 0.0j]), method="RK45",
                    rtol=1e-11, atol=1e-12, t_eval=times, events=escape)
    if not sol.success or sol.t.size < n_samples:
        raise FlowBlowupError("trajectory reached the guard annulus before t=%g" % t)
    pts = sol.y[0]
    derivs = sol.y[1]
    if np.max(np.abs(pts)) >= 1.0:
        raise FlowBlowupError("trajectory left the disc")
    # semigroup-property residual: |phi_{t/2}(phi_{t/2}(z0)) - phi_t(z0)|
    half, _, _ = flow_points(gen, z0, t / 2, cfg)
    again, _, _ = flow_points(gen, half[0], t / 2, cfg)
    residual = abs(again[0] - pts[-1])
    return Trajectory(times, pts, derivs, sol.t.size, float(residual))


# ---------------------------------------------------------------------------
# Koenigs function and gamma-symbol
# ---------------------------------------------------------------------------

def koenigs(gen, cfg=QuadConfig()):
    """Return handles (h, h') for the conformal conjugation of the semigroup.

    Elliptic: h(tau) = 0, h'(tau) = 1, h(phi_t(z)) = exp(-lambda t) h(z),
    built as (z - tau) exp(int_tau^z [-lambda/G - 1/(s - tau)] ds); the
    integrand is holomorphic across tau.  Non-elliptic: h' = i/G, h(0) = 0.
    """
    cls = classify(gen, cfg)
    if cls.kind == "elliptic":
        tau, lam = cls.tau, cls.lam
        core = sub(div(Const(-lam), gen.G), div(Const(1.0), sub(Var(), Const(tau))))

        def correction(pts):
            out = _expr.evaluate_array(core, pts)
            bad = ~np.isfinite(out)
            if np.any(bad):
                # removable limit -G''(tau) / (2 G'(tau)) via central difference
                h = 1e-6
                out[bad] = -(gen.dG(tau + h) - gen.dG(tau - h)) / (4.0 * h * gen.dG(tau))
            return out

        def h(z):
            z = complex(z)
            if z == tau:
                return 0.0 + 0.0j
            return (z - tau) * cmath.exp(line_integral(correction, tau, z, cfg))

        def hp(z):
            z = complex(z)
            if abs(z - tau) < 1e-9:
                return 1.0 + 0.0j
            return h(z) * (-lam / gen.G(z))

        return h, hp

    def hp_ne(z):
        return 1j / gen.G(z) if np.isscalar(z) or isinstance(z, complex) \
            else 1j / _expr.evaluate_array(gen.G, z)

    def h_ne(z):
        return line_integral(lambda w: 1j / _expr.evaluate_array(gen.G, w),
                             0.0, complex(z), cfg)

    return h_ne, hp_ne


def gamma_symbol(gen, cfg=QuadConfig()):
    """Return handles (gamma, gamma') for the Volterra symbol of the semigroup.

    Elliptic: gamma'(z) = (z - tau)/G(z)  (equal to -1/p for Berkson-Porta
    input), with the removable value -1/lambda at tau.  Boundary case: gamma
    coincides with the Koenigs function.
    """
    cls = classify(gen, cfg)
    if cls.kind != "elliptic":
        return koenigs(gen, cfg)
    tau, lam = cls.tau, cls.lam
    tree = div(sub(Var(), Const(tau)), gen.G)
    at_tau = -1.0 / lam

    def gp(z):
        if np.isscalar(z) or isinstance(z, complex):
            z = complex(z)
            if abs(z - tau) < 1e-12:
                return at_tau
            return _expr.evaluate(tree, z)
        out = _expr.evaluate_array(tree, z)
        bad = ~np.isfinite(out)
        if np.any(bad):
            out[bad] = at_tau
        return out

    def gamma(z):
        return line_integral(gp, tau, complex(z), cfg)

    return gamma, gp

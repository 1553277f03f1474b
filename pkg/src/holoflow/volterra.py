"""Generalized Volterra operators, composition semigroups, continuity probes.

T_g f(z) = int_0^z f g' dzeta and C_t f = f o phi_t.  Operator boundedness is
probed on a finite test family, never decided: every OperatorProbe carries an
explicit "probe, not proof" marker.  Seminorms of C_t f - f reuse the spaces
module's arc/grid family so differences across t are not grid noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expr as _expr
from . import spaces
from .quad import QuadConfig, line_integral
from .semigroup import flow_points
from .spaces import Weight, _as_pair

__all__ = [
    "FunctionHandle",
    "OperatorProbe",
    "ContinuityProbe",
    "CoreReport",
    "volterra_apply",
    "compose_apply",
    "continuity_probe",
    "dense_core_test",
    "boundedness_probe",
    "STANDARD_FAMILY",
]

# the six-member standard test family
STANDARD_FAMILY = (
    "1",
    "z",
    "z^2",
    "log(e/(1 - z))",
    "(log(e/(1 - z)))^0.5",
    "(0.5 - z)/(1 - 0.5*z)",
)


@dataclass
class FunctionHandle:
    """A holomorphic function as a (value, derivative) pair of callables."""

    val: object
    der: object

    def __call__(self, z):
        return self.val(z)

    def __iter__(self):            # unpacks like the (f, f') tuples
        return iter((self.val, self.der))

    @property
    def pair(self):
        return (self.val, self.der)


def volterra_apply(g, f, cfg=QuadConfig()) -> FunctionHandle:
    """T_g f(z) = int_0^z f(s) g'(s) ds; T_g f(0) = 0 exactly."""
    fv, _ = _as_pair(f)
    if isinstance(g, str):
        g = _expr.parse(g)
    _, gp = _as_pair(g)

    def der(z):
        return fv(np.asarray(z, dtype=complex)) * gp(np.asarray(z, dtype=complex))

    def val(z):
        z = complex(z)
        if z == 0:
            return 0.0 + 0.0j
        return line_integral(lambda s: fv(s) * gp(s), 0.0, z, cfg)

    return FunctionHandle(val, der)


def compose_apply(gen, t, f, cfg=QuadConfig()) -> FunctionHandle:
    """C_t f = f o phi_t as a vectorized (value, derivative) handle."""
    fv, fp = _as_pair(f)
    if t < 0:
        raise ValueError("t must be nonnegative")

    def _flowed(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        shape = z.shape
        w, j, _ = flow_points(gen, z.ravel(), t, cfg)
        return w.reshape(shape), j.reshape(shape)

    def val(z):
        w, _ = _flowed(z)
        return fv(w)

    def der(z):
        w, j = _flowed(z)
        return fp(w) * j

    return FunctionHandle(val, der)


@dataclass
class ContinuityProbe:
    times: list
    values: list                 # seminorm of C_t f - f per time
    space: str
    trend: str                   # "decays" | "floor" | "mixed"
    floor: float


def continuity_probe(gen, f, times, space="bmoa", w=Weight.unit(),
                     cfg=QuadConfig(), J=8) -> ContinuityProbe:
    """Seminorms of C_t f - f along decreasing times, with a trend tag."""
    times = list(times)
    if any(t <= 0 for t in times) or any(b >= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be positive and strictly decreasing")
    fv, fp = _as_pair(f)
    values = []
    for t in times:
        ct = compose_apply(gen, t, (fv, fp), cfg)
        diff = (lambda z, c=ct: c.val(z) - fv(z),
                lambda z, c=ct: c.der(z) - fp(z))
        if space == "bmoa":
            values.append(spaces.bmoa_seminorm(diff, w, J=J, cfg=cfg).value)
        elif space == "bloch":
            values.append(spaces.bloch_seminorm(diff, w, cfg=cfg).value)
        else:
            raise ValueError("space must be 'bmoa' or 'bloch'")
    floor = min(values)
    decaying = all(b < a for a, b in zip(values, values[1:]))
    if decaying and values[-1] < 0.25 * values[0]:
        trend = "decays"
    elif floor > 0.25 * max(values):
        # non-members sit well above a quarter of the peak (VMOA members
        # decay by orders of magnitude over the same time range)
        trend = "floor"
    else:
        trend = "mixed"
    return ContinuityProbe(times, values, space, trend, floor)


@dataclass
class CoreReport:
    report: spaces.SeminormReport
    in_core: bool


def dense_core_test(gen, f, space="bloch", w=Weight.unit(),
                    cfg=QuadConfig()) -> CoreReport:
    """Derivative-level core membership: is the function with derivative
    G f' in the space (finite, stable seminorm)?"""
    _, fp = _as_pair(f)
    der = lambda z: _expr.evaluate_array(gen.G, z) * fp(z)
    handle = (lambda z: np.zeros_like(np.asarray(z, dtype=complex)), der)
    if space == "bmoa":
        rep = spaces.bmoa_seminorm(handle, w, cfg=cfg)
    else:
        rep = spaces.bloch_seminorm(handle, w, cfg=cfg)
    vals = [v for _, v in rep.history]
    stable = len(vals) < 2 or vals[-1] <= 1.25 * vals[-2] + 1e-12
    finite = math.isfinite(rep.value) and rep.value < 1e6
    return CoreReport(rep, finite and stable)


@dataclass
class OperatorProbe:
    symbol: str
    space: str
    members: list                # source strings
    member_norms: list           # seminorm + |f(0)| per member
    image_norms: list            # at the refined resolution
    ratios: list
    ratio_growth: list           # refined ratio / coarse ratio per member
    marker: str = "probe, not proof"


def _space_norm(pair, space, w, J, cfg):
    if space == "bmoa":
        return spaces.bmoa_seminorm(pair, w, J=J, cfg=cfg).value
    return spaces.bloch_seminorm(pair, w, resolution=J + 4, cfg=cfg).value


def boundedness_probe(g, space="bmoa", family=STANDARD_FAMILY,
                      w=Weight.unit(), cfg=QuadConfig(),
                      J_coarse=5, J_fine=9) -> OperatorProbe:
    """Ratios ||T_g f|| / ||f|| over the test family at two resolutions.

    The denominator is the seminorm plus |f(0)| (the constant member has zero
    seminorm).  ratio_growth > 1 under refinement is the divergence signal;
    finite families give necessary evidence only.
    """
    if not family:
        raise ValueError("family must be nonempty")
    if isinstance(g, str):
        g_src, g = g, _expr.parse(g)
    else:
        g_src = _expr.to_source(g) if isinstance(g, _expr.HoloExpr) else repr(g)
    members, mnorms, inorms, ratios, growth = [], [], [], [], []
    for src in family:
        f = _expr.parse(src) if isinstance(src, str) else src
        fv, fp = _as_pair(f)
        f0 = abs(complex(fv(np.array([0.0 + 0.0j]))[0]))
        image = volterra_apply(g, (fv, fp), cfg)
        r = []
        for J in (J_coarse, J_fine):
            num = _space_norm(image.pair, space, w, J, cfg)
            den = _space_norm((fv, fp), space, w, J, cfg) + f0
            r.append(num / den if den > 0 else math.inf)
        members.append(src if isinstance(src, str) else _expr.to_source(src))
        mnorms.append(_space_norm((fv, fp), space, w, J_fine, cfg) + f0)
        inorms.append(_space_norm(image.pair, space, w, J_fine, cfg))
        ratios.append(r[1])
        growth.append(r[1] / r[0] if r[0] > 0 else math.inf)
    return OperatorProbe(g_src, space, members, mnorms, inorms, ratios, growth)

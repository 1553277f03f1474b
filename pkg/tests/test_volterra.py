"""Volterra operators, composition semigroups, continuity and core probes."""

import math

import numpy as np
import pytest

from holoflow import expr, volterra
from holoflow.semigroup import Generator
from holoflow.spaces import Weight
from holoflow.volterra import (STANDARD_FAMILY, boundedness_probe,
                               compose_apply, continuity_probe,
                               dense_core_test, volterra_apply)


def _pair(src):
    tree = expr.parse(src)
    dtree = expr.differentiate(tree)
    return (lambda z: expr.evaluate_array(tree, z),
            lambda z: expr.evaluate_array(dtree, z))


# ---------------------------------------------------------------------------
# T_g basics
# ---------------------------------------------------------------------------

def test_volterra_vanishes_at_origin_exactly():
    image = volterra_apply("log(e/(1 - z))", _pair("z^2"))
    assert image.val(0.0) == 0.0


def test_volterra_derivative_is_f_times_g_prime():
    # d/dz T_g f = f g' against a central difference at 1e-8 tolerance
    image = volterra_apply("log(e/(1 - z))", _pair("z^2"))
    h = 1e-5
    for z in (0.3 + 0.2j, -0.5j, 0.1):
        fd = (image.val(z + h) - image.val(z - h)) / (2 * h)
        dv = complex(np.atleast_1d(image.der(np.array([z])))[0])
        assert abs(dv - fd) <= 1e-8 * (1 + abs(dv))


def test_volterra_closed_form_oracle():
    # T_g f for f = 1, g = z^2/2 gives z^2/2
    image = volterra_apply("0.5*z^2", _pair("1"))
    z = 0.4 - 0.3j
    assert complex(image.val(z)) == pytest.approx(0.5 * z ** 2, abs=1e-12)


def test_standard_family_has_six_members():
    assert len(STANDARD_FAMILY) == 6
    assert "1" in STANDARD_FAMILY and "z" in STANDARD_FAMILY


# ---------------------------------------------------------------------------
# composition operators
# ---------------------------------------------------------------------------

def test_compose_apply_matches_flow():
    gen = Generator.from_source("-z")
    ct = compose_apply(gen, 0.7, _pair("z^2"))
    z = 0.3 + 0.1j
    w = math.exp(-0.7) * z
    assert complex(np.atleast_1d(ct.val(z))[0]) == pytest.approx(w ** 2,
                                                                 abs=1e-9)
    # chain rule: (f o phi_t)' = f'(phi_t) J_t, with J_t = e^{-t} here
    assert complex(np.atleast_1d(ct.der(z))[0]) == pytest.approx(
        2 * w * math.exp(-0.7), abs=1e-9)


def test_operator_semigroup_law_pointwise():
    gen = Generator.from_source("-z*(1 + z)/(1 - z)")
    f = _pair("log(e/(1 - z))")
    s, t = 0.4, 0.8
    cs = compose_apply(gen, s, f)
    cst = compose_apply(gen, s + t, f)
    ct_of_cs = compose_apply(gen, t, (lambda z: np.atleast_1d(cs.val(z)),
                                      lambda z: np.atleast_1d(cs.der(z))))
    for z in (0.2 + 0.3j, -0.4, 0.1j):
        a = complex(np.atleast_1d(ct_of_cs.val(z))[0])
        b = complex(np.atleast_1d(cst.val(z))[0])
        assert abs(a - b) <= 1e-7


def test_compose_rejects_negative_time():
    with pytest.raises(ValueError):
        compose_apply(Generator.from_source("-z"), -1.0, _pair("z"))


# ---------------------------------------------------------------------------
# continuity probes (maximal subspace evidence)
# ---------------------------------------------------------------------------

def test_continuity_probe_decays_for_vmoa_member():
    gen = Generator.from_source("i*z")
    probe = continuity_probe(gen, _pair("z"), (0.1, 0.01, 0.001))
    assert probe.trend == "decays"
    assert probe.values[0] / probe.values[-1] >= 8.0


def test_continuity_probe_floor_for_bmoa_only_member():
    gen = Generator.from_source("i*z")
    probe = continuity_probe(gen, _pair("log(e/(1 - z))"), (0.1, 0.01, 0.001))
    assert probe.trend == "floor"
    assert probe.floor >= 0.05


def test_vmoa_members_decay_under_every_corpus_semigroup():
    # verdict-level inclusion X_0 subset of the maximal subspace
    for gsrc in ("i*z", "-z"):
        gen = Generator.from_source(gsrc)
        probe = continuity_probe(gen, _pair("z"), (0.1, 0.01, 0.001))
        assert probe.trend == "decays"


def test_continuity_probe_requires_decreasing_times():
    gen = Generator.from_source("-z")
    with pytest.raises(ValueError):
        continuity_probe(gen, _pair("z"), (0.01, 0.1))


def test_dense_core_membership():
    gen = Generator.from_source("-z")
    for src in ("z", "z^2", "(0.5 - z)/(1 - 0.5*z)"):
        assert dense_core_test(gen, _pair(src)).in_core


# ---------------------------------------------------------------------------
# boundedness probes
# ---------------------------------------------------------------------------

def test_boundedness_probe_is_marked_as_probe():
    probe = boundedness_probe("z")
    assert probe.marker == "probe, not proof"
    assert len(probe.ratios) == len(STANDARD_FAMILY)


def test_bounded_symbol_shows_no_ratio_growth():
    # g = z: T_g is bounded on BMOA; refinement does not inflate the ratios
    probe = boundedness_probe("z")
    assert all(g <= 1.05 for g in probe.ratio_growth)
    assert all(r <= 2.0 for r in probe.ratios)


def test_zero_symbol_has_zero_ratios():
    probe = boundedness_probe("0")
    assert all(r == 0.0 for r in probe.ratios)


def test_log_symbol_ratio_growth_under_refinement():
    # g = log(e/(1-z)) is not a bounded BMOA symbol; at least one family
    # member's ratio keeps growing as the arc family is refined
    probe = boundedness_probe("log(e/(1 - z))", J_coarse=5, J_fine=9)
    assert max(probe.ratio_growth) >= 1.1

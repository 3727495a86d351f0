import numpy as np
import pytest

from nhswe.bathymetry import BedSample
from nhswe.closure import (CLOSURES, PhysParams, bottom_pressure,
                           closure_beta_gamma, phi, validate_closure)


def make_bed_sample(**kw):
    base = {k: np.zeros(3) for k in
            ("d", "d_x", "d_t", "d_tt", "d_xt", "d_xx")}
    base["d"] = np.ones(3)
    for k, v in kw.items():
        base[k] = np.full(3, v)
    return BedSample(**base)


def test_validate_closure():
    for kind in CLOSURES:
        assert validate_closure(kind) == kind
    with pytest.raises(ValueError):
        validate_closure("cubic")


def test_beta_gamma_flat_bed():
    d_x = np.zeros(4)
    assert np.all(closure_beta_gamma("linear", d_x)[0] == 2.0)
    assert np.all(closure_beta_gamma("quad-simple", d_x)[0] == 1.5)
    b, g = closure_beta_gamma("quad-full", d_x)
    assert np.all(b == 1.5) and np.all(g == 0.0)


def test_beta_gamma_sloped_bed():
    # frozen example: d_x = 1 gives beta = 6/5, gamma = 1/5
    b, g = closure_beta_gamma("quad-full", np.array([1.0]))
    assert b[0] == pytest.approx(1.2)
    assert g[0] == pytest.approx(0.2)
    with pytest.raises(ValueError):
        closure_beta_gamma("hydrostatic", np.zeros(2))


def test_phi_zero_when_bed_flat_and_static():
    bed = make_bed_sample()
    val = phi(np.full(3, 0.4), np.full(3, 0.1), np.full(3, 0.2), bed,
              PhysParams())
    assert np.all(val == 0.0)


def test_phi_vertical_acceleration_term():
    # frozen by hand: rho h / 4 * (-d_tt) with h = 0.1, d_tt = -7.848
    # gives 1000 * 0.1 / 4 * 7.848 = 196.2 Pa
    bed = make_bed_sample(d_tt=-7.848)
    val = phi(np.full(3, 0.1), np.zeros(3), np.zeros(3), bed, PhysParams())
    assert val[0] == pytest.approx(196.2)


def test_phi_slope_term():
    # rho h / (4 + d_x^2) * g d_x eta_x, hand value for h=0.4, d_x=1,
    # eta_x=0.4: 1000*0.4/5 * 9.81*0.4 = 313.92 Pa
    bed = make_bed_sample(d_x=1.0)
    val = phi(np.full(3, 0.4), np.zeros(3), np.full(3, 0.4), bed,
              PhysParams())
    assert val[0] == pytest.approx(313.92)


def test_phi_advective_terms():
    # u = hu/h enters through -2 u d_xt - u^2 d_xx
    h, hu = 0.5, 1.0           # u = 2
    bed = make_bed_sample(d_xt=0.3, d_xx=0.1)
    val = phi(np.full(3, h), np.full(3, hu), np.zeros(3), bed, PhysParams())
    expect = 1000.0 * h / 4.0 * (-2 * 2 * 0.3 - 4 * 0.1)
    assert val[0] == pytest.approx(expect)


def test_phi_linear_in_rho():
    bed = make_bed_sample(d_tt=0.7, d_x=0.2)
    a = phi(np.full(3, 0.3), np.full(3, 0.02), np.full(3, 0.1), bed,
            PhysParams(rho=1000.0))
    b = phi(np.full(3, 0.3), np.full(3, 0.02), np.full(3, 0.1), bed,
            PhysParams(rho=500.0))
    assert np.allclose(a, 2.0 * b)


def test_phi_dry_masked():
    bed = make_bed_sample(d_tt=1.0)
    wet = np.array([True, False, True])
    val = phi(np.full(3, 0.1), np.zeros(3), np.zeros(3), bed, PhysParams(),
              wet=wet)
    assert val[1] == 0.0 and val[0] != 0.0


def test_bottom_pressure_reductions():
    bed = make_bed_sample()
    p = np.full(3, 10.0)
    hp_x = np.full(3, 3.0)
    phi_val = np.full(3, 1.0)
    assert np.all(bottom_pressure("linear", p, hp_x, bed, phi_val) == 20.0)
    assert np.all(bottom_pressure("quad-simple", p, hp_x, bed, phi_val)
                  == 15.0)
    # flat bed quad-full: gamma = 0 but phi still enters
    assert np.all(bottom_pressure("quad-full", p, hp_x, bed, phi_val)
                  == 16.0)


def test_bottom_pressure_slope_coupling():
    bed = make_bed_sample(d_x=2.0)      # beta = 6/8, gamma = 2/8
    out = bottom_pressure("quad-full", np.full(3, 8.0), np.full(3, 4.0),
                          bed, np.full(3, 0.5))
    assert out[0] == pytest.approx(0.75 * 8.0 + 0.25 * 4.0 + 0.5)


def test_phys_params_validation():
    with pytest.raises(ValueError):
        PhysParams(g=-1.0)
    with pytest.raises(ValueError):
        PhysParams(rho=0.0)

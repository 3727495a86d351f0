"""End-to-end acceptance checks for the solver.

Each test covers one headline requirement and prints a single summary
line.  The two full-length wave-tank runs are shared module fixtures; the
whole file takes a few minutes.
"""

import numpy as np
import pytest

from nhswe.dgmesh import Mesh1D
from nhswe.elliptic import EllipticCoefficients, solve_correction
from nhswe.predictor import H, HU
from nhswe.presets import get_preset
from nhswe.stepper import RunConfig, Simulation, run

G = 9.81


def report(name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def override(cfg, **kw):
    flat = cfg.to_flat()
    for key, val in kw.items():
        flat[key] = str(val)
    return RunConfig.from_flat(flat)


# -- shared full-length runs -------------------------------------------


@pytest.fixture(scope="module")
def hammack_runs():
    """Full 40 s hammack uplift runs (non-hydrostatic and hydrostatic),
    with interior/total mass histories sampled along the way."""
    out = {}
    for closure in ("quad-full", "hydrostatic"):
        cfg = override(get_preset("hammack-up"), closure=closure)
        sim = Simulation(cfg)
        x_sponge = cfg.x_r * (1.0 - cfg.sponge_frac)
        t_hist = [0.0]
        interior = [sim.mass_in(cfg.x_l, x_sponge)]
        total = [sim.mass()]
        n_steps = int(round(cfg.t_end / cfg.dt))
        for i in range(n_steps):
            sim.step()
            if (i + 1) % 200 == 0:
                t_hist.append(sim.t)
                interior.append(sim.mass_in(cfg.x_l, x_sponge))
                total.append(sim.mass())
        out[closure] = {
            "config": cfg,
            "gauges": {xg: (np.asarray(sim._gauge_t),
                            np.asarray(sim._gauge_eta[i]))
                       for i, xg in enumerate(cfg.gauges)},
            "t": np.asarray(t_hist),
            "interior": np.asarray(interior),
            "total": np.asarray(total),
        }
    return out


@pytest.fixture(scope="module")
def lynett_closure_runs():
    out = {}
    for closure in ("quad-full", "quad-simple"):
        cfg = override(get_preset("lynett"), closure=closure)
        out[closure] = run(cfg)
    return out


# -- criteria -----------------------------------------------------------


def test_well_balanced_lake_at_rest():
    # frozen slide on the sloping beach; 1000 steps must not stir the lake
    cfg = override(get_preset("lake-at-rest"), t_end=5.0,
                   snapshot_times="")
    sim = Simulation(cfg)
    sim.run()
    hu_max = np.abs(sim.q[HU]).max()
    report("well-balancedness", hu_max < 1e-10,
           f"max |hu| = {hu_max:.3e} m^2/s after 1000 steps "
           f"(threshold 1e-10)")


def test_mass_conservation_hammack(hammack_runs):
    data = hammack_runs["quad-full"]
    # interior drift before any wave reaches the sponge zone (leading
    # front needs (28.44 - 0.61)/sqrt(g h0) = 39.7 s; cut at 36 s)
    sel = data["t"] <= 36.0
    interior = data["interior"][sel]
    drift_int = np.abs(interior - interior[0]).max() / interior[0]
    total = data["total"]
    drift_tot = np.abs(total - total[0]).max() / total[0]
    report("mass conservation", drift_int < 1e-8,
           f"interior drift {drift_int:.3e} (threshold 1e-8), "
           f"whole-domain drift incl. sponge {drift_tot:.3e}")


def test_elliptic_identities_lynett():
    cfg = override(get_preset("lynett"), snapshot_times="")
    sim = Simulation(cfg)
    stats = {"skew": 0.0, "h1": np.inf, "h2": np.inf, "steps": 0}

    def check(co: EllipticCoefficients, step):
        wet = co.wet
        stats["skew"] = max(stats["skew"],
                            float(np.abs(co.g1[wet] + co.g2[wet]).max()))
        stats["h1"] = min(stats["h1"], float(co.h1[wet].min()))
        stats["h2"] = min(stats["h2"], float(co.h2[wet].min()))
        stats["steps"] = step

    sim.on_coefficients = check
    sim.run()
    ok = stats["skew"] < 1e-14 and stats["h1"] > 0 and stats["h2"] > 0
    report("elliptic identities", ok,
           f"over {stats['steps']} steps: max|g1+g2| = {stats['skew']:.2e} "
           f"(threshold 1e-14), min h1 = {stats['h1']:.3e}, "
           f"min h2 = {stats['h2']:.3e} (both must be positive)")


def test_closure_reduction_flat_bed():
    results = {}
    for closure in ("quad-full", "quad-simple"):
        cfg = override(get_preset("standing-wave"), t_end=10.0,
                       closure=closure, gauges="")
        results[closure] = run(cfg)
    a = results["quad-full"].state
    b = results["quad-simple"].state
    diff = max(np.abs(a.h.coef - b.h.coef).max(),
               np.abs(a.hu.coef - b.hu.coef).max(),
               np.abs(a.hw.coef - b.hw.coef).max())
    report("closure reduction on flat bed", diff < 1e-12,
           f"L-inf state difference quad-full vs quad-simple after 10 s: "
           f"{diff:.3e} (threshold 1e-12)")


def _standing_wave_mean_h(n, dt):
    cfg = override(get_preset("standing-wave"), n=n, dt=dt, t_end=1.0,
                   closure="hydrostatic", gauges="")
    return run(cfg).state.h.coef[:, 0]


def test_convergence_predictor():
    base_n, base_dt = 16, 0.01
    sols = [_standing_wave_mean_h(base_n * 2 ** lev, base_dt / 2 ** lev)
            for lev in range(3)]
    errs = []
    for lev in range(2):
        coarse = sols[lev]
        fine = sols[lev + 1].reshape(-1, 2).mean(axis=1)
        dx = 2.0 * np.pi / (base_n * 2 ** lev)
        errs.append(np.sqrt(np.sum((fine - coarse) ** 2) * dx))
    order = np.log2(errs[0] / errs[1])
    report("predictor convergence", order >= 1.8,
           f"self-convergence order in h = {order:.3f} (threshold 1.8)")


def _manufactured_error(n):
    mesh = Mesh1D(0.0, 1.0, n)
    xq = mesh.quad_points()
    p_ex = np.cos(0.5 * np.pi * xq)
    u_ex = np.sin(np.pi * xq)
    p_x = -0.5 * np.pi * np.sin(0.5 * np.pi * xq)
    u_x = np.pi * np.cos(np.pi * xq)
    g1 = 0.3 + 0.1 * np.sin(2 * np.pi * xq)
    h1 = 2.0 + np.cos(xq)
    h2 = 1.0 + 0.5 * np.sin(xq)
    co = EllipticCoefficients(
        g1=g1, g2=-g1, h1=h1, h2=h2,
        f1=p_x + g1 * p_ex + h1 * u_ex,
        f2=u_x + h2 * p_ex - g1 * u_ex,
        wet=np.ones(n, dtype=bool))
    sol = solve_correction(co, mesh, ("wall", "open"))
    w = 0.5 * mesh.dx
    return (np.sqrt(np.sum(w * (sol.p.nodal() - p_ex) ** 2)),
            np.sqrt(np.sum(w * (sol.hu.nodal() - u_ex) ** 2)))


def test_convergence_elliptic():
    errs = np.array([_manufactured_error(n) for n in (16, 32, 64)])
    orders = np.log2(errs[:-1] / errs[1:])
    op, ou = orders[:, 0].min(), orders[:, 1].min()
    report("elliptic convergence", op >= 1.8 and ou >= 1.8,
           f"manufactured-solution orders: p = {op:.3f}, hu = {ou:.3f} "
           f"(threshold 1.8)")


def test_corrector_residual_all_scenarios():
    worst = {}
    for name in ("hammack-up", "hammack-down", "whittaker-12", "lynett"):
        cfg = get_preset(name)
        cfg = override(cfg, t_end=50 * cfg.dt, check_residual="true",
                       gauges="", snapshot_times="")
        res = run(cfg)
        worst[name] = res.max_corrector_residual
    top = max(worst.values())
    report("corrector residual", top < 1e-9,
           "max relative residual of the discrete pressure equation over "
           "50 steps per scenario: "
           + ", ".join(f"{k}={v:.2e}" for k, v in worst.items())
           + " (threshold 1e-9)")


def _measured_period(closure):
    cfg = override(get_preset("standing-wave"), t_end=8.0, closure=closure)
    res = run(cfg)
    t, eta = res.gauges[0].t, res.gauges[0].eta
    sign = np.sign(eta)
    cross = np.flatnonzero(np.diff(sign) != 0)
    return 2.0 * np.diff(t[cross]).mean()


def test_dispersion():
    h0, kh = 1.0, 0.5
    k = kh / h0
    # linearized model: omega^2 = g h k^2 / (1 + (k h)^2 / (2 beta)),
    # quadratic closure beta = 3/2
    om_exact = np.sqrt(G * h0 * k * k / (1.0 + kh * kh / 3.0))
    t_nh = _measured_period("quad-full")
    t_hy = _measured_period("hydrostatic")
    om_nh = 2.0 * np.pi / t_nh
    om_hy = 2.0 * np.pi / t_hy
    rel = abs(om_nh - om_exact) / om_exact
    ok = rel < 0.02 and om_hy > om_nh
    report("dispersion", ok,
           f"measured omega = {om_nh:.4f} vs analytic {om_exact:.4f} "
           f"rad/s (rel. error {rel:.2%}, tolerance 2%); hydrostatic "
           f"omega = {om_hy:.4f} exceeds non-hydrostatic: {om_hy > om_nh}")


def _trailing_sign_changes(t, eta):
    i_crest = int(np.argmax(eta))
    tail = eta[i_crest:]
    tail = tail[np.abs(tail) > 1e-3 * eta.max()]   # ignore noise band
    return int(np.sum(np.diff(np.sign(tail)) != 0))


def test_hammack_qualitative(hammack_runs):
    nh = hammack_runs["quad-full"]["gauges"]
    hy = hammack_runs["hydrostatic"]["gauges"]
    t_nh, eta_nh = nh[20.61]
    t_hy, eta_hy = hy[20.61]
    osc_nh = _trailing_sign_changes(t_nh, eta_nh)
    osc_hy = _trailing_sign_changes(t_hy, eta_hy)
    t9, eta9 = nh[9.61]
    arrival = t9[np.argmax(eta9 > 0.2 * eta9.max())]
    expect = (9.61 - 0.61) / np.sqrt(G * 0.05)
    rel = abs(arrival - expect) / expect
    ok = osc_nh >= 3 and osc_hy < osc_nh and rel < 0.10
    report("hammack wave-train reproduction", ok,
           f"trailing sign changes at x=20.61 m: non-hydrostatic "
           f"{osc_nh} (>= 3), hydrostatic {osc_hy} (fewer); arrival at "
           f"x=9.61 m: {arrival:.2f} s vs {expect:.2f} s "
           f"({rel:.1%}, tolerance 10%)")


def test_lynett_closure_divergence(lynett_closure_runs):
    full = lynett_closure_runs["quad-full"].snapshots
    simple = lynett_closure_runs["quad-simple"].snapshots

    def l2(ts):
        a, b = full[ts]["eta"], simple[ts]["eta"]
        return np.sqrt(np.mean((a - b) ** 2))

    early, late = l2(1.51), l2(5.86)
    ratio = late / early
    report("simplified-closure degradation", ratio > 10.0,
           f"L2(quad-full - quad-simple) grows from {early:.3e} at "
           f"t=1.51 s to {late:.3e} at t=5.86 s (ratio {ratio:.1f}, "
           f"threshold 10x)")

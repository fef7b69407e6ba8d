"""Exit criteria. Each test records one PASS/FAIL line, shown in the terminal summary."""

import csv
import math
import time

import numpy as np

from commonmodes import fock_oracle as fo
from commonmodes.cli import main, overlap_scan
from commonmodes.config import load_config
from commonmodes.dynamics import (
    SpacetimePoint,
    cross_amplitude,
    cross_amplitude_double_sum,
    enclosing_box,
    gaussian_wavepacket,
    position_grid,
    propagate,
    propagate_many,
)
from commonmodes.interference import (
    detection_probability,
    overlap_set,
    position_sweep,
    state_norm_literal,
    totals,
)
from commonmodes.momentum_modes import MomentumGrid, make_gaussian

from conftest import ACCEPTANCE_LINES, random_distribution, random_modes


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_1_oracle_equivalence():
    rng = np.random.default_rng(1)
    grid = MomentumGrid.uniform(-3.0, 3.0, 24)
    start = time.perf_counter()
    worst = 0.0
    n_pairs = n_points = 0
    for pair in range(24):
        m_total = 2 + pair % 7  # joint mode count cycles through 2..8
        joint = rng.choice(grid.size, size=m_total, replace=False)
        n_eta = rng.integers(1, m_total + 1)
        eta_idx = joint[:n_eta]
        # mu always covers what eta leaves out, sometimes sharing modes with eta
        mu_idx = np.union1d(joint[n_eta:], rng.choice(eta_idx, size=rng.integers(0, n_eta + 1), replace=False))
        if len(mu_idx) == 0:
            mu_idx = eta_idx[:1]
        eta = random_distribution(rng, grid, eta_idx)
        mu = random_distribution(rng, grid, mu_idx)
        prob = fo.from_distributions(eta, mu)
        assert prob.modes.count == m_total
        for _ in range(100):
            at = SpacetimePoint(rng.uniform(-10, 10, 1), rng.uniform(0, 10))
            analytic = detection_probability(eta, mu, at).total
            oracle = prob.density(at)
            # 1.0 means exactly at tolerance: relative 1e-10 with a 1e-14 absolute floor
            worst = max(worst, abs(analytic - oracle) / max(1e-10 * abs(oracle), 1e-14))
            n_points += 1
        n_pairs += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1.0 and elapsed < 30 and n_pairs >= 20
    record(1, "oracle equivalence", ok,
           f"{n_pairs} pairs, {n_points} points, worst deviation {worst:.2e} x tolerance, {elapsed:.1f} s (< 30 s)")


def test_2_identical_sources():
    rng = np.random.default_rng(2)
    grid = MomentumGrid.uniform(-10.0, 10.0, 512)
    g = make_gaussian(grid, 0.5, 1.0, 0.0)
    worst = 0.0
    for _ in range(50):
        at = SpacetimePoint(rng.uniform(-5, 5, 1), rng.uniform(0, 5))
        res = detection_probability(g, g, at)
        worst = max(worst, abs(res.total - 2 * abs(propagate(g, at)) ** 2))
    record(2, "identical-source identity", worst <= 1e-10, f"max |total - 2|psi|^2| = {worst:.2e} (<= 1e-10)")


def test_3_no_common_modes():
    grid = MomentumGrid.uniform(-16.0, 16.0, 512)
    a = make_gaussian(grid, -10.0, 1.0, 0.0)
    b = make_gaussian(grid, 10.0, 1.0, 0.0)
    xs = np.linspace(-10, 10, 101)
    worst_i = worst_t = 0.0
    for t in (0.0, 1.0):
        res = position_sweep(a, b, xs, t)
        dens = np.abs(propagate_many(a, xs, t)) ** 2 + np.abs(propagate_many(b, xs, t)) ** 2
        worst_i = max(worst_i, max(abs(r.interference) for r in res))
        worst_t = max(worst_t, float(np.max(np.abs(totals(res) - dens))))
    ok = worst_i < 1e-10 and worst_t <= 1e-9
    record(3, "no-common-modes nullity", ok,
           f"max |interference| = {worst_i:.2e} (< 1e-10), max |total - sum| = {worst_t:.2e} (<= 1e-9)")


def test_4_particle_number():
    grid = MomentumGrid.uniform(-10.0, 10.0, 512)
    a = make_gaussian(grid, 0.0, 1.0, 0.0)
    b = make_gaussian(grid, 1.0, 1.0, -1.0)
    c = abs(overlap_set(a, b).c)
    assert 0 < c < 1
    devs = []
    for t in (0.0, 0.5, 2.0):
        pts, w = position_grid(enclosing_box([a, b], t), 4001)
        devs.append(abs(totals(position_sweep(a, b, pts, t)).sum() * w - 2.0))
    record(4, "particle-number conservation", max(devs) <= 1e-6,
           f"|c| = {c:.3f}, deviations at t=0,0.5,2: " + ", ".join(f"{d:.1e}" for d in devs) + " (<= 1e-6)")


def test_5_norm_collapse():
    rng = np.random.default_rng(5)
    grid = MomentumGrid.uniform(-4.0, 4.0, 48)
    worst = 0.0
    for i in range(20):
        if i % 2:
            a, b = random_distribution(rng, grid), random_distribution(rng, grid)
        else:
            a, b = random_modes(rng, grid, 6), random_modes(rng, grid, 6)
        ov = overlap_set(a, b)
        worst = max(worst, abs(state_norm_literal(a, b) - (1 + abs(ov.c) ** 2)))
    record(5, "norm collapse", worst <= 1e-10, f"max |literal - (1 + |c|^2)| = {worst:.2e} (<= 1e-10)")


def test_6_factorization():
    rng = np.random.default_rng(6)
    grid = MomentumGrid.uniform(-3.0, 3.0, 24)
    a, b = random_modes(rng, grid, 4), random_modes(rng, grid, 4)
    worst = 0.0
    for _ in range(10):
        at = SpacetimePoint(rng.uniform(-8, 8, 1), rng.uniform(-3, 8))
        worst = max(worst, abs(cross_amplitude(a, b, at).value - cross_amplitude_double_sum(a, b, at)))
    record(6, "cross-function factorization", worst <= 1e-12, f"max deviation {worst:.2e} (<= 1e-12)")


def test_7_gaussian_closed_form():
    grid = MomentumGrid.uniform(-10.0, 10.0, 512)
    p0, s, x0 = 1.0, 1.0, 0.5
    g = make_gaussian(grid, p0, s, x0)
    sx = 1 / (2 * s)
    worst_amp = worst_mom = 0.0
    for t in np.linspace(0.0, 3.0, 7):
        pts, w = position_grid(2 * enclosing_box([g], t), 4001)
        psi = propagate_many(g, pts, t)
        ref = gaussian_wavepacket(pts, t, p0, s, x0)
        worst_amp = max(worst_amp, float(np.max(np.abs(psi - ref))))
        dens = np.abs(psi) ** 2 * w
        x = pts[:, 0]
        mean = np.sum(x * dens) / dens.sum()
        width = math.sqrt(np.sum((x - mean) ** 2 * dens) / dens.sum())
        worst_mom = max(worst_mom, abs(mean - (x0 + p0 * t)), abs(width - math.hypot(sx, s * t)))
    ok = worst_amp <= 1e-8 and worst_mom <= 1e-8
    record(7, "free-Gaussian closed form", ok,
           f"max amplitude error {worst_amp:.2e}, max drift/spread error {worst_mom:.2e} (<= 1e-8)")


SCAN_CONFIG = """
grid.lower = [-10.0]
grid.upper = [30.0]
grid.counts = [1024]
source_eta.kind = "gaussian"
source_eta.center = [0.0]
source_eta.width = 1.0
source_mu.kind = "gaussian"
source_mu.center = [0.0]
source_mu.width = 1.0
evaluation.kind = "sweep"
evaluation.box_lower = [-8.0]
evaluation.box_upper = [8.0]
evaluation.box_counts = [161]
evaluation.times = [0.0, 1.0]
"""


def test_8_overlap_scan(tmp_path):
    path = tmp_path / "scan.toml"
    path.write_text(SCAN_CONFIG)
    config = load_config(path)
    seps = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 20.0]
    _, rows = overlap_scan(config, seps)
    sigma = 1.0
    c_err = max(abs(c - math.exp(-sep**2 / (8 * sigma**2))) for sep, c, _, _ in rows)
    tail = [r[3] for r in rows if r[0] >= 2 * sigma]
    monotone = all(b < a for a, b in zip(tail, tail[1:]))
    ok = c_err <= 1e-6 and monotone and rows[-1][3] < 1e-10
    record(8, "overlap scan", ok,
           f"max |c| error {c_err:.2e} (<= 1e-6), max|interference| decreasing past 2 sigma: {monotone}, "
           f"at 20 sigma {rows[-1][3]:.1e}")


RUN_CONFIG = """
grid.lower = [-10.0]
grid.upper = [10.0]
grid.counts = [512]
source_eta.kind = "gaussian"
source_eta.center = [0.0]
source_eta.width = 1.0
source_eta.carrier_phase = [-1.0]
source_mu.kind = "gaussian"
source_mu.center = [1.0]
source_mu.width = 0.8
source_mu.carrier_phase = [1.0]
evaluation.kind = "sweep"
evaluation.box_lower = [-6.0]
evaluation.box_upper = [6.0]
evaluation.box_counts = [121]
evaluation.times = [0.0, 0.7, 2.0]
"""


def test_9_cli_determinism(tmp_path):
    cfg = tmp_path / "exp.toml"
    cfg.write_text(RUN_CONFIG)
    outs = [tmp_path / "a.csv", tmp_path / "b.csv"]
    codes = [main(["run", str(cfg), "--output", str(o), "--quiet"]) for o in outs]
    identical = outs[0].read_bytes() == outs[1].read_bytes()
    with open(outs[0]) as fh:
        reader = csv.DictReader(ln for ln in fh if not ln.startswith("#"))
        rows = list(reader)
    bad = sum(
        float(r["total"]) != (float(r["term_mu_mu"]) + float(r["term_eta_eta"])) + float(r["interference"])
        for r in rows)
    ok = codes == [0, 0] and identical and bad == 0 and len(rows) == 363
    record(9, "CLI determinism and row sums", ok,
           f"exit codes {codes}, byte-identical: {identical}, {len(rows)} rows, {bad} row-sum violations")


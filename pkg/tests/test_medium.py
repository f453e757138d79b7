import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fastlight.medium import (
    LineComponent,
    MediumChannel,
    advance_upper_bound,
    advancement_curve,
    evaluate_k,
    gain_spectrum,
    group_delay_analytic,
    intensity_gain,
    vacuum_channel,
)

from conftest import L_CELL, TWO_PI_MHZ, gain_line

HWHM = 20 * TWO_PI_MHZ

line_st = st.builds(
    LineComponent,
    center_detuning=st.floats(-60, 60).map(lambda x: x * TWO_PI_MHZ),
    hwhm=st.floats(5, 50).map(lambda x: x * TWO_PI_MHZ),
    strength=st.one_of(st.floats(20, 300), st.floats(-300, -20)),
)


def test_line_validation():
    with pytest.raises(ValueError, match="hwhm must be positive"):
        LineComponent(0.0, 0.0, 1.0)
    with pytest.raises(ValueError, match="nonzero"):
        LineComponent(0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        MediumChannel(0.0)
    with pytest.raises(ValueError):
        MediumChannel(1.0, background_index=0.99)


def test_center_gain_anchor(seed_line_channel):
    g = intensity_gain(seed_line_channel, 0.0)
    assert g == pytest.approx(math.exp(175 * L_CELL), rel=1e-12)
    assert g == pytest.approx(19.59, abs=0.01)
    # about 20 when rounded
    assert abs(g - 20) / 20 < 0.03


def test_vacuum_channel_is_zero():
    ch = vacuum_channel(L_CELL)
    assert evaluate_k(ch, 1e8) == 0
    assert group_delay_analytic(ch, -3e7) == 0


@given(st.lists(line_st, min_size=2, max_size=4), st.floats(-100, 100))
def test_k_is_sum_of_lines(lines, det_mhz):
    d = det_mhz * TWO_PI_MHZ
    total = evaluate_k(MediumChannel(L_CELL, lines), d)
    parts = sum(evaluate_k(MediumChannel(L_CELL, [ln]), d) for ln in lines)
    assert abs(total - parts) <= 1e-12 * max(1.0, abs(parts))


def test_center_group_delay(seed_line_channel):
    expected = 175 * L_CELL / (2 * HWHM)
    assert group_delay_analytic(seed_line_channel, 0.0) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(11.84e-9, rel=1e-3)
    h = HWHM * 1e-4
    fd = L_CELL * (evaluate_k(seed_line_channel, h) - evaluate_k(seed_line_channel, -h)).real / (2 * h)
    assert fd == pytest.approx(expected, rel=1e-6)


def test_wing_extremum_by_grid_search(seed_line_channel):
    grid = np.linspace(0.5, 5, 200001) * HWHM
    gd = group_delay_analytic(seed_line_channel, grid)
    i = np.argmin(gd)
    assert grid[i] == pytest.approx(math.sqrt(3) * HWHM, rel=1e-4)
    assert gd[i] == pytest.approx(-175 * L_CELL / (16 * HWHM), rel=1e-8)
    assert gd[i] == pytest.approx(-1.48e-9, rel=1e-2)


@given(line_st, st.floats(-100, 100))
def test_derivative_matches_finite_difference(line, det_mhz):
    ch = MediumChannel(L_CELL, [line, gain_line(-60.0, 30.0, 10.0)])
    d = det_mhz * TWO_PI_MHZ
    h = min(ln.hwhm for ln in ch.lines) * 1e-5
    fd = L_CELL * (evaluate_k(ch, d + h) - evaluate_k(ch, d - h)).real / (2 * h)
    ana = group_delay_analytic(ch, d)
    scale = max(abs(ana), 1e-3 * advance_upper_bound(ch))
    assert abs(fd - ana) <= 1e-6 * scale


@given(line_st)
def test_sign_physics(line):
    ch = MediumChannel(L_CELL, [line])
    c, g = line.center_detuning, line.hwhm
    at_center = group_delay_analytic(ch, c)
    wings = group_delay_analytic(ch, np.array([c - math.sqrt(3) * g, c + math.sqrt(3) * g]))
    if line.strength > 0:
        assert at_center > 0 and np.all(wings < 0)
    else:
        assert at_center < 0 and np.all(wings > 0)


@given(line_st)
def test_gain_anchor_at_isolated_center(line):
    ch = MediumChannel(L_CELL, [line])
    g = intensity_gain(ch, line.center_detuning)
    assert g == pytest.approx(math.exp(line.strength * L_CELL), rel=1e-12)


def test_gain_spectrum_consistency(conjugate_pair_channel):
    grid = np.linspace(-80, 80, 161) * TWO_PI_MHZ
    spec = gain_spectrum(conjugate_pair_channel, grid)
    assert len(spec) == grid.size
    for s in spec:
        assert s.intensity_gain > 0
        assert s.intensity_gain == pytest.approx(math.exp(-2 * s.k_complex.imag * L_CELL), rel=1e-12)
        assert s.group_delay == pytest.approx(group_delay_analytic(conjugate_pair_channel, s.detuning))
    gains = np.array([s.intensity_gain for s in spec])
    # gain peak near the gain line, dip on the blue wing
    assert grid[np.argmax(gains)] < 0
    assert gains[grid > 20 * TWO_PI_MHZ].min() < 1


def test_gain_spectrum_edge_cases(conjugate_pair_channel):
    with pytest.raises(ValueError, match="empty grid"):
        gain_spectrum(conjugate_pair_channel, [])
    with pytest.raises(ValueError):
        gain_spectrum(conjugate_pair_channel, [1.0, 0.0])
    one = gain_spectrum(conjugate_pair_channel, [1e7])
    assert len(one) == 1
    assert one[0].intensity_gain == pytest.approx(intensity_gain(conjugate_pair_channel, 1e7))
    vac = gain_spectrum(vacuum_channel(L_CELL), np.linspace(-1e8, 1e8, 11))
    assert all(s.intensity_gain == 1 and s.group_delay == 0 for s in vac)


def test_advancement_curve_mirrors_group_delay(seed_line_channel):
    grid = np.array([0.0, math.sqrt(3) * HWHM])
    curve = advancement_curve(seed_line_channel, grid)
    assert curve[0][1] < 0 < curve[1][1]
    assert curve[1][1] == pytest.approx(-group_delay_analytic(seed_line_channel, grid[1]))
    assert all(a == 0 for _, a in advancement_curve(vacuum_channel(L_CELL), grid))


def test_advancement_never_exceeds_linear_bound(conjugate_pair_channel):
    grid = np.linspace(-300, 300, 60001) * TWO_PI_MHZ
    peak = max(a for _, a in advancement_curve(conjugate_pair_channel, grid))
    bound = advance_upper_bound(conjugate_pair_channel)
    assert peak <= bound * (1 + 1e-12)
    assert bound == pytest.approx(7.067e-9, rel=1e-3)


def test_background_index_adds_constant_delay():
    ch = MediumChannel(L_CELL, background_index=1.0 + 1e-4)
    assert group_delay_analytic(ch, 0.0) == pytest.approx(1e-4 * L_CELL / 299792458.0)

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from overbarrier.errors import (
    AboveBarrierError,
    DomainError,
    PoleEvaluationError,
    TabulatedUsageError,
)
from overbarrier.potentials import (
    Family,
    FourierSeriesParams,
    PhysicalScales,
    PotentialSpec,
    TabulatedParams,
    eval_shape,
    eval_shape_derivative,
    fourier_spec_from_json,
    fourier_spec_to_json,
    load_tabulated,
    nondimensionalize,
    tail_values,
    taper_envelope,
)


def test_nondimensionalize_direct_substitution():
    spec = nondimensionalize(PhysicalScales(4.0, 1.0, 1.0), Family.FERMI_STEP)
    assert spec.delta == pytest.approx(0.25, abs=0)
    assert spec.eps == pytest.approx(0.5, abs=0)
    assert spec.family is Family.FERMI_STEP

    spec = nondimensionalize(PhysicalScales(100.0, 1.0, 10.0), Family.GAUSSIAN_BUMP)
    assert spec.delta == pytest.approx(0.01)
    assert spec.eps == pytest.approx(0.01)


def test_nondimensionalize_rejects_at_or_below_barrier():
    with pytest.raises(AboveBarrierError, match="above-barrier"):
        nondimensionalize(PhysicalScales(1.0, 1.0, 1.0), Family.FERMI_STEP)
    with pytest.raises(AboveBarrierError):
        nondimensionalize(PhysicalScales(0.5, 1.0, 1.0), Family.FERMI_STEP)


def test_spec_validation():
    with pytest.raises(AboveBarrierError):
        PotentialSpec(Family.FERMI_STEP, 1.0, 0.5)
    with pytest.raises(DomainError):
        PotentialSpec(Family.FERMI_STEP, 0.5, -1.0)
    with pytest.raises(DomainError):
        PotentialSpec(Family.FOURIER_SERIES, 0.5, 1.0)  # missing params


def test_shape_values_at_reference_points():
    fermi = PotentialSpec(Family.FERMI_STEP, 0.25, 0.5)
    assert eval_shape(fermi, 0.0) == pytest.approx(0.5)
    sech2 = PotentialSpec(Family.SECH_SQUARED, 0.25, 0.5)
    assert eval_shape(sech2, 0.0) == pytest.approx(1.0)
    gauss = PotentialSpec(Family.GAUSSIAN_BUMP, 0.25, 0.5)
    # continued to z = i/eps the bump grows to e^{+1}
    assert eval_shape(gauss, 1j / 0.5) == pytest.approx(np.e)


def test_shape_derivative_reference_points():
    sech2 = PotentialSpec(Family.SECH_SQUARED, 0.25, 0.5)
    assert eval_shape_derivative(sech2, 0.0) == pytest.approx(0.0, abs=1e-15)
    gauss = PotentialSpec(Family.GAUSSIAN_BUMP, 0.25, 0.5)
    assert eval_shape_derivative(gauss, 1.0 / 0.5) == pytest.approx(-2.0 / np.e)
    fermi = PotentialSpec(Family.FERMI_STEP, 0.25, 0.5)
    assert eval_shape_derivative(fermi, 0.0) == pytest.approx(0.25)


_FAMILY_BOXES = [
    (Family.FERMI_STEP, 2.5, 2.4),     # poles at Im u = (2n+1) pi
    (Family.SECH_SQUARED, 2.5, 1.2),   # poles at Im u = (n + 1/2) pi
    (Family.GAUSSIAN_BUMP, 3.0, 3.0),  # entire
]


@settings(max_examples=40, deadline=None)
@given(re=st.floats(-1.0, 1.0), im=st.floats(-1.0, 1.0), pick=st.integers(0, 2))
def test_derivative_matches_finite_differences(re, im, pick):
    family, re_max, im_max = _FAMILY_BOXES[pick]
    spec = PotentialSpec(family, 0.3, 1.0)  # eps = 1 so z == u
    u = complex(re * re_max, im * im_max)
    h = 1e-5
    fd = (eval_shape(spec, u + h) - eval_shape(spec, u - h)) / (2.0 * h)
    exact = eval_shape_derivative(spec, u)
    scale = max(abs(exact), abs(eval_shape(spec, u)), 1e-3)
    assert abs(fd - exact) / scale < 1e-8


@pytest.mark.parametrize("family", [Family.FERMI_STEP, Family.SECH_SQUARED,
                                    Family.GAUSSIAN_BUMP])
def test_real_axis_values_bounded_by_one(family):
    spec = PotentialSpec(family, 0.5, 0.7)
    z = np.linspace(-80.0, 80.0, 4001)
    u = eval_shape(spec, z)
    assert np.all(np.abs(u.imag) < 1e-14)
    assert np.max(np.abs(u.real)) <= 1.0 + 1e-12


def test_tail_values():
    t = tail_values(PotentialSpec(Family.FERMI_STEP, 0.5, 1.0))
    assert (t.u_minus, t.u_plus) == (0.0, 1.0)
    t = tail_values(PotentialSpec(Family.SECH_SQUARED, 0.5, 1.0))
    assert (t.u_minus, t.u_plus) == (0.0, 0.0)
    t = tail_values(PotentialSpec(Family.GAUSSIAN_BUMP, 0.5, 1.0))
    assert (t.u_minus, t.u_plus) == (0.0, 0.0)
    mirrored = PotentialSpec(Family.FERMI_STEP, 0.5, 1.0).mirrored()
    t = tail_values(mirrored)
    assert (t.u_minus, t.u_plus) == (1.0, 0.0)


def test_mirror_reflects_analytic_shapes():
    spec = PotentialSpec(Family.FERMI_STEP, 0.4, 0.8)
    m = spec.mirrored()
    for z in (0.3, -1.2, 2.0 + 0.5j):
        assert eval_shape(m, z) == pytest.approx(eval_shape(spec, -z))
        assert eval_shape_derivative(m, z) == pytest.approx(
            -eval_shape_derivative(spec, -z))


def test_pole_guard():
    fermi = PotentialSpec(Family.FERMI_STEP, 0.5, 1.0)
    with pytest.raises(PoleEvaluationError):
        eval_shape(fermi, 1j * np.pi)
    sech2 = PotentialSpec(Family.SECH_SQUARED, 0.5, 1.0)
    with pytest.raises(PoleEvaluationError):
        eval_shape(sech2, 1j * np.pi / 2)


def test_tabulated_usage_errors_and_interpolation(tmp_path):
    z = np.linspace(-5, 5, 201)
    path = tmp_path / "shape.dat"
    lines = ["# sampled bump", "# z  U"]
    lines += [f"{zi} {np.exp(-zi**2)}" for zi in z]
    path.write_text("\n".join(lines))
    spec = load_tabulated(path, 0.3, 1.0)
    assert spec.family is Family.TABULATED
    assert eval_shape(spec, 0.7) == pytest.approx(np.exp(-0.49), rel=1e-6)
    with pytest.raises(TabulatedUsageError):
        eval_shape(spec, 0.5 + 0.1j)
    with pytest.raises(TabulatedUsageError):
        eval_shape(spec, 9.0)


def test_tabulated_grid_must_increase():
    with pytest.raises(DomainError):
        TabulatedParams(np.array([0.0, 1.0, 1.0, 2.0]), np.zeros(4))


def test_fourier_json_round_trip():
    params = FourierSeriesParams(np.array([0.1, 0.2]), np.array([1.5, 2.5]),
                                 np.array([0.3, 0.4]), 5.0, 40.0)
    spec = PotentialSpec(Family.FOURIER_SERIES, 0.2, 1.0, params)
    doc = fourier_spec_to_json(spec)
    back = fourier_spec_from_json(doc)
    assert back.delta == spec.delta and back.eps == spec.eps
    np.testing.assert_array_equal(back.params.amplitudes, params.amplitudes)
    np.testing.assert_array_equal(back.params.wavenumbers, params.wavenumbers)
    np.testing.assert_array_equal(back.params.phases, params.phases)
    assert json.loads(doc)["taper_width"] == 5.0


def test_fourier_envelope_on_axis_and_bare_series_off_axis():
    params = FourierSeriesParams(np.array([0.5]), np.array([1.0]),
                                 np.array([0.0]), 5.0, 40.0)
    spec = PotentialSpec(Family.FOURIER_SERIES, 0.2, 1.0, params)
    assert eval_shape(spec, -1.0) == 0.0          # outside support
    assert eval_shape(spec, 20.0) == pytest.approx(0.5 * np.cos(20.0))
    # off axis: bare series (continuation of the interior)
    val = eval_shape(spec, 20.0 + 1.0j)
    assert val == pytest.approx(0.5 * np.cos(20.0 + 1.0j))


def test_taper_envelope_profile():
    z = np.array([-1.0, 0.0, 2.5, 5.0, 20.0, 35.0, 37.5, 40.0, 41.0])
    env = taper_envelope(z, 40.0, 5.0)
    assert env[0] == 0.0 and env[-1] == 0.0
    assert env[1] == 0.0 and env[3] == pytest.approx(1.0)
    assert env[4] == 1.0
    assert env[2] == pytest.approx(0.5)
    assert env[6] == pytest.approx(0.5)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lnfisher.errors import DomainError
from lnfisher.fock import BeamSplitterSpec, TruncationSpec
from lnfisher.states import (
    PNR,
    DensityMatrixFock,
    OnOff,
    QubitEntangledState,
    four_mode_tap_oracle,
    local_flip,
    make_photon_subtracted_mixed,
    make_photon_subtracted_pure,
    make_qubit_state,
    make_squeezed,
    onoff_detection_probability,
    pnr_detection_probability,
    to_density_matrix,
)

LAMBDAS = [0.2, 0.4, 0.6]
TRANSMITTANCES = [0.7, 0.9]


# -- squeezed vacuum -------------------------------------------------------


def test_squeezed_vacuum_limit():
    s = make_squeezed(0.0)
    assert s.coeffs[0] == 1 and not s.coeffs[1:].any()


def test_squeezed_coefficients():
    s = make_squeezed(0.4)
    assert s.coeffs[0] == pytest.approx(0.916515, abs=1e-6)
    assert s.coeffs[1] == pytest.approx(0.366606, abs=1e-6)
    assert s.coeffs[0] == pytest.approx(math.sqrt(0.84), rel=1e-15)


@pytest.mark.parametrize("lam", [0.1, 0.5, 0.8])
def test_squeezed_norm_is_geometric_partial_sum(lam):
    s = make_squeezed(lam, TruncationSpec(25))
    assert s.norm_sq == pytest.approx(1 - lam ** (2 * 26), rel=1e-14)


@pytest.mark.parametrize("lam", [-0.1, 1.0, 1.5])
def test_squeezed_rejects_bad_lambda(lam):
    with pytest.raises(DomainError):
        make_squeezed(lam)


# -- PNR photon subtraction ------------------------------------------------


def test_pnr_probability_example():
    _, p = make_photon_subtracted_pure(0.4, BeamSplitterSpec(0.9))
    assert p == pytest.approx(2.30233e-3, rel=2e-6)


@pytest.mark.parametrize("lam, T", [(0.4, 0.9), (0.7, 0.8), (0.2, 0.5)])
def test_pnr_probability_against_series(lam, T):
    # sum_n alpha_n^2 xi_n1^4 = sum_n (1-l^2) l^2n n^2 T^(2n-2) R^2, summed directly
    R = 1 - T
    series = math.fsum((1 - lam**2) * lam ** (2 * n) * n * n * T ** (2 * n - 2) * R * R for n in range(1, 600))
    assert pnr_detection_probability(lam, T) == pytest.approx(series, rel=1e-12)


def test_pnr_coefficient_ratio():
    s, _ = make_photon_subtracted_pure(0.4, BeamSplitterSpec(0.9))
    assert s.coeffs[1] / s.coeffs[0] == pytest.approx(0.72, rel=1e-13)


@pytest.mark.parametrize("lam, T", [(0.3, 0.9), (0.6, 0.8), (0.9, 0.95)])
def test_pnr_ratio_recursion(lam, T):
    s, _ = make_photon_subtracted_pure(lam, BeamSplitterSpec(T))
    c = s.coeffs
    n = np.arange(c.size - 1)
    np.testing.assert_allclose(c[1:] / c[:-1], lam * T * (n + 2) / (n + 1), rtol=1e-12)
    assert s.norm_sq == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("lam, T", [(0.4, 0.9), (0.55, 0.9), (0.2, 0.7)])
def test_pnr_coefficients_decrease_below_half(lam, T):
    assert lam * T < 0.5
    s, _ = make_photon_subtracted_pure(lam, BeamSplitterSpec(T))
    assert np.all(np.diff(s.coeffs) < 0)


@pytest.mark.parametrize("T", [0.0, 1.0])
def test_pnr_degenerate_tap(T):
    with pytest.raises(DomainError):
        make_photon_subtracted_pure(0.4, BeamSplitterSpec(T))


def test_subtraction_from_vacuum_is_an_error():
    with pytest.raises(DomainError):
        make_photon_subtracted_pure(0.0, BeamSplitterSpec(0.9))
    with pytest.raises(DomainError):
        make_photon_subtracted_mixed(0.0, BeamSplitterSpec(0.9))
    with pytest.raises(DomainError):
        four_mode_tap_oracle(0.0, BeamSplitterSpec(0.9), None, OnOff())


# -- on/off photon subtraction ---------------------------------------------


def test_onoff_norm_example():
    mix = make_photon_subtracted_mixed(0.4, BeamSplitterSpec(0.9))
    assert mix.norm == pytest.approx(2.45671e-3, rel=3e-6)
    assert onoff_detection_probability(0.4, 0.9) == pytest.approx(2.45671e-3, rel=3e-6)


@pytest.mark.parametrize("lam, T", [(0.4, 0.9), (0.8, 0.7), (0.3, 0.95)])
def test_onoff_probability_against_series(lam, T):
    # both detectors click: sum_n alpha_n^2 (1 - T^n)^2
    series = math.fsum((1 - lam**2) * lam ** (2 * n) * (1 - T**n) ** 2 for n in range(1, 2000))
    assert onoff_detection_probability(lam, T) == pytest.approx(series, rel=1e-12)


@pytest.mark.parametrize("lam, T", [(0.4, 0.9), (0.6, 0.7)])
def test_onoff_norm_tracks_closed_form(lam, T):
    trunc = TruncationSpec.for_lambda(lam)
    mix = make_photon_subtracted_mixed(lam, BeamSplitterSpec(T), trunc, component_tol=1e-10)
    assert abs(mix.norm - onoff_detection_probability(lam, T)) <= trunc.tail_tol + 1e-10
    assert all(c.i >= 1 and c.j >= 1 for c in mix.components)
    assert 0 < mix.norm < 1


def test_onoff_component_amplitude():
    mix = make_photon_subtracted_mixed(0.4, BeamSplitterSpec(0.9))
    (c11,) = [c for c in mix.components if (c.i, c.j) == (1, 1)]
    assert c11.amps[0] == pytest.approx(0.0366606, abs=1e-7)
    assert c11.amps[0] == pytest.approx(math.sqrt(0.84) * 0.4 * 0.1, rel=1e-14)


def test_onoff_norm_vanishes_as_tap_closes():
    norms = [make_photon_subtracted_mixed(0.4, BeamSplitterSpec(T)).norm for T in (0.9, 0.99, 0.999)]
    assert norms[0] > norms[1] > norms[2]
    assert norms[2] < 1e-5


# -- four-mode oracle ------------------------------------------------------


@pytest.mark.parametrize("lam", LAMBDAS)
@pytest.mark.parametrize("T", TRANSMITTANCES)
def test_oracle_matches_pnr_constructor(lam, T):
    spec, trunc = BeamSplitterSpec(T), TruncationSpec.for_lambda(lam)
    rho, p = four_mode_tap_oracle(lam, spec, trunc, PNR(1))
    state, p_closed = make_photon_subtracted_pure(lam, spec, trunc)
    ours = to_density_matrix(state).embed(rho.dim_a, rho.dim_b)
    np.testing.assert_allclose(ours.matrix, rho.matrix, atol=1e-10, rtol=0)
    assert abs(p - p_closed) / p_closed <= 1e-10


@pytest.mark.parametrize("lam", LAMBDAS)
@pytest.mark.parametrize("T", TRANSMITTANCES)
def test_oracle_matches_onoff_constructor(lam, T):
    spec, trunc = BeamSplitterSpec(T), TruncationSpec.for_lambda(lam)
    rho, p = four_mode_tap_oracle(lam, spec, trunc, OnOff())
    mix = make_photon_subtracted_mixed(lam, spec, trunc, component_tol=0.0)
    ours = to_density_matrix(mix).embed(rho.dim_a, rho.dim_b)
    np.testing.assert_allclose(ours.matrix, rho.matrix, atol=1e-10, rtol=0)
    assert abs(p - onoff_detection_probability(lam, T)) / p <= 1e-10
    assert abs(p - mix.norm) / p <= 1e-12


def test_oracle_vacuum_pass_through():
    rho, p = four_mode_tap_oracle(0.0, BeamSplitterSpec(0.9), TruncationSpec(10), PNR(0))
    assert p == pytest.approx(1.0, abs=1e-14)
    assert rho.matrix[0, 0] == pytest.approx(1.0, abs=1e-14)
    assert np.abs(rho.matrix).sum() == pytest.approx(1.0, abs=1e-12)


def test_pnr_only_counts_zero_and_one():
    with pytest.raises(DomainError):
        PNR(2)


# -- density matrices ------------------------------------------------------


def test_vacuum_density_matrix():
    rho = to_density_matrix(make_squeezed(0.0))
    assert rho.matrix[0, 0] == 1
    assert np.count_nonzero(rho.matrix) == 1


def _all_states():
    spec = BeamSplitterSpec(0.8)
    return {
        "sq": to_density_matrix(make_squeezed(0.5)),
        "pnr": to_density_matrix(make_photon_subtracted_pure(0.5, spec)[0]),
        "onoff": to_density_matrix(make_photon_subtracted_mixed(0.5, spec)),
        "oracle": four_mode_tap_oracle(0.3, spec, None, OnOff())[0],
        "qubit": make_qubit_state(QubitEntangledState(0.6, 1.1, 0.7)),
        "qubit-flipped": make_qubit_state(QubitEntangledState(0.6, 1.1, 0.7), flipped=True),
    }


@pytest.mark.parametrize("name", list(_all_states()))
def test_density_matrix_invariants(name):
    rho = _all_states()[name]
    m = rho.matrix
    assert np.abs(m - m.conj().T).max() <= 1e-12
    assert abs(np.trace(m).real - 1) <= 1e-10
    assert np.linalg.eigvalsh(m).min() >= -1e-10
    rho.check()


def test_mixture_rank_equals_component_count():
    mix = make_photon_subtracted_mixed(0.45, BeamSplitterSpec(0.75), component_tol=1e-6)
    eig = np.linalg.eigvalsh(to_density_matrix(mix).matrix)
    assert np.count_nonzero(eig > 1e-12) == len(mix.components)


def test_density_check_rejects_non_hermitian():
    with pytest.raises(DomainError):
        DensityMatrixFock(np.array([[0.5, 0.3], [0.0, 0.5]]), 2, 1).check()


# -- qubit states ----------------------------------------------------------


def test_qubit_product_state():
    rho = make_qubit_state(QubitEntangledState(1.0, 0.0, 1.0))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1  # |0,1>
    np.testing.assert_allclose(rho.matrix, expected, atol=1e-15)


def test_qubit_fully_dephased_is_diagonal():
    rho = make_qubit_state(QubitEntangledState(0.3, 2.0, 0.0))
    m = rho.matrix
    assert np.abs(m - np.diag(np.diag(m))).max() == 0
    assert np.trace(m).real == pytest.approx(1.0, abs=1e-15)


def test_qubit_pure_bell_like_spectrum():
    rho = make_qubit_state(QubitEntangledState(1 / math.sqrt(2), 0.0, 1.0))
    np.testing.assert_allclose(np.linalg.eigvalsh(rho.matrix), [0, 0, 0, 1], atol=1e-14)
    assert np.abs(rho.matrix - rho.matrix.conj().T).max() == 0


def test_local_flip_involution_and_mapping():
    q = QubitEntangledState(0.35, 0.8, 0.65)
    rho = make_qubit_state(q)
    for mode in ("A", "B"):
        np.testing.assert_array_equal(local_flip(local_flip(rho, mode), mode).matrix, rho.matrix)
    flipped = make_qubit_state(q, flipped=True)
    np.testing.assert_allclose(local_flip(flipped, "B").matrix, rho.matrix, atol=1e-14, rtol=0)
    np.testing.assert_allclose(
        np.linalg.eigvalsh(local_flip(rho, "A").matrix), np.linalg.eigvalsh(rho.matrix), atol=1e-14
    )
    assert np.trace(local_flip(rho, "A").matrix).real == pytest.approx(1.0, abs=1e-15)


def test_local_flip_rejects_support_outside_qubit():
    rho = to_density_matrix(make_squeezed(0.3, TruncationSpec(10)))
    with pytest.raises(DomainError):
        local_flip(rho, "B")


@settings(max_examples=40, deadline=None)
@given(
    c0=st.floats(0, 1),
    phi=st.floats(0, 2 * math.pi, exclude_max=True),
    t=st.floats(0, 1),
    flipped=st.booleans(),
)
def test_qubit_state_is_valid(c0, phi, t, flipped):
    q = QubitEntangledState(c0, phi, t)
    assert q.c0_abs**2 + q.c1_abs**2 == pytest.approx(1.0, abs=1e-15)
    make_qubit_state(q, flipped).check()

import numpy as np
import pytest

from aptomit.params import apply_overrides
from aptomit.spectrum import (apt_defect, eigenfrequencies, ep_speed,
                              hamiltonian, sagnac_coefficient, sagnac_shift)


def test_sagnac_shift_linear_in_spin_speed(micro):
    s1 = sagnac_shift(micro, 100.0)
    s2 = sagnac_shift(micro, 200.0)
    assert s2.delta_sag == pytest.approx(2 * s1.delta_sag, rel=1e-12)
    assert s1.delta_plus == pytest.approx(micro.delta_c + s1.delta_sag)
    assert s1.delta_minus == pytest.approx(micro.delta_c - s1.delta_sag)


def test_sagnac_shift_rejects_negative_speed(micro):
    with pytest.raises(ValueError):
        sagnac_shift(micro, -1.0)


def test_sagnac_coefficient_dispersion_term(micro):
    # strong normal dispersion reduces the drag and can invert its sign
    flat = sagnac_coefficient(micro)
    dispersive = sagnac_coefficient(
        apply_overrides(micro, {"dn_dlambda": 0.2 * micro.n_ref
                                / micro.lambda_0}))
    assert dispersive < flat
    strong = apply_overrides(
        micro, {"dn_dlambda": 2.0 * micro.n_ref / micro.lambda_0})
    assert sagnac_coefficient(strong) < 0.0
    with pytest.raises(ValueError):
        ep_speed(strong)


def test_ep_condition_shift_equals_backscattering(micro):
    w_ep = ep_speed(micro)
    assert sagnac_shift(micro, w_ep).delta_sag == pytest.approx(
        micro.kappa, rel=1e-12)


def test_eigenfrequencies_match_dense_eigensolver(micro, w_ep):
    rng = np.random.default_rng(7)
    for w in rng.uniform(0.0, 3.0 * w_ep, 40):
        shift = sagnac_shift(micro, float(w))
        eig = eigenfrequencies(micro, shift)
        ours = [eig.omega_plus, eig.omega_minus]
        ref = list(np.linalg.eigvals(hamiltonian(micro, shift)))
        # the dense solver's ordering is arbitrary: take the best pairing
        direct = max(abs(ours[0] - ref[0]), abs(ours[1] - ref[1]))
        swapped = max(abs(ours[0] - ref[1]), abs(ours[1] - ref[0]))
        assert min(direct, swapped) <= 1e-9 * abs(ref[0])


def test_branch_ordering_below_ep(micro, w_ep):
    for frac in (0.1, 0.5, 0.9):
        eig = eigenfrequencies(micro, sagnac_shift(micro, frac * w_ep))
        assert eig.omega_plus.imag > eig.omega_minus.imag


def test_phase_labels(micro, w_ep):
    assert eigenfrequencies(micro, sagnac_shift(micro, 0.5 * w_ep)).phase \
        == "APTS"
    assert eigenfrequencies(micro, sagnac_shift(micro, w_ep)).phase == "EP"
    assert eigenfrequencies(micro, sagnac_shift(micro, 1.5 * w_ep)).phase \
        == "APTB"


def test_eigenvalue_trace_is_spin_independent(micro, w_ep):
    expected = 2 * (micro.delta_c - 1j * micro.gamma_c)
    for frac in (0.0, 0.7, 1.0, 2.4):
        eig = eigenfrequencies(micro, sagnac_shift(micro, frac * w_ep))
        assert abs(eig.omega_plus + eig.omega_minus - expected) \
            <= 1e-9 * abs(expected)


def test_apt_defect_is_twice_the_pump_detuning(micro, w_ep):
    shift = sagnac_shift(micro, 1.3 * w_ep)
    assert apt_defect(micro, shift) == pytest.approx(2 * micro.delta_c)
    resonant = apply_overrides(micro, {"delta_c": 0.0})
    assert apt_defect(resonant, sagnac_shift(resonant, 1.3 * w_ep)) \
        <= 1e-12 * micro.gamma_c

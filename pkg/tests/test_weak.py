import numpy as np
import pytest

from quasilin import model, modes, qsde, weak
from conftest import random_stable_pauli_spec

M_REF = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@pytest.fixture()
def reference_shape(pauli):
    shape = weak.coupling_shape(pauli, [0.0, 0.0, 1.0], M_REF, [0.0, 0.0])
    a0 = qsde.build_coefficients(shape.at_strength(0.0)).a0
    return shape, modes.eigenmodes(a0, pauli.alpha)


def test_scaling_homogeneity(reference_shape):
    shape, _ = reference_shape
    ref = weak.scaled_coefficients(shape, 1.0)
    for eps in (0.1, 0.3, 0.5):
        sc = weak.scaled_coefficients(shape, eps)
        np.testing.assert_allclose(sc.atilde, eps**2 * ref.atilde, atol=1e-12)
        np.testing.assert_allclose(sc.b, eps**2 * ref.b, atol=1e-12)
    half = weak.scaled_coefficients(shape, 0.5)
    np.testing.assert_allclose(half.atilde, -0.5 * np.diag([1.0, 1.0, 2.0]), atol=1e-14)
    np.testing.assert_allclose(half.b, [0.0, 0.0, 1.0], atol=1e-14)


def test_reference_nu_values(reference_shape):
    shape, md = reference_shape
    nu = weak.nu_values(shape, md)
    np.testing.assert_allclose(md.omegas, [2.0, 0.0, -2.0], atol=1e-12)
    np.testing.assert_allclose(nu, [-2.0, -4.0, -2.0], atol=1e-12)


def test_nu_conjugation_pairs(pauli):
    rng = np.random.default_rng(21)
    for _ in range(5):
        spec = random_stable_pauli_spec(rng, m=2)
        shape = weak.coupling_shape(pauli, spec.energy, spec.coupling, spec.offset)
        a0 = qsde.build_coefficients(shape.at_strength(0.0)).a0
        try:
            md = modes.eigenmodes(a0, pauli.alpha)
            nu = weak.nu_values(shape, md)
        except ValueError:
            continue
        assert abs(nu[0] - np.conj(nu[2])) < 1e-10
        assert abs(nu[1].imag) < 1e-10


def test_real_part_sees_only_symmetric_drift(pauli, reference_shape):
    shape, md = reference_shape
    rng = np.random.default_rng(33)
    sa = rng.normal(size=(3, 3))
    nu_full = weak.nu_from_drift(sa, md)
    nu_sym = weak.nu_from_drift((sa + sa.T) / 2.0, md)
    np.testing.assert_allclose(nu_full.real, nu_sym.real, atol=1e-12)


def test_distinctness_refusal_names_the_pair(pauli):
    shape = weak.coupling_shape(pauli, np.zeros(3), M_REF, [0.0, 0.0])
    a0 = qsde.build_coefficients(shape.at_strength(0.0)).a0
    md = modes.eigenmodes(a0, pauli.alpha)
    with pytest.raises(ValueError, match="distinct"):
        weak.nu_values(shape, md)


def test_asymptotics_exact_on_reference(reference_shape):
    shape, md = reference_shape
    rows = weak.eigenvalue_asymptotics_check(shape, md, [0.2, 0.1, 0.05])
    for row in rows:
        assert not row.ambiguous
        assert max(row.residuals) < 1e-10


def test_asymptotics_residual_decreases(pauli):
    rng = np.random.default_rng(6)
    spec = random_stable_pauli_spec(rng, m=2)
    shape = weak.coupling_shape(pauli, spec.energy, spec.coupling, spec.offset)
    a0 = qsde.build_coefficients(shape.at_strength(0.0)).a0
    md = modes.eigenmodes(a0, pauli.alpha)
    worst = [max(r.residuals) for r in weak.eigenvalue_asymptotics_check(shape, md, [0.2, 0.1, 0.05])]
    assert worst[0] > worst[1] > worst[2]


def test_reference_stability_and_thresholds(reference_shape):
    shape, md = reference_shape
    res = weak.stability_and_thresholds(shape, md)
    assert res.stable_for_small_eps
    assert abs(res.abscissa_coefficient - (-2.0)) < 1e-12
    assert abs(res.tau_hat_coefficient - 0.25) < 1e-12
    assert abs(res.tau_hat(0.1) - 100.0 / 4.0) < 1e-10
    ref = np.sqrt(1.0 / (2.0 * np.pi))
    assert abs(res.eps_hat - ref) < 1e-9
    assert abs(res.eps_tilde - ref) < 1e-9


def test_zero_coupling_is_not_strictly_stable(pauli, reference_shape):
    _, md = reference_shape
    shape = weak.coupling_shape(pauli, [0.0, 0.0, 1.0], np.zeros((2, 3)), np.zeros(2))
    res = weak.stability_and_thresholds(shape, md)
    assert not res.stable_for_small_eps
    np.testing.assert_allclose(res.nu, np.zeros(3), atol=1e-14)


def test_reference_invariant_limit(reference_shape):
    shape, md = reference_shape
    limit = weak.invariant_mean_limit(shape, md)
    np.testing.assert_allclose(limit, [0.0, 0.0, 1.0], atol=1e-12)
    # for this shape the steady mean sits at the limit for every strength
    for eps in (0.5, 0.1, 0.01):
        mu = qsde.steady_mean(weak.scaled_coefficients(shape, eps))
        np.testing.assert_allclose(mu, limit, atol=1e-10)


def test_limit_invariant_under_shape_scaling(pauli):
    rng = np.random.default_rng(12)
    while True:
        spec = random_stable_pauli_spec(rng, m=2)
        shape = weak.coupling_shape(pauli, spec.energy, spec.coupling, spec.offset)
        a0 = qsde.build_coefficients(shape.at_strength(0.0)).a0
        md = modes.eigenmodes(a0, pauli.alpha)
        try:
            lim = weak.invariant_mean_limit(shape, md)
            break
        except ValueError:
            continue
    tripled = weak.coupling_shape(pauli, shape.energy, 3.0 * shape.coupling, 3.0 * shape.offset)
    np.testing.assert_allclose(weak.invariant_mean_limit(tripled, md), lim, atol=1e-10)


def test_limit_converges_from_steady_means(pauli):
    rng = np.random.default_rng(14)
    spec = random_stable_pauli_spec(rng, m=4)
    shape = weak.coupling_shape(pauli, spec.energy, 0.05 * spec.coupling, 0.05 * spec.offset)
    a0 = qsde.build_coefficients(shape.at_strength(0.0)).a0
    md = modes.eigenmodes(a0, pauli.alpha)
    lim = weak.invariant_mean_limit(shape, md)
    errs = [
        np.linalg.norm(qsde.steady_mean(weak.scaled_coefficients(shape, eps)) - lim)
        for eps in (0.1, 0.03, 0.01)
    ]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-6


def test_limit_refusals(pauli, reference_shape):
    _, md = reference_shape
    # vanishing rates: nu at the zero mode is zero when the coupling is zero
    flat = weak.coupling_shape(pauli, [0.0, 0.0, 1.0], np.zeros((2, 3)), np.zeros(2))
    with pytest.raises(ValueError):
        weak.invariant_mean_limit(flat, md)
    # zero multiplicity three: isolated qubit with E = 0
    null_shape = weak.coupling_shape(pauli, np.zeros(3), M_REF, [0.0, 0.0])
    md0 = modes.eigenmodes(qsde.build_coefficients(null_shape.at_strength(0.0)).a0, pauli.alpha)
    with pytest.raises(ValueError):
        weak.invariant_mean_limit(null_shape, md0)


def test_scalar_shape_thresholds_absent():
    # one commuting variable: no oscillation, no thresholds, not strictly stable
    constants = model.structure_constants([[1.0]], [[[1.0]]])
    shape = weak.coupling_shape(constants, [0.5], [[0.3], [0.1]], [0.0, 0.0])
    a0 = qsde.build_coefficients(shape.at_strength(0.0)).a0
    md = modes.eigenmodes(a0, constants.alpha)
    np.testing.assert_allclose(md.omegas, [0.0], atol=1e-14)
    res = weak.stability_and_thresholds(shape, md)
    assert res.eps_hat is None and res.eps_tilde is None


def test_pauli_gamma_reference():
    res = weak.pauli_gamma(M_REF, energy=[0.0, 0.0, 1.0])
    np.testing.assert_allclose(res.gamma, np.diag([1.0, 1.0, 2.0]), atol=1e-14)
    assert res.identity_residual < 1e-14
    assert abs(res.rotating_rate - (-2.0)) < 1e-14
    assert abs(res.rotating_rate_tabulated - (-4.0)) < 1e-14
    assert abs(res.static_rate - (-4.0)) < 1e-14
    # frame is orthonormal with the normalized energy last
    np.testing.assert_allclose(res.basis @ res.basis.T, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(res.basis[2], [0.0, 0.0, 1.0], atol=1e-14)


def test_pauli_gamma_identity_random():
    rng = np.random.default_rng(10)
    for m in (2, 4, 6):
        res = weak.pauli_gamma(rng.normal(size=(m, 3)))
        assert res.identity_residual < 1e-12
        assert np.linalg.eigvalsh(res.gamma).min() > -1e-12
        assert res.rotating_rate is None


def test_pauli_gamma_rates_match_mode_rates(pauli):
    # closed forms agree with the perturbation coefficients from the drift
    rng = np.random.default_rng(18)
    for _ in range(5):
        e = rng.uniform(-1.0, 1.0, 3)
        m = rng.uniform(-1.0, 1.0, (4, 3))
        shape = weak.coupling_shape(pauli, e, m, np.zeros(4))
        a0 = qsde.build_coefficients(shape.at_strength(0.0)).a0
        md = modes.eigenmodes(a0, pauli.alpha)
        nu = weak.nu_values(shape, md)
        res = weak.pauli_gamma(m, energy=e)
        assert abs(res.rotating_rate - nu[0].real) < 1e-10
        assert abs(res.static_rate - nu[1].real) < 1e-10


def test_pauli_gamma_shape_errors():
    with pytest.raises(ValueError):
        weak.pauli_gamma(np.zeros((2, 4)))
    with pytest.raises(ValueError):
        weak.pauli_gamma(M_REF, energy=np.zeros(3))

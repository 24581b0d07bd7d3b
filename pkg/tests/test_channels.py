"""Closed-form channel kernels against worked values and invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergoflux import (
    GADC,
    BlochVector,
    DomainError,
    ModelError,
    NonMarkovADC,
    Pauli,
    QutritADC,
    QutritDiagonal,
    bloch_to_density,
    default_horizon,
    jump_operators,
    n_bose_from_temperature,
    steady_state,
)
from ergoflux.channels import (
    gadc_bloch_evolve,
    gadc_components,
    gadc_distance_kernel,
    gadc_ergotropy,
    gadc_incoherent_kernel,
    nm_amplitude,
    nm_damping_factor,
    pauli_bloch_evolve,
    pauli_components,
    pauli_slow_rate,
    qubit_ergotropy_from_components,
    qutrit_diagonal_evolve,
    qutrit_distance_kernel,
    qutrit_ergotropy_kernel,
    qutrit_populations,
)

rates = st.floats(0.01, 2.0)


class TestChannelValidation:
    def test_negative_rates_rejected(self):
        with pytest.raises(DomainError):
            GADC(gamma_minus=-0.1, n_bose=0.0, h_z=1.0)
        with pytest.raises(DomainError):
            GADC(gamma_minus=0.1, n_bose=-0.2, h_z=1.0)
        with pytest.raises(DomainError):
            Pauli(gamma_perp=-1.0, gamma_z=0.1, h_z=1.0)
        with pytest.raises(DomainError):
            QutritADC(gamma=-0.5, h_z=1.0)
        with pytest.raises(DomainError):
            NonMarkovADC(gamma=0.2, lam=-1.0, delta=0.0, h_z=1.0)

    def test_gadc_derived_rates(self):
        c = GADC(gamma_minus=0.2, n_bose=0.5, h_z=1.0)
        assert c.a == pytest.approx(2.0)
        assert c.gamma == pytest.approx(0.2 / 1.5)
        assert c.gamma_plus == pytest.approx(c.gamma * 0.5)


def test_n_bose_from_temperature():
    assert n_bose_from_temperature(0.0, 1.0) == 0.0
    # occupation at k_B T equal to the level gap 2 h_z
    n = n_bose_from_temperature(2.0, 1.0)
    assert n == pytest.approx(1.0 / (math.e - 1.0))


class TestGADC:
    c = GADC(gamma_minus=0.1, n_bose=0.0, h_z=1.0)

    def test_components_decay(self):
        m_z_t, mp2 = gadc_components(self.c, 0.6, 0.0, 0.5, 10.0)
        e = math.exp(-1.0)
        assert m_z_t == pytest.approx(1.5 * e - 1.0)
        assert mp2 == pytest.approx(0.36 * e)

    def test_steady_state_thermal(self):
        hot = GADC(gamma_minus=0.1, n_bose=0.5, h_z=1.0)
        ss = steady_state(hot)
        assert np.allclose(np.diag(ss.matrix).real, [0.25, 0.75])
        ss0 = steady_state(self.c)
        assert np.allclose(np.diag(ss0.matrix).real, [0.0, 1.0])

    def test_semigroup_composition(self):
        b = BlochVector(0.4, 0.2, -0.3)
        one = gadc_bloch_evolve(gadc_bloch_evolve(b, self.c, 1.3), self.c, 0.9)
        two = gadc_bloch_evolve(b, self.c, 2.2)
        assert one.m_x == pytest.approx(two.m_x, abs=1e-12)
        assert one.m_y == pytest.approx(two.m_y, abs=1e-12)
        assert one.m_z == pytest.approx(two.m_z, abs=1e-12)

    def test_incoherent_kernel_clips_at_zero(self):
        late = gadc_incoherent_kernel(self.c, 0.5, 100.0)
        assert late == 0.0

    def test_distance_kernel_matches_definition(self):
        b = BlochVector(0.6, 0.0, 0.5)
        bt = gadc_bloch_evolve(b, self.c, 3.0)
        d = gadc_distance_kernel(self.c, b.transverse() ** 2, b.m_z, 3.0)
        # steady state is the ground state at T=0
        gap = bt.m_z + 1.0
        assert d == pytest.approx(0.5 * math.hypot(bt.transverse(), gap), abs=1e-12)

    @given(phi=st.floats(0.0, 2 * np.pi), t=st.floats(0.0, 30.0))
    @settings(max_examples=80, deadline=None)
    def test_phase_covariance(self, phi, t):
        # rotating the transverse component must not change the ergotropy
        b0 = BlochVector(0.5, 0.0, 0.3)
        br = BlochVector(0.5 * np.cos(phi), 0.5 * np.sin(phi), 0.3)
        assert gadc_ergotropy(b0, self.c, t) == pytest.approx(
            gadc_ergotropy(br, self.c, t), abs=1e-12
        )


class TestPauli:
    c = Pauli(gamma_perp=0.05, gamma_z=0.1, h_z=1.0)

    def test_component_rates(self):
        m_z_t, mp2 = pauli_components(self.c, 0.8, 0.0, 0.3, 2.0)
        assert m_z_t == pytest.approx(0.3 * math.exp(-4 * 0.05 * 2.0))
        assert mp2 == pytest.approx(0.64 * math.exp(-2 * 2 * (0.05 + 0.1) * 2.0))

    def test_shift_scales_both_families(self):
        z0, p0 = pauli_components(self.c, 0.8, 0.0, 0.3, 2.0)
        z1, p1 = pauli_components(self.c, 0.8, 0.0, 0.3, 2.0, shift=0.2)
        assert z1 == pytest.approx(z0 * math.exp(0.4))
        assert p1 == pytest.approx(p0 * math.exp(0.8))

    def test_slow_rate(self):
        assert pauli_slow_rate(self.c) == pytest.approx(0.2)
        fast_z = Pauli(gamma_perp=0.1, gamma_z=0.01, h_z=1.0)
        assert pauli_slow_rate(fast_z) == pytest.approx(0.22)

    def test_steady_state_maximally_mixed(self):
        assert np.allclose(steady_state(self.c).matrix, np.eye(2) / 2)

    def test_evolve_keeps_state_in_ball(self):
        b = BlochVector(0.7, 0.1, 0.7)
        bt = pauli_bloch_evolve(b, self.c, 5.0)
        assert bt.norm() <= b.norm() + 1e-12


class TestQutritADC:
    c = QutritADC(gamma=0.1, h_z=1.0)

    def test_population_flow(self):
        p1, p2, p3 = qutrit_populations(self.c, 0.5, 0.3, 4.0)
        e = math.exp(-0.4)
        assert p1 == pytest.approx(0.5 * e * e)
        assert p2 == pytest.approx(0.8 * e - 0.5 * e * e)
        assert p3 == pytest.approx(1.0 - 0.8 * e)

    def test_populations_stay_on_simplex(self):
        for t in (0.0, 1.0, 5.0, 50.0):
            p1, p2, p3 = qutrit_populations(self.c, 0.7, 0.25, t)
            assert min(p1, p2, p3) >= -1e-15
            assert p1 + p2 + p3 == pytest.approx(1.0)

    def test_diagonal_evolve_wrapper(self):
        q = qutrit_diagonal_evolve(QutritDiagonal(0.5, 0.3), self.c, 4.0)
        ref = qutrit_populations(self.c, 0.5, 0.3, 4.0)
        assert (q.p1, q.p2, q.p3) == pytest.approx(ref)

    def test_ergotropy_kernel_hits_exact_zero(self):
        # once the populations are passive the kernel must return exactly 0,
        # not a small positive residue
        val = qutrit_ergotropy_kernel(self.c, 0.4, 0.35, 80.0)
        assert float(val) == 0.0

    def test_distance_kernel_scaled_is_constant(self):
        ts = np.array([0.0, 1.0, 5.0, 20.0])
        d = qutrit_distance_kernel(self.c, 0.481, 0.103, ts, scaled=True)
        assert np.allclose(d, d[0])


class TestNonMarkovADC:
    c = NonMarkovADC(gamma=0.25, lam=1.0, delta=0.0, h_z=1.0)

    def test_amplitude_worked_value(self):
        assert abs(nm_amplitude(self.c, 1.0)) == pytest.approx(
            0.9544583146355825, abs=1e-12
        )

    def test_amplitude_at_zero(self):
        assert nm_amplitude(self.c, 0.0) == pytest.approx(1.0)

    @given(
        gamma=rates,
        lam=rates,
        delta=st.floats(0.0, 1.0),
        t=st.floats(0.0, 50.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_amplitude_within_unit_disk(self, gamma, lam, delta, t):
        c = NonMarkovADC(gamma=gamma, lam=lam, delta=delta, h_z=1.0)
        assert abs(nm_amplitude(c, t)) <= 1.0 + 1e-12

    def test_resonant_memoryless_limit(self):
        # lam >> gamma approaches plain exponential damping at rate gamma/2
        c = NonMarkovADC(gamma=0.1, lam=500.0, delta=0.0, h_z=1.0)
        t = 3.0
        assert nm_damping_factor(c, t) == pytest.approx(math.exp(-0.1 * t), rel=1e-2)

    def test_critical_damping_continuity(self):
        # zeta -> 0 crossover between the hyperbolic and trigonometric branches
        base = dict(gamma=0.5, delta=0.0, h_z=1.0)
        lam_crit = 1.0  # lam = 2 gamma makes the root vanish
        eps = 1e-9
        lo = nm_amplitude(NonMarkovADC(lam=lam_crit - eps, **base), 2.0)
        hi = nm_amplitude(NonMarkovADC(lam=lam_crit + eps, **base), 2.0)
        mid = nm_amplitude(NonMarkovADC(lam=lam_crit, **base), 2.0)
        assert lo == pytest.approx(mid, abs=1e-7)
        assert hi == pytest.approx(mid, abs=1e-7)

    def test_oscillatory_regime_touches_zero(self):
        strong = NonMarkovADC(gamma=0.3, lam=0.03, delta=0.0, h_z=1.0)
        ts = np.linspace(0.0, 200.0, 20001)
        f = nm_damping_factor(strong, ts)
        assert f.min() < 1e-6

    def test_no_gksl_generator(self):
        with pytest.raises(ModelError):
            jump_operators(self.c)


class TestJumpOperators:
    def test_gadc_rates(self):
        c = GADC(gamma_minus=0.3, n_bose=0.5, h_z=1.0)
        ops = jump_operators(c)
        assert len(ops) == 2
        rates_found = sorted(r for _, r in ops)
        assert rates_found == pytest.approx([c.gamma_plus, c.gamma_minus])

    def test_pauli_rates(self):
        c = Pauli(gamma_perp=0.05, gamma_z=0.1, h_z=1.0)
        ops = jump_operators(c)
        assert len(ops) == 3
        assert sorted(r for _, r in ops) == pytest.approx([0.05, 0.05, 0.1])

    def test_qutrit_cascade(self):
        # top level drains through two paths, so its population decays at 2*gamma
        c = QutritADC(gamma=0.1, h_z=1.0)
        ops = jump_operators(c)
        assert len(ops) == 3
        assert all(r == pytest.approx(0.1) for _, r in ops)
        assert all(op.shape == (3, 3) for op, _ in ops)
        total_from_top = sum(np.abs(op[:, 0]).sum() for op, _ in ops)
        assert total_from_top == pytest.approx(2.0)


def test_default_horizon_scales_inversely_with_rate():
    slow = GADC(gamma_minus=0.01, n_bose=0.0, h_z=1.0)
    fast = GADC(gamma_minus=0.1, n_bose=0.0, h_z=1.0)
    assert default_horizon(slow) == pytest.approx(10 * default_horizon(fast))


def test_pauli_horizon_covers_rate_splitting():
    # nearly equal rates separate the two decay families very slowly; the
    # horizon has to grow with 1/|gamma_perp - gamma_z| to see the flip
    near = Pauli(gamma_perp=0.1, gamma_z=0.100001, h_z=1.0)
    assert default_horizon(near) >= 1.0 / abs(4 * 0.1 - 2 * (0.1 + 0.100001))


@given(
    m_z=st.floats(-1.0, 1.0),
    mp2=st.floats(0.0, 1.0),
    k=st.floats(0.01, 1.0),
)
@settings(max_examples=200, deadline=None)
def test_ergotropy_positive_homogeneity(m_z, mp2, k):
    """Scaling (m_z, m_perp) jointly by k scales the ergotropy by k.

    This is what makes rate-shifted curve comparisons sign-exact.
    """
    if m_z * m_z + mp2 > 1.0:
        mp2 = 1.0 - m_z * m_z
    base = qubit_ergotropy_from_components(m_z, mp2, 1.0)
    scaled = qubit_ergotropy_from_components(k * m_z, k * k * mp2, 1.0)
    assert scaled == pytest.approx(k * base, abs=1e-12)


def test_ergotropy_component_form_negative_mz_is_cancellation_safe():
    # naive m_z + |m| loses all digits here; the quotient form must not
    e = qubit_ergotropy_from_components(-0.999999999, 1e-18, 1.0)
    assert e == pytest.approx(1e-18 / (2 * 0.999999999), rel=1e-6)
    assert e > 0.0

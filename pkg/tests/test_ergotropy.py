"""Extractable work: generic eigen route, closed forms, and the split."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergoflux import (
    GADC,
    BatteryHamiltonian,
    BlochVector,
    DomainError,
    QutritDiagonal,
    bloch_to_density,
    ergotropy,
    ergotropy_breakdown,
    incoherent_vanish_time,
    iso_ergotropic_mx,
    passive_state,
    qutrit_table_ergotropy,
)

H2 = BatteryHamiltonian(2, 1.0)
H3 = BatteryHamiltonian(3, 1.0)


def ball_vectors():
    return st.tuples(
        st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0)
    ).filter(lambda v: v[0] ** 2 + v[1] ** 2 + v[2] ** 2 <= 1.0)


def simplex_points():
    return st.tuples(st.floats(0.0, 1.0), st.floats(0.0, 1.0)).filter(
        lambda p: p[0] + p[1] <= 1.0
    )


def test_worked_qubit_value():
    rho = bloch_to_density(BlochVector(0.6, 0.0, 0.5))
    assert ergotropy(rho, H2) == pytest.approx(0.5 + math.sqrt(0.61), abs=1e-12)


def test_worked_breakdown():
    rho = bloch_to_density(BlochVector(0.6, 0.0, 0.5))
    br = ergotropy_breakdown(rho, H2)
    assert br.incoherent == pytest.approx(1.0, abs=1e-12)
    assert br.coherent == pytest.approx(math.sqrt(0.61) - 0.5, abs=1e-12)
    assert br.total == pytest.approx(br.incoherent + br.coherent, abs=1e-12)


def test_ground_state_is_passive():
    rho = bloch_to_density(BlochVector(0.0, 0.0, -1.0))
    assert ergotropy(rho, H2) == 0.0


def test_splitting_scales_linearly():
    rho = bloch_to_density(BlochVector(0.6, 0.0, 0.5))
    h_big = BatteryHamiltonian(2, 3.0)
    assert ergotropy(rho, h_big) == pytest.approx(3.0 * ergotropy(rho, H2))


class TestPassiveState:
    def test_same_spectrum(self):
        rho = bloch_to_density(BlochVector(0.3, 0.2, 0.4))
        pi = passive_state(rho, H2)
        assert np.allclose(
            np.sort(np.linalg.eigvalsh(pi.matrix)),
            np.sort(np.linalg.eigvalsh(rho.matrix)),
        )

    def test_no_work_left(self):
        rho = QutritDiagonal(0.5, 0.2).to_density()
        pi = passive_state(rho, H3)
        assert ergotropy(pi, H3) == pytest.approx(0.0, abs=1e-12)

    def test_populations_descend_against_energy(self):
        rho = QutritDiagonal(0.5, 0.2).to_density()
        pi = passive_state(rho, H3)
        # storage basis lists energies descending, so the diagonal must ascend
        diag = np.diag(pi.matrix).real
        assert np.all(np.diff(diag) >= -1e-12)

    def test_energy_drop_equals_ergotropy(self):
        rho = bloch_to_density(BlochVector(0.3, 0.2, 0.4))
        pi = passive_state(rho, H2)
        hmat = H2.eigenbasis @ np.diag(H2.eigenvalues) @ H2.eigenbasis.T
        drop = np.trace(hmat @ rho.matrix).real - np.trace(hmat @ pi.matrix).real
        assert drop == pytest.approx(ergotropy(rho, H2), abs=1e-12)


@given(v=ball_vectors())
@settings(max_examples=150, deadline=None)
def test_qubit_closed_form(v):
    b = BlochVector(*v)
    rho = bloch_to_density(b)
    expected = b.m_z + b.norm()
    assert ergotropy(rho, H2) == pytest.approx(expected, abs=1e-10)


@given(v=ball_vectors())
@settings(max_examples=100, deadline=None)
def test_breakdown_parts_nonnegative_and_additive(v):
    br = ergotropy_breakdown(bloch_to_density(BlochVector(*v)), H2)
    assert br.total >= 0.0
    assert br.incoherent >= 0.0
    assert br.coherent >= 0.0
    assert br.total == pytest.approx(br.incoherent + br.coherent, abs=1e-12)


def test_diagonal_state_is_fully_incoherent():
    rho = QutritDiagonal(0.2, 0.5).to_density()
    br = ergotropy_breakdown(rho, H3)
    assert br.coherent == 0.0
    assert br.incoherent == pytest.approx(ergotropy(rho, H3))


class TestVanishTime:
    c = GADC(gamma_minus=0.1, n_bose=0.0, h_z=1.0)

    def test_worked_values(self):
        assert incoherent_vanish_time(0.5, self.c) == pytest.approx(10 * math.log(1.5))
        c2 = GADC(gamma_minus=0.2, n_bose=0.0, h_z=1.0)
        assert incoherent_vanish_time(1.0, c2) == pytest.approx(math.log(2.0) / 0.2)

    def test_inversion_is_exactly_zero_at_the_vanish_time(self):
        from ergoflux.channels import gadc_components

        hot = GADC(gamma_minus=0.1, n_bose=0.5, h_z=1.0)
        for c in (self.c, hot):
            t_s = incoherent_vanish_time(0.5, c)
            m_z_t, _ = gadc_components(c, 0.0, 0.0, 0.5, t_s)
            assert m_z_t == pytest.approx(0.0, abs=1e-14)

    def test_nonpositive_mz_vanishes_immediately(self):
        assert incoherent_vanish_time(0.0, self.c) == 0.0
        assert incoherent_vanish_time(-0.4, self.c) == 0.0

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            incoherent_vanish_time(1.2, self.c)

    def test_frozen_dynamics(self):
        frozen = GADC(gamma_minus=0.0, n_bose=0.0, h_z=1.0)
        with pytest.raises(DomainError):
            incoherent_vanish_time(0.5, frozen)


class TestIsoErgotropicSurface:
    def test_recovers_same_ergotropy(self):
        m_x = iso_ergotropic_mx(1.2, 0.3)
        rho = bloch_to_density(BlochVector(m_x, 0.0, 0.3))
        assert ergotropy(rho, H2) == pytest.approx(1.2, abs=1e-12)

    def test_pure_state_boundary(self):
        # the surface through the north pole at m_z = 0 is the equator
        m_x = iso_ergotropic_mx(1.0, 0.0)
        assert m_x == pytest.approx(1.0)

    def test_below_reachable_band(self):
        with pytest.raises(DomainError):
            iso_ergotropic_mx(0.1, 0.5)

    def test_outside_ball(self):
        with pytest.raises(DomainError):
            iso_ergotropic_mx(2.5, 0.2)


class TestQutritTable:
    c_all = [
        # one point per ordering branch, totals done by hand
        ((0.1, 0.3), 0.0),            # p1 <= p2 <= p3: passive
        ((0.2, 0.5), 2 * 0.5 + 0.2 - 1.0),   # p1 <= p3 <= p2
        ((0.3, 0.2), 0.3 - 0.2),      # p2 <= p1 <= p3
        ((0.45, 0.1), 3 * 0.45 - 1.0),  # p2 <= p3 <= p1
        ((0.25, 0.6), 3 * (0.25 + 0.6) - 2.0),  # p3 <= p1 <= p2
        ((0.5, 0.3), 4 * 0.5 + 2 * 0.3 - 2.0),  # p3 <= p2 <= p1
    ]

    @pytest.mark.parametrize("point,expected", c_all)
    def test_branch_values(self, point, expected):
        assert qutrit_table_ergotropy(*point) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("point,expected", c_all)
    def test_branches_match_eigen_route(self, point, expected):
        rho = QutritDiagonal(*point).to_density()
        assert qutrit_table_ergotropy(*point) == pytest.approx(
            ergotropy(rho, H3), abs=1e-12
        )

    def test_splitting_prefactor(self):
        assert qutrit_table_ergotropy(0.5, 0.3, h_z=2.0) == pytest.approx(
            2.0 * qutrit_table_ergotropy(0.5, 0.3)
        )

    def test_off_simplex_rejected(self):
        with pytest.raises(DomainError):
            qutrit_table_ergotropy(0.8, 0.4)

    @given(p=simplex_points())
    @settings(max_examples=150, deadline=None)
    def test_table_equals_eigen_everywhere(self, p):
        rho = QutritDiagonal(*p).to_density()
        assert qutrit_table_ergotropy(*p) == pytest.approx(
            ergotropy(rho, H3), abs=1e-12
        )

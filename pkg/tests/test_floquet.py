"""Monodromy transport, discriminant properties, and eigenvalue search."""

import math

import numpy as np
import pytest

from hillband.errors import NotAnEigenvalue, StepLimitExceeded
from hillband.floquet import (
    IntegratorSettings,
    discriminant,
    discriminant_batch,
    discriminant_derivative,
    monodromy,
    multiplicity_estimate,
    periodic_eigenvalues_on_interval,
)
from hillband.elliptic import invariants
from hillband.potential import MultiplicityVector, PotentialSpec

from oracles import delta_constant, monodromy_scipy


def mv(*ns):
    return MultiplicityVector(*ns)


@pytest.fixture(scope="module")
def const_spec():
    return PotentialSpec.constant_potential(0.0)


class TestConstantOracle:
    def test_trace_closed_form_point(self, const_spec):
        m = monodromy(const_spec, 1.0)
        assert abs(m.trace - 2.0 * math.cosh(1.0)) < 1e-10
        assert abs(m.det - 1.0) < 1e-9

    def test_grid_against_closed_form(self, const_spec):
        e_grid = np.linspace(-50.0, 40.0, 91)
        delta = discriminant_batch(const_spec, e_grid)
        assert np.max(np.abs(delta - delta_constant(0.0, e_grid))) < 1e-9

    def test_nonzero_constant(self):
        spec = PotentialSpec.constant_potential(3.0 + 1.5j)
        e_val = -7.0 + 2.0j
        expected = complex(delta_constant(3.0 + 1.5j, np.array([e_val]))[0])
        assert abs(discriminant(spec, e_val) - expected) < 1e-10


class TestMonodromy:
    def test_det_is_one_complex_energy(self, spec_2210):
        m = monodromy(spec_2210, 1.0 + 2.0j)
        assert abs(m.det - 1.0) < 1e-9

    def test_z0_independence_lame(self):
        a = PotentialSpec.elliptic(mv(1, 0, 0, 0), 1j, z0=0.25j)
        b = PotentialSpec.elliptic(mv(1, 0, 0, 0), 1j, z0=1j / 3.0)
        assert abs(monodromy(a, 2.0).trace - monodromy(b, 2.0).trace) < 1e-8

    @pytest.mark.parametrize("tup,tau,e_val", [
        ((2, 2, 1, 0), 1j, -3.0 + 1.0j),
        ((1, 1, 1, 1), 0.8j, 5.0),
        ((2, 1, 0, 0), 1.5j, -20.0),
    ])
    def test_z0_independence_random(self, tup, tau, e_val):
        a = PotentialSpec.elliptic(mv(*tup), tau, z0=tau / 4.0)
        b = PotentialSpec.elliptic(mv(*tup), tau, z0=tau / 3.0)
        ta = monodromy(a, e_val).trace
        tb = monodromy(b, e_val).trace
        assert abs(ta - tb) < 1e-8 * max(1.0, abs(ta))

    def test_scipy_oracle_agreement(self, spec_2210):
        for e_val in (1.0 + 2.0j, -30.0):
            mine = discriminant(spec_2210, e_val)
            ref = monodromy_scipy(spec_2210, e_val)
            assert abs(mine - ref) < 1e-8 * max(1.0, abs(ref))

    def test_conjugation_symmetry(self, spec_2210):
        for e_val in (1.0 + 2.0j, -5.0 + 0.7j):
            a = discriminant(spec_2210, e_val)
            b = discriminant(spec_2210, e_val.conjugate())
            assert abs(b - a.conjugate()) < 1e-8 * max(1.0, abs(a))

    def test_reality_on_real_axis(self, spec_2210):
        delta = discriminant_batch(spec_2210, np.array([-30.0, -5.0, 3.0]))
        assert np.max(np.abs(delta.imag)) < 1e-8

    def test_step_limit(self, const_spec):
        settings = IntegratorSettings(max_steps=1000)
        with pytest.raises(StepLimitExceeded):
            discriminant(const_spec, -1e8, settings)


class TestDerivative:
    def test_against_finite_difference(self, spec_2210):
        e_val = 1.0
        dd = discriminant_derivative(spec_2210, e_val)
        h = 1e-5
        fd = (discriminant(spec_2210, e_val + h)
              - discriminant(spec_2210, e_val - h)) / (2.0 * h)
        assert abs(dd - fd) < 1e-6 * abs(fd)

    def test_constant_double_point(self, const_spec):
        # E = C - pi^2 is the antiperiodic double point of 2cos sqrt(C - E)
        assert abs(discriminant_derivative(const_spec, -math.pi**2)) < 1e-9

    def test_lame_simple_edge_nonzero(self, lame_spec):
        e1 = invariants(lame_spec.torus).e1.real
        assert abs(discriminant_derivative(lame_spec, e1)) > 1e-4


class TestMultiplicity:
    def test_lame_simple_edge(self, lame_spec):
        e1 = invariants(lame_spec.torus).e1.real
        assert multiplicity_estimate(lame_spec, e1) == 1

    def test_constant_double_point(self, const_spec):
        assert multiplicity_estimate(const_spec, -math.pi**2) == 2

    def test_interior_band_point_rejected(self, lame_spec):
        with pytest.raises(NotAnEigenvalue):
            multiplicity_estimate(lame_spec, 3.0)


class TestEigenvalueSearch:
    def test_constant_potential(self, const_spec):
        hits = periodic_eigenvalues_on_interval(const_spec, -12.0, 1.0)
        assert [h.parity for h in hits] == [-2, 2]
        assert abs(hits[0].E + math.pi**2) < 1e-8
        assert abs(hits[1].E) < 1e-8
        assert hits[0].order_d == 2
        assert hits[1].order_d == 1

    def test_lame_band_edges(self, lame_spec):
        e1 = invariants(lame_spec.torus).e1.real
        hits = periodic_eigenvalues_on_interval(lame_spec, -8.0, 8.0)
        got = [(round(h.E, 4), h.parity) for h in hits]
        assert got == [(-round(e1, 4), -2), (0.0, -2), (round(e1, 4), 2)]
        assert all(h.order_d == 1 for h in hits)

    def test_stability_under_halved_tolerance(self, const_spec):
        settings = IntegratorSettings(rel_tol=1e-10, abs_tol=1e-12)
        a = periodic_eigenvalues_on_interval(const_spec, -12.0, 1.0, settings)
        b = periodic_eigenvalues_on_interval(const_spec, -12.0, 1.0,
                                             settings.halved())
        for ha, hb in zip(a, b):
            assert abs(ha.E - hb.E) <= 10 * settings.rel_tol * (1.0 + abs(ha.E)) + 1e-9

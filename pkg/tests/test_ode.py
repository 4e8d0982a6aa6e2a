"""Tests for the ODE restrictions and their convolutions."""

import numpy as np
import pytest
from hyperflux.errors import DimensionMismatch, InvalidFamily
from hyperflux.kz import Axis, PQRParameters, pipeline_pqr
from hyperflux.ode import (
    OdeTriple,
    irreducibility_hint,
    ode_convolve,
    ode_rigidity_index,
)
from hyperflux.verify import random_homogeneous_family


@pytest.fixture(scope="module")
def f1_family():
    """The rank-3 family of the (1, 1, 1) pipeline."""
    params = PQRParameters.draw(1, 1, 1, np.random.default_rng(5))
    return pipeline_pqr(1, 1, 1, params)


def test_family_round_trip():
    """A homogeneous family restricts and embeds back unchanged."""
    F = random_homogeneous_family(2, np.random.default_rng(11))
    T = OdeTriple.from_family(F)
    assert T.N == 2
    assert T.to_family().max_difference(F) <= 1e-12
    assert np.allclose(T.A_14, F["14"])
    assert np.allclose(T.A_24, F["24"])


@pytest.mark.parametrize("axis", list(Axis))
def test_convolution_subspace_is_invariant(f1_family, axis):
    """L is invariant under the convolved residues along every axis."""
    conv = ode_convolve(OdeTriple.from_family(f1_family), 0.37 + 0.11j, axis)
    assert conv.size == 9
    assert conv.defect() <= 1e-9
    quotient = conv.quotient()
    sizes = {M.shape for M in quotient.values()}
    assert len(sizes) == 1
    rows, cols = sizes.pop()
    assert rows == cols == 9 - conv.basis.shape[1]


def test_x_convolution_of_random_triple():
    """Along x the subspace is invariant for any residues."""
    rng = np.random.default_rng(2)
    mats = [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(5)]
    conv = ode_convolve(OdeTriple(*mats), 0.6, Axis.X)
    assert conv.require_invariant() <= 1e-9


def test_rigidity_and_irreducibility(f1_family):
    """The F1 restriction is rigid and irreducible."""
    T = OdeTriple.from_family(f1_family)
    assert ode_rigidity_index(T) == 2
    assert irreducibility_hint(T) == 1


def test_irreducibility_hint_of_scalar_triples():
    """Scalar residues commute with everything, so only rank one is irreducible."""
    T = OdeTriple([[0.3]], [[0.5]], [[0.2]], [[0.1]], [[0.4]])
    assert irreducibility_hint(T) == 1
    I = np.eye(2)
    T2 = OdeTriple(0.3 * I, 0.5 * I, 0.2 * I, 0.1 * I, 0.4 * I)
    assert irreducibility_hint(T2) == 4


def test_json_and_shape_checks():
    """Missing matrices and mismatched shapes are refused."""
    T = OdeTriple([[0.3]], [[0.5]], [[0.2]], [[0.1]], [[0.4]])
    back = OdeTriple.from_json(T.to_json())
    assert np.allclose(back.A_1, T.A_1)
    data = T.to_json()
    del data["B_0"]
    with pytest.raises(InvalidFamily):
        OdeTriple.from_json(data)
    with pytest.raises(DimensionMismatch):
        OdeTriple(np.eye(2), np.eye(3), np.eye(2), np.eye(2), np.eye(2))

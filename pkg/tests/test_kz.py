"""Tests for KZ residue families, convolutions and the (p, q, r) pipeline."""

import numpy as np
import pytest
from hyperflux.errors import (
    ClusterError,
    InvalidFamily,
    InvarianceViolation,
    NotHomogeneous,
)
from hyperflux.kz import (
    BLOWUP_XY,
    Axis,
    GeneralizedRiemannScheme,
    PQRParameters,
    ResidueFamily,
    centralizer_dimension,
    cluster_eigenvalues,
    homogenize,
    kernel,
    matrix_rank,
    pipeline_pqr,
    pqr_rank,
    pqr_seed,
    predicted_scheme,
    riemann_scheme,
    rigidity_formula,
    rigidity_index,
    s5_transform,
    tilde_blocks,
    tilde_convolve,
    validate,
)
from hyperflux.verify import PQR_CASES, random_homogeneous_family


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(3)


@pytest.fixture
def family(rng):
    """Random homogeneous family of size 2."""
    return random_homogeneous_family(2, rng)


def compose(sigma, tau):
    return tuple(sigma[t] for t in tau)


def test_derived_residues_at_infinity(family):
    """A_i4 is minus the sum of the finite residues at x_i."""
    assert np.allclose(family.get(0, 4), -(family["01"] + family["02"] + family["03"]))
    assert np.allclose(family["34"], -(family["03"] + family["13"] + family["23"]))
    assert family.is_homogeneous()


def test_family_rejects_stored_infinite_pair():
    """Residues at x_4 are derived, never stored."""
    with pytest.raises(InvalidFamily):
        ResidueFamily(1, {(0, 4): [[1.0]]})
    with pytest.raises(InvalidFamily):
        ResidueFamily.from_json({"N": 2, "A": {"01": [[1.0]]}})
    with pytest.raises(InvalidFamily):
        ResidueFamily.from_json({"A": {}})


def test_family_json(family):
    """Families read back with every residue intact."""
    assert ResidueFamily.from_json(family.to_json()).max_difference(family) == 0


def test_s5_composition(family):
    """Relabelling composes as s5(F, sigma o tau) = s5(s5(F, tau), sigma)."""
    sigma, tau = (1, 2, 0, 4, 3), (4, 0, 3, 1, 2)
    direct = s5_transform(family, compose(sigma, tau))
    stepwise = s5_transform(s5_transform(family, tau), sigma)
    assert direct.max_difference(stepwise) <= 1e-12


def test_s5_relabels_pairs(family):
    """Swapping x_0 and x_1 exchanges A_02 and A_12."""
    swapped = s5_transform(family, (1, 0, 2, 3, 4))
    assert np.allclose(swapped["02"], family["12"])
    assert np.allclose(swapped["04"], family["14"])


def test_s5_needs_homogeneity_to_move_infinity():
    """Moving x_4 is refused on a non-homogeneous family."""
    F = ResidueFamily(1, {(0, 1): [[0.5]]})
    assert s5_transform(F, (1, 0, 2, 3, 4)).N == 1
    with pytest.raises(NotHomogeneous):
        s5_transform(F, (4, 1, 2, 3, 0))
    with pytest.raises(InvalidFamily):
        s5_transform(F, (0, 0, 1, 2, 3))


def test_homogenize_scalar_sum(family):
    """A scalar residue sum is absorbed into A_23."""
    shifted = ResidueFamily(2, {**family.A, (0, 1): family["01"] + 0.7 * np.eye(2)})
    result, kappa, scalar = homogenize(shifted)
    assert kappa == pytest.approx(0.7)
    assert scalar
    assert result.is_homogeneous()


def test_validate_seed_and_random(family):
    """Scalar residues commute; random matrices do not."""
    seed = pqr_seed(PQRParameters([0.3], [0], [0.5], [0], [0.4], [0.6]))
    report = validate(seed, require_homogeneous=True)
    assert report.passed
    assert report.integrability == 0
    bad = validate(family)
    assert not bad.passed
    assert bad.worst


@pytest.mark.parametrize("axis", list(Axis))
def test_printed_blocks_at_infinity(family, axis):
    """On homogeneous input the printed index-4 blocks equal the derived residues."""
    blocks = tilde_blocks(family, 0.4 + 0.1j, 0.7 - 0.2j, axis)
    convolved = tilde_convolve(family, 0.4 + 0.1j, 0.7 - 0.2j, axis)
    assert convolved.N == 6
    assert convolved.is_homogeneous()
    for key in ("04", "14", "24", "34"):
        assert np.max(np.abs(blocks[key] - convolved[key])) <= 1e-12


def test_blowup_is_conjugated_x_convolution(family):
    """The xy table is the x table read through the blow-up relabelling."""
    mu, lam = 0.4 + 0.1j, 0.7 - 0.2j
    formula = tilde_convolve(family, mu, lam, Axis.XY)
    relabelled = tilde_convolve(s5_transform(family, BLOWUP_XY), mu, lam, Axis.X)
    assert formula.max_difference(s5_transform(relabelled, BLOWUP_XY)) <= 1e-12


def test_linear_algebra_helpers():
    """Rank and kernel use the relative threshold."""
    M = np.array([[1.0, 2.0], [2.0, 4.0 + 1e-14]])
    assert matrix_rank(M) == 1
    K = kernel(M)
    assert K.shape == (2, 1)
    assert np.linalg.norm(M @ K) <= 1e-12
    assert centralizer_dimension(np.diag([1.0, 2.0, 3.0])) == 3
    assert centralizer_dimension(np.eye(3)) == 9


def test_cluster_eigenvalues():
    """Close values merge; near misses raise."""
    assert cluster_eigenvalues([1.0, 1.0 + 1e-9, 2.0], tol=1e-7) == [
        (pytest.approx(1.0), 2),
        (2.0, 1),
    ]
    with pytest.raises(ClusterError):
        cluster_eigenvalues([1.0, 1.0 + 5e-7], tol=1e-7)


def test_scheme_multiplicities_must_sum_to_rank():
    """Each pair lists exactly N eigenvalues with multiplicity."""
    with pytest.raises(InvalidFamily):
        GeneralizedRiemannScheme(3, {"01": [(0j, 2)]})
    a = GeneralizedRiemannScheme(2, {"01": [(0j, 1), (1 + 0j, 1)]})
    b = GeneralizedRiemannScheme(2, {"01": [(0j, 2)]})
    assert a.distance(b) == float("inf")
    assert GeneralizedRiemannScheme.from_json(a.to_json()).matches(a)


def test_pqr_parameters():
    """alphap[0] and betap[0] are pinned to zero and lengths must pair up."""
    with pytest.raises(InvalidFamily):
        PQRParameters([0.3], [0.1], [0.5], [0], [0.4], [0.6])
    with pytest.raises(InvalidFamily):
        PQRParameters([0.3, 0.2], [0], [0.5], [0], [0.4], [0.6])
    params = PQRParameters.draw(2, 1, 3, np.random.default_rng(0))
    assert params.pqr == (2, 1, 3)
    assert PQRParameters.from_json(params.to_json()).alpha == params.alpha


def test_predicted_scheme_is_consistent():
    """Predicted multiplicities add up to pq + qr + rp for every case."""
    rng = np.random.default_rng(1)
    for p, q, r in PQR_CASES:
        scheme = predicted_scheme(p, q, r, PQRParameters.draw(p, q, r, rng))
        assert scheme.N == pqr_rank(p, q, r)
        assert len(scheme.pairs) == 10


def test_rigidity_formula():
    """Rigid cases have index 2."""
    assert rigidity_formula(1, 1, 1) == 2
    assert rigidity_formula(3, 1, 2) == 2
    assert rigidity_formula(1, 2, 2) == -8


def test_pipeline_rejects_mismatched_lengths():
    """Parameter lengths fix (p, q, r)."""
    params = PQRParameters.draw(1, 1, 1, np.random.default_rng(0))
    with pytest.raises(InvalidFamily):
        pipeline_pqr(2, 1, 1, params)


def check_pipeline(p, q, r, seed):
    params = PQRParameters.draw(p, q, r, np.random.default_rng(seed))
    F = pipeline_pqr(p, q, r, params)
    assert F.N == pqr_rank(p, q, r)
    assert validate(F, 1e-9).integrability <= 1e-9
    assert F.is_homogeneous(1e-9)
    assert riemann_scheme(F, 1e-7).distance(predicted_scheme(p, q, r, params)) <= 1e-7
    assert rigidity_index(F, "x") == rigidity_formula(p, q, r)
    assert rigidity_index(F, "y") == rigidity_formula(q, p, r)


def test_pipeline_111():
    """The rank-3 case reproduces the F1 local exponents."""
    check_pipeline(1, 1, 1, seed=5)


def literal_seed(params):
    """A_02 = alpha_1, A_12 = beta_1 and nothing else: residues that do not sum to zero."""
    a1, b1 = params.alpha[0], params.beta[0]
    return ResidueFamily(1, {(0, 2): [[a1]], (1, 2): [[b1]]})


def test_pipeline_needs_the_homogeneous_seed(monkeypatch):
    """Flipping the seed signs without A_23 is no gauge change: the pipeline breaks."""
    params = PQRParameters.draw(1, 1, 1, np.random.default_rng(5))
    assert pqr_seed(params).is_homogeneous(1e-12)
    assert not literal_seed(params).is_homogeneous(1e-3)

    monkeypatch.setattr("hyperflux.kz.pqr_seed", literal_seed)
    F = pipeline_pqr(1, 1, 1, params)
    assert riemann_scheme(F, 1e-7).distance(predicted_scheme(1, 1, 1, params)) > 1e-3
    with pytest.raises(InvarianceViolation):
        pipeline_pqr(2, 1, 1, PQRParameters.draw(2, 1, 1, np.random.default_rng(4)))


@pytest.mark.slow
@pytest.mark.parametrize("pqr", PQR_CASES[1:])
def test_pipeline_cases(pqr):
    """Larger cases keep rank, integrability, scheme and rigidity."""
    check_pipeline(*pqr, seed=sum(pqr))

import numpy as np
import pytest

from ncadhm.hopf_twist import (
    ClassicalModel, MoyalModel, ToricModel, derive_relations, z,
)
from ncadhm.monad import (
    ADHMData, MonadMatrices, ShapeError, adhm_residual, bosonise_monad,
    build_monad, monad_residual, tilde_coinvariance_residual,
    tilde_subalgebra_check,
)
from ncadhm.adhm_solver import SolveConfig, solve
from ncadhm.star_algebra import Coefficient, HOPF_TRANS, multiply


def canonical_moyal(hbar=0.25, alpha=1.0, beta=1.0):
    model = MoyalModel(hbar, alpha, beta)
    d = ADHMData.zero(1, model)
    d.I[0, 0] = np.sqrt(model.zeta_level)
    return d


def canonical_toric(theta=0.25):
    return ADHMData(1, ToricModel(theta), np.zeros((1, 1)), np.zeros((1, 1)),
                    np.array([[1.0, 0.0]]), np.array([[0.0], [1.0]]))


def test_build_monad_shapes_and_reality():
    for d in (canonical_moyal(), canonical_toric(),
              ADHMData.zero(2, ClassicalModel())):
        m = build_monad(d)
        k = d.k
        for Mj in m.M:
            assert Mj.shape == (2 * k + 2, k)
        for Nj in m.N:
            assert Nj.shape == (k, 2 * k + 2)
        assert m.self_conjugate
        assert m.reality_residual() == 0.0


def test_build_monad_classical_limit():
    rng = np.random.default_rng(0)
    B1, B2 = rng.standard_normal((1, 1)), rng.standard_normal((1, 1))
    I, J = rng.standard_normal((1, 2)), rng.standard_normal((2, 1))
    m0 = build_monad(ADHMData(1, MoyalModel(0.0, 1.0, 1.0), B1, B2, I, J))
    mt = build_monad(ADHMData(1, ToricModel(0.0), B1, B2, I, J))
    mc = build_monad(ADHMData(1, ClassicalModel(), B1, B2, I, J))
    for a, b, c in zip(m0.M, mt.M, mc.M):
        assert np.allclose(a, c) and np.allclose(b, c)


def test_build_monad_canonical_blocks():
    d = canonical_moyal()
    m = build_monad(d)
    sz = np.sqrt(d.model.zeta_level)
    # M1 stacks (B1; B2; J) and is the zero column here
    assert np.allclose(m.M[0], 0.0)
    # M2 stacks (-B2+; B1+; I+): only the I-dagger block survives
    assert np.allclose(m.M[1][:2], 0.0)
    assert np.allclose(m.M[1][2:], np.array([[sz], [0.0]]))
    # the constant blocks
    assert np.allclose(m.M[2], np.array([[1.0], [0.0], [0.0], [0.0]]))
    assert np.allclose(m.M[3], np.array([[0.0], [1.0], [0.0], [0.0]]))
    assert np.allclose(m.N[2], np.array([[0.0, 1.0, 0.0, 0.0]]))
    assert np.allclose(m.N[3], np.array([[-1.0, 0.0, 0.0, 0.0]]))


def test_build_monad_toric_mu_factor():
    theta = 0.25
    d = canonical_toric(theta)
    d.B2 = np.array([[0.7 + 0.2j]])
    m = build_monad(d)
    mu = np.exp(1j * np.pi * theta)
    # N1 = (-mu B2 | mu-bar B1 | I)
    assert np.allclose(m.N[0][:, :1], -mu * d.B2)
    assert np.allclose(m.N[0][:, 2:], d.I)


def test_adhm_residual_examples():
    d = canonical_moyal()
    assert max(adhm_residual(d)) < 1e-14

    dt = canonical_toric()
    assert max(adhm_residual(dt)) < 1e-14

    # all-zero data with nonzero deformation level: real residual zeta sqrt(k)
    for k in (1, 2, 3):
        model = MoyalModel(0.25, 1.0, 1.0)
        d0 = ADHMData.zero(k, model)
        c, h = adhm_residual(d0)
        assert c == 0.0
        assert abs(h - model.zeta_level * np.sqrt(k)) < 1e-14


def test_monad_residual_solved_and_probe():
    # classical solved data: all-zero residual
    d = solve(1, ClassicalModel(), cfg=SolveConfig(rng_seed=2))
    res = monad_residual(build_monad(d), d.model)
    assert res.eval_max_norm() < 1e-10

    # the identity-free probe keeps only the constant shift i hbar (alpha+beta)
    model = MoyalModel(0.25, 1.0, 1.0)
    m0 = build_monad(ADHMData.zero(1, model))
    probe = monad_residual(m0, model)
    coeff = probe.entries[0][0].coefficient((z(1), z(2)), hbar=1)
    assert coeff.approx_eq(Coefficient(1j * model.hbar *
                                       (model.alpha + model.beta), 1))
    # only that single word survives
    assert len(probe.entries[0][0].terms) == 1


@pytest.mark.parametrize("model,k", [
    (ClassicalModel(), 1), (ClassicalModel(), 2),
    (MoyalModel(0.25, 1.0, 1.0), 1), (MoyalModel(0.2, 1.0, 0.5), 2),
    (ToricModel(0.25), 1), (ToricModel(0.3), 2),
])
def test_monad_residual_matches_adhm_residual(model, k):
    d = solve(k, model, cfg=SolveConfig(rng_seed=11,
                                        tolerance=1e-12 if k == 1 else 1e-10))
    theta = model.theta
    m = build_monad(d)
    assert monad_residual(m, model).eval_max_norm(theta) < 1e-9
    # generic perturbation of I: both residuals move by O(eps)
    eps = 1e-3
    dp = d.copy()
    dp.I = dp.I + eps
    mp = build_monad(dp)
    r_m = monad_residual(mp, model).eval_max_norm(theta)
    r_a = sum(adhm_residual(dp))
    assert r_a > eps / 10
    assert eps / 20 < r_m < 50 * eps


def test_monad_residual_perturbation_z1z2_coefficient():
    # perturbing B1 for k = 2 shows up in the z1 z2 sector at order eps
    model = ClassicalModel()
    d = solve(2, model, cfg=SolveConfig(rng_seed=5, tolerance=1e-10))
    eps = 1e-4
    dp = d.copy()
    dp.B1 = dp.B1 + eps * np.array([[0.0, 1.0], [0.0, 0.0]])
    res = monad_residual(build_monad(dp), model)
    coeffs = [abs(v) for b in range(2) for bp in range(2)
              for w, v in res.entries[b][bp].evaluated_coefficients().items()
              if w == (z(1), z(2))]
    assert max(coeffs) > eps / 10


def test_bosonise_monad_raw_legs():
    model = MoyalModel(0.25, 1.0, 1.0)
    d = canonical_moyal()
    m = build_monad(d)
    sigma, tau, rel = bosonise_monad(m, model, tilde_basis=False)
    # the M3 block multiplies t1* (x) z1 + t2* (x) z2 + 1 (x) z3
    t1s = model.hopf_letters()[1]
    t2s = model.hopf_letters()[3]
    entry = sigma.entries[0][0]  # M3 block has its identity at row 1
    assert entry.coefficient((z(1), t1s)).approx_eq(Coefficient(1.0))
    assert entry.coefficient((z(2), t2s)).approx_eq(Coefficient(1.0))
    assert entry.coefficient((z(3),)).approx_eq(Coefficient(1.0))

    # toric: sigma = sum_r M^r (x) varsigma_r (x) z_r
    dt = canonical_toric()
    st, _, relt = bosonise_monad(build_monad(dt), dt.model, tilde_basis=False)
    s2 = dt.model.hopf_letters()[2]
    assert st.entries[0][0].coefficient((z(3), s2)).approx_eq(Coefficient(1.0))

    # trivial coaction: plain matrices with unit Hopf parts
    dc = ADHMData.zero(1, ClassicalModel())
    dc.I[0, 0] = 1.0
    sc, _, _ = bosonise_monad(build_monad(dc), dc.model, tilde_basis=False)
    for a, row in enumerate(sc.entries):
        for p in row:
            for (w, h, mu), v in p.terms.items():
                assert all(g.space != HOPF_TRANS for g in w)


def test_bosonisation_multiplicative():
    """mu(x .twisted y) = mu(x) mu(y) on sampled twisted-tensor elements."""
    from ncadhm.hopf_twist import monad_m, smash_relations
    from ncadhm.star_algebra import C4, MONAD_M, NCPolynomial, normal_form

    model = MoyalModel(0.2, 1.0, 2.0)
    tensor_rel = derive_relations(model, (MONAD_M, C4), k=1, calculus=False)
    smash_rel = smash_relations(model, k=1, include_coordinates=True,
                                validate=False)

    def bosonise_word(word):
        out = NCPolynomial.one()
        for g in word:
            leg = NCPolynomial.zero()
            if g.space == MONAD_M:
                leg = NCPolynomial.from_generator(g)
            else:
                for c, hm, x in model.coaction(g):
                    leg = leg + NCPolynomial.from_word(hm.letters() + (x,), c)
            out = multiply(out, leg, smash_rel)
        return out

    rng = np.random.default_rng(8)
    gens = list(tensor_rel.generators)
    for _ in range(25):
        wa = tuple(gens[int(rng.integers(0, len(gens)))] for _ in range(2))
        wb = tuple(gens[int(rng.integers(0, len(gens)))] for _ in range(2))
        a = NCPolynomial.from_word(wa)
        b = NCPolynomial.from_word(wb)
        prod = multiply(a, b, tensor_rel)
        lhs = NCPolynomial.zero()
        for (w, h, m), v in prod.terms.items():
            lhs = lhs + bosonise_word(w).scale_coeff(Coefficient(v, h, m))
        lhs = normal_form(lhs, smash_rel)
        rhs = multiply(bosonise_word(wa), bosonise_word(wb), smash_rel)
        assert (lhs - rhs).eval_norm(model.theta) < 1e-10


@pytest.mark.parametrize("model", [
    MoyalModel(0.3, 1.0, 2.0), ToricModel(0.25), ClassicalModel(),
])
def test_tilde_subalgebra(model):
    rep = tilde_subalgebra_check(model, k=1)
    assert rep.passed
    assert rep["tilde_commutativity"].residual < 1e-12
    assert rep["smash_isomorphism"].residual < 1e-12


def test_tilde_coinvariance():
    for model in (MoyalModel(0.3, 1.0, 2.0), ToricModel(0.25),
                  ClassicalModel()):
        assert tilde_coinvariance_residual(model, k=1) < 1e-14


def test_adhm_data_json_roundtrip():
    d = canonical_toric()
    d2 = ADHMData.from_json_dict(d.to_json_dict())
    assert d2.k == d.k and d2.model.kind == "toric"
    for a, b in ((d.B1, d2.B1), (d.B2, d2.B2), (d.I, d2.I), (d.J, d2.J)):
        assert np.allclose(a, b)


def test_gauge_and_translate():
    d = solve(1, ClassicalModel(), cfg=SolveConfig(rng_seed=4))
    g = np.array([[np.exp(0.3j)]])
    dg = d.gauge_apply(g)
    assert abs(sum(adhm_residual(dg)) - sum(adhm_residual(d))) < 1e-12
    dt = d.translate(0.5, -0.25j)
    assert max(adhm_residual(dt)) < 1e-10  # translations preserve solutions


def test_shape_errors():
    with pytest.raises(ShapeError):
        ADHMData(1, ClassicalModel(), np.zeros((2, 2)), np.zeros((1, 1)),
                 np.zeros((1, 2)), np.zeros((2, 1)))
    with pytest.raises(ShapeError):
        ADHMData(0, ClassicalModel(), np.zeros((0, 0)), np.zeros((0, 0)),
                 np.zeros((0, 2)), np.zeros((2, 0)))
    with pytest.raises(ShapeError):
        d = ADHMData.zero(1, ClassicalModel())
        d.I[0, 0] = np.inf
        ADHMData(1, ClassicalModel(), d.B1, d.B2, d.I, d.J)
    with pytest.raises(ShapeError):
        MonadMatrices(1, [np.zeros((3, 1))] * 4, [np.zeros((1, 4))] * 4)

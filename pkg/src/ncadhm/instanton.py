"""Instanton projector, curvature, charge, and the deformed symbolic checks.

Numerics run on the classical model: the monad maps are evaluated on the
twistor line over a point of the plane, which pins the two extra coordinates
to z3 = zeta1* z1 + zeta2* z2 and z4 = zeta1 z2 - zeta2 z1; the section
(z1, z2) = (1, 0) then yields the standard pair of ADHM matrices

    sigma_(1) = M1 + zeta1* M3 - zeta2 M4,
    sigma_(2) = M2 + zeta2* M3 + zeta1 M4,

with sigma_(2) the image of the quaternionic partner map on that section.
Real coordinates are (Re zeta1, Im zeta1, Re zeta2, Im zeta2); the Hodge
operator is taken in the orientation in which this construction is
anti-self-dual (the construction fixes no orientation by itself).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._report import Check, Report
from .hopf_twist import TwistModel, smash_relations
from .monad import (
    ADHMData, MonadMatrices, PolyMatrix, ShapeError,
    bosonise_j_map, bosonise_monad, build_monad, monad_m,
)
from .star_algebra import (
    AUX, MONAD_M, Coefficient, GeneratorId, NCPolynomial, StarAlgebraError,
    adjoint, deglex_key, multiply, normal_form,
)


class ModelMismatch(StarAlgebraError):
    pass


class SingularRho(Exception):
    pass


class QuadratureBudgetExceeded(Exception):
    pass


SINGULAR_CUTOFF = 1e-10


@dataclass(frozen=True)
class PointR4:
    zeta1: complex
    zeta2: complex

    def __post_init__(self):
        if not (np.isfinite(complex(self.zeta1))
                and np.isfinite(complex(self.zeta2))):
            raise ShapeError("point coordinates must be finite")


@dataclass
class ConnectionSample:
    point: PointR4
    V: np.ndarray
    rho2: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    F: np.ndarray | None = None
    asd_residual: float | None = None


def _require_classical(data: ADHMData):
    if data.model.kind != "classical":
        raise ModelMismatch("numeric evaluation needs the classical model")


def _dag(a):
    return np.conj(np.swapaxes(a, -1, -2))


def monad_pair_at(m: MonadMatrices, z1, z2):
    """The two column blocks of the monad map over the point (batched)."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    M1, M2, M3, M4 = m.M
    s1 = (M1[None] + np.conj(z1)[..., None, None] * M3[None]
          - z2[..., None, None] * M4[None])
    s2 = (M2[None] + np.conj(z2)[..., None, None] * M3[None]
          + z1[..., None, None] * M4[None])
    return s1, s2


def _v_batch(m: MonadMatrices, z1, z2):
    s1, s2 = monad_pair_at(m, z1, z2)
    return np.concatenate([s1, s2], axis=-1)


# Constant coordinate derivatives of V in (Re z1, Im z1, Re z2, Im z2).
def _dv_tables(m: MonadMatrices):
    M3, M4 = m.M[2], m.M[3]

    def blocks(d1, d2):
        return np.concatenate([d1, d2], axis=-1)

    # sigma_(1) depends on zeta1* and zeta2, sigma_(2) on zeta2* and zeta1.
    d = {
        0: blocks(M3, M4),                 # d/d Re zeta1
        1: blocks(-1j * M3, 1j * M4),      # d/d Im zeta1
        2: blocks(-M4, M3),                # d/d Re zeta2
        3: blocks(-1j * M4, -1j * M3),     # d/d Im zeta2
    }
    return d


def evaluate_projector(data: ADHMData, x: PointR4) -> ConnectionSample:
    """The rank-2k projector Q and its complement P at one plane point."""
    _require_classical(data)
    m = build_monad(data)
    V = _v_batch(m, np.array([x.zeta1]), np.array([x.zeta2]))[0]
    s1, s2 = V[:, :data.k], V[:, data.k:]
    rho2 = _dag(s1) @ s1
    ev = np.linalg.eigvalsh(rho2)
    if ev.min() < SINGULAR_CUTOFF:
        raise SingularRho(f"sigma_min(rho2) = {ev.min():.3e} at {x}")
    G = _dag(V) @ V
    Q = V @ np.linalg.inv(G) @ _dag(V)
    P = np.eye(2 * data.k + 2) - Q
    return ConnectionSample(x, V, rho2, Q, P)


def _curvature_batch(m: MonadMatrices, z1, z2):
    """F_{mu nu} = P (d_mu V G^-1 d_nu V+ - (mu <-> nu)) P, batched.

    Valid on solutions, where G = V+V is block diagonal; the general
    projector curvature P[dP, dP]P is used by the finite-difference check.
    """
    V = _v_batch(m, z1, z2)
    G = _dag(V) @ V
    Ginv = np.linalg.inv(G)
    n = V.shape[-2]
    P = np.eye(n)[None] - V @ Ginv @ _dag(V)
    dV = _dv_tables(m)
    npts = V.shape[0]
    F = np.zeros((npts, 4, 4, n, n), dtype=complex)
    # dP/dx_mu, analytic
    dP = []
    for mu in range(4):
        Dv = np.broadcast_to(dV[mu], V.shape)
        dG = _dag(Dv) @ V + _dag(V) @ Dv
        dGinv = -Ginv @ dG @ Ginv
        term = Dv @ Ginv @ _dag(V) + V @ dGinv @ _dag(V) + V @ Ginv @ _dag(Dv)
        dP.append(-term)
    for mu in range(4):
        for nu in range(mu + 1, 4):
            Fmn = P @ (dP[mu] @ dP[nu] - dP[nu] @ dP[mu]) @ P
            F[:, mu, nu] = Fmn
            F[:, nu, mu] = -Fmn
    return F, P


# Hodge dual pairs in the orientation that makes the construction ASD:
# (*F)_{01} = -F_{23}, (*F)_{02} = +F_{13}, (*F)_{03} = -F_{12}.
_HODGE = [((0, 1), (2, 3), -1.0), ((0, 2), (1, 3), +1.0),
          ((0, 3), (1, 2), -1.0)]


def hodge_star(F):
    out = np.zeros_like(F)
    for (a, b), (c, d), s in _HODGE:
        out[:, a, b] = s * F[:, c, d]
        out[:, b, a] = -out[:, a, b]
        out[:, c, d] = s * F[:, a, b]
        out[:, d, c] = -out[:, c, d]
    return out


def _asd_residuals(F):
    S = F + hodge_star(F)
    num = np.sqrt(np.sum(np.abs(S) ** 2, axis=(1, 2, 3, 4)))
    den = np.sqrt(np.sum(np.abs(F) ** 2, axis=(1, 2, 3, 4)))
    den[den == 0] = 1.0
    return num / den


def curvature_asd(data: ADHMData, points) -> Report:
    """Analytic curvature and the anti-self-duality residual at the points."""
    _require_classical(data)
    m = build_monad(data)
    z1 = np.array([p.zeta1 for p in points], dtype=complex)
    z2 = np.array([p.zeta2 for p in points], dtype=complex)
    _guard_singular(m, z1, z2)
    F, _ = _curvature_batch(m, z1, z2)
    res = _asd_residuals(F)
    worst = float(res.max()) if len(res) else 0.0
    return Report([Check("asd_max_residual", worst <= 1e-6, worst, 1e-6)])


def curvature_samples(data: ADHMData, points):
    """ConnectionSamples with curvature and per-point ASD residuals."""
    _require_classical(data)
    m = build_monad(data)
    z1 = np.array([p.zeta1 for p in points], dtype=complex)
    z2 = np.array([p.zeta2 for p in points], dtype=complex)
    _guard_singular(m, z1, z2)
    F, P = _curvature_batch(m, z1, z2)
    res = _asd_residuals(F)
    out = []
    for i, p in enumerate(points):
        sample = evaluate_projector(data, p)
        sample.F = F[i]
        sample.asd_residual = float(res[i])
        out.append(sample)
    return out


def _guard_singular(m, z1, z2):
    s1, _ = monad_pair_at(m, z1, z2)
    rho2 = _dag(s1) @ s1
    ev = np.linalg.eigvalsh(rho2)
    if ev.min() < SINGULAR_CUTOFF:
        raise SingularRho("zero-size locus hit by a sample point")


def finite_difference_curvature(data: ADHMData, x: PointR4, step=1e-5):
    """Central-difference curvature from projector samples, for cross-checks."""
    _require_classical(data)
    m = build_monad(data)

    def P_at(v):
        z1 = np.array([v[0] + 1j * v[1]])
        z2 = np.array([v[2] + 1j * v[3]])
        V = _v_batch(m, z1, z2)[0]
        G = _dag(V) @ V
        return np.eye(V.shape[0]) - V @ np.linalg.inv(G) @ _dag(V)

    v0 = np.array([x.zeta1.real, x.zeta1.imag, x.zeta2.real, x.zeta2.imag])
    P0 = P_at(v0)
    dP = []
    for mu in range(4):
        vp, vm = v0.copy(), v0.copy()
        vp[mu] += step
        vm[mu] -= step
        dP.append((P_at(vp) - P_at(vm)) / (2 * step))
    n = P0.shape[0]
    F = np.zeros((1, 4, 4, n, n), dtype=complex)
    for mu in range(4):
        for nu in range(mu + 1, 4):
            Fmn = P0 @ (dP[mu] @ dP[nu] - dP[nu] @ dP[mu]) @ P0
            F[0, mu, nu] = Fmn
            F[0, nu, mu] = -Fmn
    return F


# -- topological charge ----------------------------------------------------------

@dataclass
class QuadratureSpec:
    resolution: int = 12
    radial_scale: float | None = None
    max_points: int = 5_000_000

    def node_counts(self):
        r = self.resolution
        return (4 * r, r, r, 2 * r)


def _density(m: MonadMatrices, z1, z2):
    F, _ = _curvature_batch(m, z1, z2)
    t = (np.einsum("pij,pji->p", F[:, 0, 1], F[:, 2, 3])
         - np.einsum("pij,pji->p", F[:, 0, 2], F[:, 1, 3])
         + np.einsum("pij,pji->p", F[:, 0, 3], F[:, 1, 2]))
    # orientation fixed with the Hodge convention above; sign pinned so the
    # unit-charge reference datum integrates to +1
    return -np.real(t) / (4 * np.pi ** 2)


def charge_density(data: ADHMData, z1, z2):
    """(1 / 8 pi^2) tr F wedge F contracted against the volume form."""
    return _density(build_monad(data), z1, z2)


def charge(data: ADHMData, quad: QuadratureSpec | None = None,
           center=(0.0, 0.0)) -> float:
    """Quadrature of the charge density over the plane.

    Product rule: mapped Gauss-Legendre radially, Gauss-Legendre in the two
    polar angles of the three-sphere, trapezoid in the periodic angle.
    """
    _require_classical(data)
    quad = quad or QuadratureSpec()
    n_r, n_t1, n_t2, n_p = quad.node_counts()
    if n_r * n_t1 * n_t2 * n_p > quad.max_points:
        raise QuadratureBudgetExceeded(
            f"{n_r * n_t1 * n_t2 * n_p} points exceed {quad.max_points}")
    scale = quad.radial_scale or _charge_scale(data)

    xs, ws = np.polynomial.legendre.leggauss(n_r)
    s = 0.5 * (xs + 1.0)
    ws = 0.5 * ws
    r = scale * s / (1.0 - s)
    dr = scale * ws / (1.0 - s) ** 2

    t1, w1 = np.polynomial.legendre.leggauss(n_t1)
    t1 = 0.5 * np.pi * (t1 + 1.0)
    w1 = 0.5 * np.pi * w1 * np.sin(t1) ** 2
    t2, w2 = np.polynomial.legendre.leggauss(n_t2)
    t2 = 0.5 * np.pi * (t2 + 1.0)
    w2 = 0.5 * np.pi * w2 * np.sin(t2)
    phi = 2.0 * np.pi * np.arange(n_p) / n_p
    wp = np.full(n_p, 2.0 * np.pi / n_p)

    m = build_monad(data)
    T1, T2, PH = np.meshgrid(t1, t2, phi, indexing="ij")
    W = (w1[:, None, None] * w2[None, :, None] * wp[None, None, :]).ravel()
    omega1 = (np.cos(T1) + 1j * np.sin(T1) * np.cos(T2)).ravel()
    omega2 = (np.sin(T1) * np.sin(T2)
              * (np.cos(PH) + 1j * np.sin(PH))).ravel()
    total = 0.0
    c1, c2 = center
    for ri, dri in zip(r, dr):
        q = _density(m, ri * omega1 + c1, ri * omega2 + c2)
        total += dri * ri ** 3 * float(np.sum(q * W))
    return float(total)


def _charge_scale(data: ADHMData) -> float:
    norm = np.sqrt(np.linalg.norm(data.I) ** 2 + np.linalg.norm(data.J) ** 2
                   + np.linalg.norm(data.B1) ** 2
                   + np.linalg.norm(data.B2) ** 2)
    return max(1.0, float(norm))


# -- deformed symbolic pipeline ----------------------------------------------------

RHO2_INV = GeneratorId(AUX, 1)


def _reduce_by_inverse(p: NCPolynomial, rho2: NCPolynomial, rel,
                       max_steps=20000) -> NCPolynomial:
    """Reduce modulo the two-sided relation inv(rho2) * rho2 = 1.

    Standard leading-monomial division: the inverse letter is central, so
    any term containing it together with the leading word of rho2 (as a
    sub-multiset) is rewritten by subtracting a multiple of the ideal
    element (inv(rho2) rho2 - 1) * cofactor.
    """
    p = normal_form(p, rel)
    lead_key = max(rho2.terms, key=lambda kv: (deglex_key(kv[0]), kv[1], kv[2]))
    lw, lh, _ = lead_key
    if lh != 0:
        raise StarAlgebraError("rho2 leading coefficient is not invertible")
    steps = 0
    while True:
        target = None
        for (w, h, m), v in sorted(p.terms.items(), reverse=True,
                                   key=lambda kv: deglex_key(kv[0][0])):
            if RHO2_INV not in w:
                continue
            rest = list(w)
            rest.remove(RHO2_INV)
            pos = _submultiset(tuple(rest), lw)
            if pos is not None:
                cof = tuple(x for i, x in enumerate(rest) if i not in pos)
                target = (w, h, m, v, cof)
                break
        if target is None:
            return p
        steps += 1
        if steps > max_steps:
            raise StarAlgebraError("inverse reduction stalled")
        w, h, m, v, cof = target
        prod = multiply(NCPolynomial.from_word((RHO2_INV,)),
                        multiply(rho2, NCPolynomial.from_word(cof), rel), rel)
        hit = [(ph, pm, pv) for (pw, ph, pm), pv in prod.terms.items()
               if pw == w]
        if not hit:
            raise StarAlgebraError("inverse reduction lost its leading term")
        ph, pm, pv = hit[0]
        cc = Coefficient(v / pv, h - ph, m - pm)
        p = p - prod.scale_coeff(cc) \
            + NCPolynomial.from_word(cof).scale_coeff(cc)
        p = normal_form(p, rel)


def _submultiset(word, sub):
    pos = []
    i = 0
    for s in sub:
        while i < len(word) and word[i] != s:
            i += 1
        if i == len(word):
            return None
        pos.append(i)
        i += 1
    return set(pos)


def symbolic_projector_checks(data: ADHMData, model: TwistModel | None = None,
                              tol: float = 1e-10) -> Report:
    """The four smash-algebra identities behind the deformed projector.

    (1) the monad pairing tau sigma vanishes (via the self-conjugate
    identification this is the orthogonality of the quaternionic pair),
    (2) both squared maps agree (the polarised identity), (3) the entries
    of rho2 built from symbolic monad generators commute with every
    generator of the bosonised algebra, (4) with a formal central inverse
    of rho2 adjoined, Q^2 - Q reduces to zero.  The last check uses a
    scalar inverse and is emitted for index-one data only.
    """
    model = model or data.model
    theta = model.theta
    m = build_monad(data)
    sigma, tau, rel = bosonise_monad(m, model)
    sigma_j = bosonise_j_map(m, model)

    checks = []
    comp = tau.matmul(sigma, rel).map(lambda p: normal_form(p, rel))
    r1 = comp.eval_max_norm(theta)
    checks.append(Check("monad_orthogonality", r1 <= tol, r1, tol))

    rho_a = sigma.adjoint(rel).matmul(sigma, rel)
    rho_b = sigma_j.adjoint(rel).matmul(sigma_j, rel)
    r2 = (rho_a - rho_b).map(lambda p: normal_form(p, rel)).eval_max_norm(theta)
    checks.append(Check("polarised_rho2", r2 <= tol, r2, tol))

    r3 = _centrality_residual(model, data.k)
    checks.append(Check("rho2_centrality", r3 <= tol, r3, tol))

    if data.k == 1:
        # the formal inverse is a single central symbol; index one only
        r4 = _projector_idempotency_residual(sigma, sigma_j, rho_a, rel, theta)
        checks.append(Check("projector_idempotent", r4 <= tol, r4, tol))
    return Report(checks)


def _centrality_residual(model: TwistModel, k: int) -> float:
    """Centrality of rho2 with symbolic monad generators (family level).

    The bosonised algebra is generated by the monad entries together with
    the Hopf-dressed coordinate functions; the entries of rho2 built from
    symbolic generators commute with all of them (for the torus model this
    is the zero-net-weight bookkeeping).
    """
    rel = smash_relations(model, k=k, include_coordinates=True,
                          validate=False)
    from .hopf_twist import z as z_gen

    def sym(j, a, b):
        out = NCPolynomial.zero()
        for c, hm, x in model.coaction(z_gen(j)):
            out = out + NCPolynomial.from_word(
                (monad_m(j, a, b),) + hm.letters() + (x,), c)
        return normal_form(out, rel)

    def dressed_coordinate(j, conj=False):
        g = z_gen(j, conj)
        out = NCPolynomial.zero()
        for c, hm, x in model.coaction(g):
            out = out + NCPolynomial.from_word(hm.letters() + (x,), c)
        return normal_form(out, rel)

    test_elements = [NCPolynomial.from_generator(g) for g in rel.generators
                     if g.space == MONAD_M]
    for j in range(1, 5):
        test_elements.append(dressed_coordinate(j))
        test_elements.append(dressed_coordinate(j, conj=True))

    worst = 0.0
    n = 2 * k + 2
    for b in range(1, k + 1):
        for bp in range(1, k + 1):
            rho = NCPolynomial.zero()
            for a in range(1, n + 1):
                for j in range(1, 5):
                    for l in range(1, 5):
                        col = sym(l, a, bp)
                        rowstar = adjoint(sym(j, a, b), rel)
                        rho = rho + multiply(rowstar, col, rel)
            for gp in test_elements:
                comm = multiply(rho, gp, rel) - multiply(gp, rho, rel)
                worst = max(worst, comm.eval_norm(model.theta))
    return worst


def _projector_idempotency_residual(sigma, sigma_j, rho2_mat, rel, theta):
    """Q^2 - Q with the formal inverse adjoined (index-one data).

    The brute expansion decomposes exactly as

        Q^2 - Q = V r (V*V - rho2) r V* + V (r rho2 r - r) V*,

    an identity of word arithmetic that is asserted structurally; the first
    piece vanishes on evaluation by the orthogonality and polarisation
    identities, the second reduces to zero by the defining relation of the
    formal inverse.
    """
    rho2 = rho2_mat.entries[0][0]
    gens = list(rel.generators) + [RHO2_INV]
    from .star_algebra import RelationSystem
    rel2 = RelationSystem(gens, dict(rel.rules), theta=rel.theta,
                          meta=rel.meta)
    rinv = NCPolynomial.from_word((RHO2_INV,))

    n = sigma.shape[0]
    blocks = [sigma, sigma_j]
    stars = [b.adjoint(rel2) for b in blocks]

    def qmat():
        Q = [[NCPolynomial.zero() for _ in range(n)] for _ in range(n)]
        for blk, bstar in zip(blocks, stars):
            for a in range(n):
                for b in range(n):
                    Q[a][b] = Q[a][b] + multiply(
                        blk.entries[a][0],
                        multiply(rinv, bstar.entries[0][b], rel2), rel2)
        return PolyMatrix(Q)

    Qm = qmat()
    E1 = Qm.matmul(Qm, rel2) - Qm

    # D_{bc} = (V*V - rho2 1)_{bc}
    D = [[normal_form(sum((multiply(stars[b].entries[0][a],
                                    blocks[c].entries[a][0], rel2)
                           for a in range(n)), NCPolynomial.zero())
                      - (rho2 if b == c else NCPolynomial.zero()), rel2)
          for c in range(2)] for b in range(2)]

    sandwich = [[NCPolynomial.zero() for _ in range(n)] for _ in range(n)]
    for b in range(2):
        for c in range(2):
            core = multiply(rinv, multiply(D[b][c], rinv, rel2), rel2)
            for a in range(n):
                for ap in range(n):
                    sandwich[a][ap] = sandwich[a][ap] + multiply(
                        blocks[b].entries[a][0],
                        multiply(core, stars[c].entries[0][ap], rel2), rel2)
    sandwich = PolyMatrix(sandwich)

    X = multiply(rinv, multiply(rho2, rinv, rel2), rel2) - rinv
    inner = [[NCPolynomial.zero() for _ in range(n)] for _ in range(n)]
    for b in range(2):
        for a in range(n):
            for ap in range(n):
                inner[a][ap] = inner[a][ap] + multiply(
                    blocks[b].entries[a][0],
                    multiply(X, stars[b].entries[0][ap], rel2), rel2)
    inner = PolyMatrix(inner)

    # structural identity: raw coefficients, no parameter evaluation
    struct = 0.0
    decomp = E1 - sandwich - inner
    for row in decomp.entries:
        for p in row:
            q = normal_form(p, rel2)
            struct = max(struct, max((abs(v) for v in q.terms.values()),
                                     default=0.0))

    x_red = _reduce_by_inverse(X, rho2, rel2)
    res = max(struct, sandwich.eval_max_norm(theta),
              x_red.eval_norm(theta))
    return res

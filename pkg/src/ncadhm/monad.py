"""ADHM data, monad matrices, and the symbolic monad identities.

The matrix conventions: B1, B2 are k x k, I is k x 2, J is 2 x k, so that
every term of the two quadratic equations is k x k.  The dagger is the
conjugate transpose.  The canonical self-conjugate block forms insert the
torus phase mu into the N1/M2 blocks; the classical and translation models
use mu = 1.  The translation model's Hermitian equation carries the real
deformation level zeta = hbar (alpha + beta) on the right-hand side.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._report import Check, Report
from .hopf_twist import (
    ClassicalModel, TwistModel, coordinate_smash_relations,
    hopf_letter_monomial, model_from_json, monad_m, smash_relations, z,
)
from .star_algebra import (
    Coefficient, NCPolynomial, StarAlgebraError, adjoint, multiply,
    normal_form,
)


class ShapeError(StarAlgebraError):
    pass


SYMBOLIC_TOL = 1e-10


# -- numeric data -------------------------------------------------------------

def _as_complex(a, shape, name):
    a = np.asarray(a, dtype=complex)
    if a.shape != shape:
        raise ShapeError(f"{name} must have shape {shape}, got {a.shape}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ShapeError(f"{name} has non-finite entries")
    return a


@dataclass
class ADHMData:
    """Matrices (B1, B2, I, J) with their deformation model."""

    k: int
    model: TwistModel
    B1: np.ndarray
    B2: np.ndarray
    I: np.ndarray
    J: np.ndarray

    def __post_init__(self):
        if self.k < 1:
            raise ShapeError("k must be a positive integer")
        k = self.k
        self.B1 = _as_complex(self.B1, (k, k), "B1")
        self.B2 = _as_complex(self.B2, (k, k), "B2")
        self.I = _as_complex(self.I, (k, 2), "I")
        self.J = _as_complex(self.J, (2, k), "J")

    @staticmethod
    def zero(k, model=None) -> "ADHMData":
        model = model or ClassicalModel()
        return ADHMData(k, model, np.zeros((k, k)), np.zeros((k, k)),
                        np.zeros((k, 2)), np.zeros((2, k)))

    def copy(self) -> "ADHMData":
        return ADHMData(self.k, self.model, self.B1.copy(), self.B2.copy(),
                        self.I.copy(), self.J.copy())

    def gauge_apply(self, g) -> "ADHMData":
        """U(k) action B -> g B g^-1, I -> g I, J -> J g^-1 (g unitary)."""
        g = _as_complex(g, (self.k, self.k), "g")
        gi = np.conj(g.T)
        return ADHMData(self.k, self.model, g @ self.B1 @ gi,
                        g @ self.B2 @ gi, g @ self.I, self.J @ gi)

    def translate(self, c1, c2) -> "ADHMData":
        """Shift the instanton center: zeta_j -> zeta_j + c_j."""
        eye = np.eye(self.k)
        return ADHMData(self.k, self.model,
                        self.B1 + np.conj(c1) * eye, self.B2 - c2 * eye,
                        self.I.copy(), self.J.copy())

    def parameter_vector(self) -> np.ndarray:
        blocks = [self.B1, self.B2, self.I, self.J]
        return np.concatenate([np.concatenate([b.real.ravel(), b.imag.ravel()])
                               for b in blocks])

    @staticmethod
    def from_parameter_vector(k, model, v) -> "ADHMData":
        sizes = [(k, k), (k, k), (k, 2), (2, k)]
        mats = []
        at = 0
        for shape in sizes:
            n = shape[0] * shape[1]
            re = v[at:at + n].reshape(shape)
            im = v[at + n:at + 2 * n].reshape(shape)
            mats.append(re + 1j * im)
            at += 2 * n
        return ADHMData(k, model, *mats)

    # -- JSON wire format --------------------------------------------------
    def to_json_dict(self) -> dict:
        def mat(a):
            return [[[float(x.real), float(x.imag)] for x in row] for row in a]
        return {"k": self.k, "model": self.model.to_json_dict(),
                "B1": mat(self.B1), "B2": mat(self.B2),
                "I": mat(self.I), "J": mat(self.J)}

    @staticmethod
    def from_json_dict(obj) -> "ADHMData":
        if isinstance(obj, str):
            obj = json.loads(obj)

        def mat(rows):
            return np.array([[complex(p[0], p[1]) for p in row]
                             for row in rows])
        return ADHMData(int(obj["k"]), model_from_json(obj["model"]),
                        mat(obj["B1"]), mat(obj["B2"]),
                        mat(obj["I"]), mat(obj["J"]))


def adhm_residual(data: ADHMData):
    """Frobenius norms of the complex and the Hermitian equation defects."""
    mu = data.model.mu
    B1, B2, I, J = data.B1, data.B2, data.I, data.J
    complex_eq = np.conj(mu) * B1 @ B2 - mu * B2 @ B1 + I @ J
    herm = (B1 @ _dag(B1) - _dag(B1) @ B1 + B2 @ _dag(B2) - _dag(B2) @ B2
            + I @ _dag(I) - _dag(J) @ J
            - data.model.zeta_level * np.eye(data.k))
    return float(np.linalg.norm(complex_eq)), float(np.linalg.norm(herm))


def _dag(a):
    return np.conj(a.T)


# -- monad matrices ------------------------------------------------------------

@dataclass
class MonadMatrices:
    """Constant matrices of the two module maps, M^j and N^j."""

    k: int
    M: list  # four (2k+2) x k arrays
    N: list  # four k x (2k+2) arrays
    self_conjugate: bool = True

    def __post_init__(self):
        k = self.k
        self.M = [_as_complex(m, (2 * k + 2, k), f"M{j + 1}")
                  for j, m in enumerate(self.M)]
        self.N = [_as_complex(n, (k, 2 * k + 2), f"N{j + 1}")
                  for j, n in enumerate(self.N)]

    def reality_residual(self) -> float:
        """Defect of N1 = M2+, N2 = -M1+, N3 = M4+, N4 = -M3+."""
        pairs = [(self.N[0], _dag(self.M[1])), (self.N[1], -_dag(self.M[0])),
                 (self.N[2], _dag(self.M[3])), (self.N[3], -_dag(self.M[2]))]
        return max(float(np.linalg.norm(a - b)) for a, b in pairs)

    def transform_W(self, W) -> "MonadMatrices":
        """Right module change of basis sigma -> sigma W (W invertible k x k)."""
        W = _as_complex(W, (self.k, self.k), "W")
        Winv = np.linalg.inv(W)
        return MonadMatrices(self.k, [m @ W for m in self.M],
                             [Winv @ n for n in self.N],
                             self_conjugate=False)

    def transform_U(self, U) -> "MonadMatrices":
        """Unitary change of basis sigma -> U sigma on the middle module."""
        n = 2 * self.k + 2
        U = _as_complex(U, (n, n), "U")
        M = [U @ m for m in self.M]
        N = [x @ _dag(U) for x in self.N]
        out = MonadMatrices(self.k, M, N, self_conjugate=False)
        out.self_conjugate = out.reality_residual() < 1e-10
        return out


def build_monad(data: ADHMData) -> MonadMatrices:
    """Canonical self-conjugate monad matrices for the given ADHM data."""
    k = data.k
    mu = data.model.mu
    mub = np.conj(mu)
    Ik = np.eye(k)
    Z = np.zeros((k, k))
    Z2 = np.zeros((2, k))
    M3 = np.vstack([Ik, Z, Z2])
    M4 = np.vstack([Z, Ik, Z2])
    M1 = np.vstack([data.B1, data.B2, data.J])
    M2 = np.vstack([-mub * _dag(data.B2), mu * _dag(data.B1), _dag(data.I)])
    N1, N2, N3, N4 = _dag(M2), -_dag(M1), _dag(M4), -_dag(M3)
    return MonadMatrices(k, [M1, M2, M3, M4], [N1, N2, N3, N4],
                         self_conjugate=True)


# -- polynomial-valued matrices --------------------------------------------------

class PolyMatrix:
    """Dense matrix with noncommutative-polynomial entries."""

    def __init__(self, entries):
        self.entries = [list(row) for row in entries]
        self.shape = (len(self.entries),
                      len(self.entries[0]) if self.entries else 0)

    @staticmethod
    def from_scalar_matrices(mats_and_polys, shape):
        """sum of (numeric matrix) * (polynomial) pairs."""
        rows, cols = shape
        entries = [[NCPolynomial.zero() for _ in range(cols)]
                   for _ in range(rows)]
        for mat, poly in mats_and_polys:
            for a in range(rows):
                for b in range(cols):
                    v = complex(mat[a, b])
                    if v != 0:
                        entries[a][b] = entries[a][b] + poly.scale(v)
        return PolyMatrix(entries)

    def matmul(self, other: "PolyMatrix", rel) -> "PolyMatrix":
        rows, inner = self.shape
        inner2, cols = other.shape
        if inner != inner2:
            raise ShapeError("polynomial matrix shape mismatch")
        out = [[NCPolynomial.zero() for _ in range(cols)] for _ in range(rows)]
        for a in range(rows):
            for c in range(cols):
                acc = NCPolynomial.zero()
                for b in range(inner):
                    acc = acc + multiply(self.entries[a][b],
                                         other.entries[b][c], rel)
                out[a][c] = acc
        return PolyMatrix(out)

    def adjoint(self, rel) -> "PolyMatrix":
        rows, cols = self.shape
        return PolyMatrix([[adjoint(self.entries[a][b], rel)
                            for a in range(rows)] for b in range(cols)])

    def __add__(self, other):
        return PolyMatrix([[x + y for x, y in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return PolyMatrix([[x - y for x, y in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def scale(self, c):
        return PolyMatrix([[x.scale(c) for x in row] for row in self.entries])

    def map(self, f):
        return PolyMatrix([[f(x) for x in row] for row in self.entries])

    def eval_max_norm(self, theta=None) -> float:
        return max((x.eval_norm(theta) for row in self.entries for x in row),
                   default=0.0)


# -- bosonised monad maps ---------------------------------------------------------

def bosonise_monad(m: MonadMatrices, model: TwistModel, tilde_basis=True):
    """Smash-valued monad maps over (Hopf letters) x (deformed coordinates).

    With ``tilde_basis`` the numeric blocks are read as values of the
    commuting tilde generators (the convention of the canonical forms);
    without it they multiply the raw coaction legs.  Returns
    ``(sigma, tau, rel)``.
    """
    rel = coordinate_smash_relations(model, validate=False)
    sigma = _dressed_map(m.M, model, _z_letters(), tilde_basis,
                         (2 * m.k + 2, m.k)).map(lambda p: normal_form(p, rel))
    tau = _dressed_map(m.N, model, _z_letters(), tilde_basis,
                       (m.k, 2 * m.k + 2)).map(lambda p: normal_form(p, rel))
    return sigma, tau, rel


def _z_letters():
    return [z(j) for j in range(1, 5)]


def _j_letters():
    # J(z_1..z_4) = (-z2*, z1*, -z4*, z3*) as signed letters
    return [(-1.0, z(2, True)), (1.0, z(1, True)),
            (-1.0, z(4, True)), (1.0, z(3, True))]


def _dressed_map(blocks, model, letters, tilde_basis, shape, signs=None):
    """sum_r M^r (x) (coaction of letter_r), optionally in the tilde basis."""
    signs = signs or [1.0] * 4
    wpolys = {s: NCPolynomial.zero() for s in range(1, 5)}
    for r in range(4):
        for c, hm, x in model.coaction(letters[r]):
            if tilde_basis:
                for c2, s, hm2 in model.tilde_decompose(r + 1, hm):
                    wpolys[s] = wpolys[s] + NCPolynomial.from_word(
                        hm2.letters() + (x,), signs[r] * c * c2)
            else:
                wpolys[r + 1] = wpolys[r + 1] + NCPolynomial.from_word(
                    hm.letters() + (x,), signs[r] * c)
    return PolyMatrix.from_scalar_matrices(
        [(blocks[s - 1], wpolys[s]) for s in range(1, 5)], shape)


def bosonise_j_map(m: MonadMatrices, model: TwistModel, tilde_basis=True):
    """The quaternionic partner map sigma_{J(z)} in the smash picture.

    For self-conjugate data this coincides with the adjoint of the
    bosonised tau map.
    """
    rel = coordinate_smash_relations(model, validate=False)
    signs = [s for s, _ in _j_letters()]
    letters = [g for _, g in _j_letters()]
    out = _dressed_map(m.M, model, letters, tilde_basis, (2 * m.k + 2, m.k),
                       signs=signs)
    return out.map(lambda p: normal_form(p, rel))


def monad_residual(m: MonadMatrices, model: TwistModel) -> PolyMatrix:
    """Normal form of tau compose sigma in the twisted algebra.

    All-zero (after numeric evaluation of the formal parameters) exactly
    when the deformed ADHM equations hold.  For the translation model the
    composition picks up the constant shift i hbar (alpha + beta) on the
    z1 z2 word from reordering z4 z3.
    """
    sigma, tau, rel = bosonise_monad(m, model)
    comp = tau.matmul(sigma, rel)
    return comp.map(lambda p: normal_form(p, rel))


def monad_residual_norm(m: MonadMatrices, model: TwistModel) -> float:
    return monad_residual(m, model).eval_max_norm(model.theta)


# -- tilde subalgebra -----------------------------------------------------------

def tilde_generator_polys(model: TwistModel, k=1):
    """The commuting generators inside the smash product, as polynomials.

    Returns ``{(j, row, col, conj): NCPolynomial}`` over monad + Hopf letters.
    """
    out = {}
    rel = smash_relations(model, k=k, include_coordinates=False,
                          validate=False)
    for j in range(1, 5):
        for a in range(1, 2 * k + 3):
            for b in range(1, k + 1):
                p = NCPolynomial.zero()
                for c2, s, hm in _tilde_words(model, j):
                    p = p + NCPolynomial.from_word(
                        (monad_m(s, a, b),) + hm.letters(), c2)
                out[(j, a, b, False)] = p
                out[(j, a, b, True)] = adjoint(p, rel)
    return out, rel


def _tilde_words(model, j):
    """Expansion of the j-th tilde generator over plain monad generators."""
    unit = model.hopf_unit()
    if model.kind == "moyal":
        from .hopf_twist import T1, T1S, T2, T2S
        if j == 1:
            return [(1.0, 1, unit), (0.5, 3, T1S), (-0.5, 4, T2)]
        if j == 2:
            return [(1.0, 2, unit), (0.5, 3, T2S), (0.5, 4, T1)]
        return [(1.0, j, unit)]
    if model.kind == "toric":
        from .hopf_twist import VARSIGMA
        if j in (1, 2):
            return [(1.0, j, VARSIGMA[j - 1])]
        return [(1.0, j, unit)]
    return [(1.0, j, unit)]


def tilde_subalgebra_check(model: TwistModel, k=1, rng_seed=7,
                           n_phi_samples=24) -> Report:
    """Commutativity of the tilde generators and the smash isomorphism.

    Checks every pairwise commutator of the tilde generators (including
    conjugates) and, on sampled pairs, that mapping the abstract smash
    product through the generator images preserves the cross relations
    with the Hopf letters.
    """
    tilde, rel = tilde_generator_polys(model, k)
    theta = model.theta
    worst_comm = 0.0
    keys = sorted(tilde)
    for i, ka in enumerate(keys):
        for kb in keys[:i]:
            a, b = tilde[ka], tilde[kb]
            comm = multiply(a, b, rel) - multiply(b, a, rel)
            worst_comm = max(worst_comm, comm.eval_norm(theta))
    checks = [Check("tilde_commutativity", worst_comm <= SYMBOLIC_TOL,
                    worst_comm, SYMBOLIC_TOL)]

    # phi respects the cross relations: phi((1 (x) h)(T (x) 1)) =
    # phi(1 (x) h) phi(T (x) 1) with the primed action on the left side.
    rng = np.random.default_rng(rng_seed)
    worst_phi = 0.0
    hopf = list(model.hopf_letters())
    if hopf:
        for _ in range(n_phi_samples):
            hg = hopf[int(rng.integers(0, len(hopf)))]
            key = keys[int(rng.integers(0, len(keys)))]
            tpoly = tilde[key]
            rhs = multiply(NCPolynomial.from_generator(hg), tpoly, rel)
            lhs = _primed_product(model, hg, key, tilde, rel)
            worst_phi = max(worst_phi, (lhs - rhs).eval_norm(theta))
    checks.append(Check("smash_isomorphism", worst_phi <= SYMBOLIC_TOL,
                        worst_phi, SYMBOLIC_TOL))
    return Report(checks)


def _primed_product(model, hg, key, tilde, rel):
    """(1 (x) h)(T~ (x) 1) expanded with the primed action, then phi-imaged."""
    j, a, b, conj = key
    hm = hopf_letter_monomial(hg)
    out = NCPolynomial.zero()
    if model.kind == "moyal":
        # primitive coproduct: T~ (x) h + (h |>' T~) (x) 1
        out = out + multiply(tilde[key], NCPolynomial.from_generator(hg), rel)
        for c, j2 in _primed_action_moyal(model, hm, j, conj):
            out = out + tilde[(j2, a, b, conj)].scale_coeff(c)
    else:
        # group-like: (h |>' T~) (x) h
        phase = _primed_action_toric(model, hm, j, conj)
        out = multiply(tilde[key], NCPolynomial.from_generator(hg), rel)
        out = out.scale_coeff(phase)
    return out


def _primed_action_moyal(model, hm, j, conj):
    """Primed action table on the tilde generators (translation model).

    The t1-family maps the first tilde generator to the third and the
    second to the fourth; the t2-family crosses them over.
    """
    h = model.hbar
    al, be = model.alpha, model.beta
    from .hopf_twist import T1, T1S, T2, T2S
    table = {
        (T1.exps, 1, False): (Coefficient(1j * h * al, 1), 3),
        (T1S.exps, 1, True): (Coefficient(-1j * h * al, 1), 3),
        (T1S.exps, 2, False): (Coefficient(-1j * h * al, 1), 4),
        (T1.exps, 2, True): (Coefficient(1j * h * al, 1), 4),
        (T2S.exps, 1, False): (Coefficient(-1j * h * be, 1), 4),
        (T2.exps, 1, True): (Coefficient(1j * h * be, 1), 4),
        (T2.exps, 2, False): (Coefficient(-1j * h * be, 1), 3),
        (T2S.exps, 2, True): (Coefficient(1j * h * be, 1), 3),
    }
    hit = table.get((hm.exps, j, conj))
    return [hit] if hit else []


def tilde_coinvariance_residual(model: TwistModel, k=1) -> float:
    """Defect of delta_R(T) = T (x) 1 for every tilde generator.

    The right coaction id (x) Delta acts on the Hopf tails; re-expressing
    each tilde generator's smash image in the commuting basis must leave a
    unit tail, which is exactly the coinvariance statement.  Group-like
    tails make this an exact phase computation for the torus model.
    """
    worst = 0.0
    for j in range(1, 5):
        tails = {}
        for c, s, hm in _tilde_words(model, j):
            for c2, s2, hm2 in model.tilde_decompose(s, hm):
                key = (s2, hm2)
                tails[key] = tails.get(key, 0.0) + c * c2
        for (s2, hm2), v in tails.items():
            if abs(v) < 1e-14:
                continue
            expected = 1.0 if (s2 == j and hm2.is_unit()) else 0.0
            worst = max(worst, abs(v - expected))
    return worst


def _primed_action_toric(model, hm, j, conj):
    """varsigma_l |>' Mtilde^j = eta_{lj} Mtilde^j (conjugates flipped)."""
    from .hopf_twist import VARSIGMA, r_matrix
    w = VARSIGMA[j - 1]
    if conj:
        w = w.star()
    return r_matrix(model, w.star(), hm)

"""Symmetry models and the twisted-product machinery.

Two concrete models drive the deformations: translations of the plane (the
Heisenberg-type deformation, parameters ``hbar, alpha, beta``) and a
two-torus of rotations (phase deformation, parameter ``theta``).  Each model
knows the coactions of every supported generator family, evaluates its
twisting two-cocycle F and the induced R-matrix, computes twisted products
of classical polynomials, and derives complete rewrite systems from them.

The sign of the torus cocycle is the convention under which the phase
matrix of the deformed coordinates comes out with
``eta_13 = mu = exp(i*pi*theta)``; the opposite sign would produce the
conjugate phases throughout.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

import numpy as np

from .star_algebra import (
    C4, HOPF_TORUS, HOPF_TRANS, MONAD_M, R4,
    Coefficient, GeneratorId, NCPolynomial, NonConfluent, RelationSystem,
    StarAlgebraError, associativity_residual, classical_normal_form_word,
    deglex_key, star_closure_residual,
)


class ModelMismatch(StarAlgebraError):
    pass


class MissingCoaction(StarAlgebraError):
    pass


# -- Hopf monomials ----------------------------------------------------------

@dataclass(frozen=True)
class TransMonomial:
    """Monomial t1^a t1*^b t2^c t2*^d in the translation Hopf algebra."""

    exps: tuple = (0, 0, 0, 0)

    def degree(self):
        return sum(self.exps)

    def is_unit(self):
        return self.degree() == 0

    def __mul__(self, other):
        return TransMonomial(tuple(a + b for a, b in zip(self.exps, other.exps)))

    def star(self):
        a, b, c, d = self.exps
        return TransMonomial((b, a, d, c))

    def antipode_sign(self):
        return (-1) ** self.degree()

    def coproduct(self):
        """All splittings with multinomial weights: Delta(t) = 1 x t + t x 1."""
        return _trans_coproduct(self.exps)

    def letters(self):
        gens = (GeneratorId(HOPF_TRANS, 1), GeneratorId(HOPF_TRANS, 1, True),
                GeneratorId(HOPF_TRANS, 2), GeneratorId(HOPF_TRANS, 2, True))
        word = []
        for g, e in zip(gens, self.exps):
            word.extend([g] * e)
        return tuple(word)


@dataclass(frozen=True)
class TorusMonomial:
    """Group-like monomial s1^m s2^n (integer powers) in the torus algebra."""

    exps: tuple = (0, 0)

    def degree(self):
        return sum(abs(e) for e in self.exps)

    def is_unit(self):
        return self.exps == (0, 0)

    def __mul__(self, other):
        return TorusMonomial(tuple(a + b for a, b in zip(self.exps, other.exps)))

    def star(self):
        return TorusMonomial(tuple(-e for e in self.exps))

    def coproduct(self):
        return [(self, self, 1)]

    def letters(self):
        word = []
        for i, e in enumerate(self.exps):
            g = GeneratorId(HOPF_TORUS, i + 1, conjugated=e < 0)
            word.extend([g] * abs(e))
        return tuple(word)


@functools.cache
def _trans_coproduct(exps):
    out = []

    def rec(i, left, right, mult):
        if i == 4:
            out.append((TransMonomial(tuple(left)),
                        TransMonomial(tuple(right)), mult))
            return
        e = exps[i]
        for j in range(e + 1):
            rec(i + 1, left + [j], right + [e - j], mult * math.comb(e, j))

    rec(0, [], [], 1)
    return tuple(out)


TRANS_UNIT = TransMonomial()
TORUS_UNIT = TorusMonomial()

# Shorthand generators of the two Hopf algebras.
T1 = TransMonomial((1, 0, 0, 0))
T1S = TransMonomial((0, 1, 0, 0))
T2 = TransMonomial((0, 0, 1, 0))
T2S = TransMonomial((0, 0, 0, 1))
S1 = TorusMonomial((1, 0))
S2 = TorusMonomial((0, 1))
# varsigma = (s1, s1*, s2, s2*)
VARSIGMA = (S1, S1.star(), S2, S2.star())


def z(j, conj=False, grade=0):
    return GeneratorId(C4, j, conj, grade)


def zeta(j, conj=False, grade=0):
    return GeneratorId(R4, j, conj, grade)


def monad_m(j, row, col, conj=False):
    return GeneratorId(MONAD_M, j, conj, 0, row, col)


# -- models -----------------------------------------------------------------

class TwistModel:
    """Shared interface of the three symmetry models."""

    kind = "classical"

    @property
    def theta(self):
        return None

    @property
    def mu(self) -> complex:
        return 1.0 + 0.0j

    @property
    def zeta_level(self) -> float:
        """Real deformation level of the Hermitian equation."""
        return 0.0

    def hopf_unit(self):
        return TRANS_UNIT

    def counit(self, h) -> complex:
        return 1.0 if h.is_unit() else 0.0

    # coactions -------------------------------------------------------------
    def coaction(self, g: GeneratorId):
        """List of ``(coeff, HopfMonomial, GeneratorId | None)`` branches."""
        raise NotImplementedError

    def _conj_coaction(self, branches):
        return tuple((np.conj(c), h.star(), None if x is None else x.star())
                     for c, h, x in branches)

    # cocycle ----------------------------------------------------------------
    def cocycle(self, h, g) -> Coefficient:
        raise NotImplementedError

    def cocycle_inv(self, h, g) -> Coefficient:
        raise NotImplementedError

    def generators(self, space, k=1, calculus=True):
        if space == C4:
            gens = [z(j, c, gr) for j in range(1, 5) for c in (False, True)
                    for gr in ((0, 1) if calculus else (0,))]
        elif space == R4:
            gens = [zeta(j, c, gr) for j in (1, 2) for c in (False, True)
                    for gr in ((0, 1) if calculus else (0,))]
        elif space == MONAD_M:
            gens = [monad_m(j, a, b, c) for j in range(1, 5)
                    for a in range(1, 2 * k + 3) for b in range(1, k + 1)
                    for c in (False, True)]
        else:
            raise ModelMismatch(f"no generator family for space {space!r}")
        return tuple(gens)

    def hopf_letters(self):
        return ()

    def tilde_decompose(self, j, h):
        """Rewrite ``M^j (x) h`` in the commuting tilde generator basis.

        Returns ``[(coeff, s, h')]`` meaning ``sum coeff * Mtilde^s (x) h'``.
        """
        return [(1.0, j, h)]

    def to_json_dict(self):
        return {"model": self.kind}


class ClassicalModel(TwistModel):
    kind = "classical"

    def coaction(self, g: GeneratorId):
        return ((1.0, TRANS_UNIT, g),)

    def cocycle(self, h, g) -> Coefficient:
        return Coefficient(self.counit(h) * self.counit(g))

    cocycle_inv = cocycle


class MoyalModel(TwistModel):
    """Translation twist: parameters hbar > 0 (0 allowed for the limit),
    alpha, beta nonzero with alpha + beta nonzero."""

    kind = "moyal"

    def __init__(self, hbar, alpha=1.0, beta=1.0):
        if hbar < 0:
            raise ModelMismatch("hbar must be >= 0")
        if hbar > 0 and (alpha == 0 or beta == 0 or alpha + beta == 0):
            raise ModelMismatch("need alpha, beta, alpha+beta nonzero")
        self.hbar = float(hbar)
        self.alpha = float(alpha)
        self.beta = float(beta)
        # pairwise cocycle values on the four generators
        self._f = {
            (T1.exps, T1S.exps): -0.5j * self.hbar * self.alpha,
            (T1S.exps, T1.exps): 0.5j * self.hbar * self.alpha,
            (T2.exps, T2S.exps): 0.5j * self.hbar * self.beta,
            (T2S.exps, T2.exps): -0.5j * self.hbar * self.beta,
        }

    @property
    def zeta_level(self):
        return self.hbar * (self.alpha + self.beta)

    def coaction(self, g: GeneratorId):
        if g.space == C4:
            base = {
                1: ((1.0, TRANS_UNIT, z(1, grade=g.grade)),),
                2: ((1.0, TRANS_UNIT, z(2, grade=g.grade)),),
                3: ((1.0, T1S, z(1, grade=g.grade)),
                    (1.0, T2S, z(2, grade=g.grade)),
                    (1.0, TRANS_UNIT, z(3, grade=g.grade))),
                4: ((-1.0, T2, z(1, grade=g.grade)),
                    (1.0, T1, z(2, grade=g.grade)),
                    (1.0, TRANS_UNIT, z(4, grade=g.grade))),
            }[g.index]
            return self._conj_coaction(base) if g.conjugated else base
        if g.space == R4:
            if g.grade == 1:
                return ((1.0, TRANS_UNIT, g),)
            base = {
                1: ((1.0, TRANS_UNIT, zeta(1)), (1.0, T1, None)),
                2: ((1.0, TRANS_UNIT, zeta(2)), (1.0, T2, None)),
            }.get(g.index)
            if base is None:
                raise MissingCoaction(f"no coaction for {g}")
            return self._conj_coaction(base) if g.conjugated else base
        if g.space == MONAD_M:
            def m(j):
                return monad_m(j, g.row, g.col)
            base = {
                1: ((1.0, TRANS_UNIT, m(1)), (-1.0, T1S, m(3)), (1.0, T2, m(4))),
                2: ((1.0, TRANS_UNIT, m(2)), (-1.0, T2S, m(3)), (-1.0, T1, m(4))),
                3: ((1.0, TRANS_UNIT, m(3)),),
                4: ((1.0, TRANS_UNIT, m(4)),),
            }[g.index]
            return self._conj_coaction(base) if g.conjugated else base
        raise MissingCoaction(f"no coaction for {g}")

    def _pairing(self, h, g, sign) -> Coefficient:
        if not isinstance(h, TransMonomial) or not isinstance(g, TransMonomial):
            raise ModelMismatch("Moyal cocycle needs translation monomials")
        a, b, c, d = h.exps
        if (b, a, d, c) != g.exps:
            return Coefficient(0.0)
        v = (math.factorial(a) * math.factorial(b)
             * math.factorial(c) * math.factorial(d))
        v *= (sign * self._f[(T1.exps, T1S.exps)]) ** a
        v *= (sign * self._f[(T1S.exps, T1.exps)]) ** b
        v *= (sign * self._f[(T2.exps, T2S.exps)]) ** c
        v *= (sign * self._f[(T2S.exps, T2.exps)]) ** d
        return Coefficient(v, hbar=h.degree())

    def cocycle(self, h, g) -> Coefficient:
        return self._pairing(h, g, +1)

    def cocycle_inv(self, h, g) -> Coefficient:
        return self._pairing(h, g, -1)

    def hopf_letters(self):
        return (GeneratorId(HOPF_TRANS, 1), GeneratorId(HOPF_TRANS, 1, True),
                GeneratorId(HOPF_TRANS, 2), GeneratorId(HOPF_TRANS, 2, True))

    def hopf_unit(self):
        return TRANS_UNIT

    def tilde_decompose(self, j, h):
        if j == 1:
            return [(1.0, 1, h), (-0.5, 3, T1S * h), (0.5, 4, T2 * h)]
        if j == 2:
            return [(1.0, 2, h), (-0.5, 3, T2S * h), (-0.5, 4, T1 * h)]
        return [(1.0, j, h)]

    def to_json_dict(self):
        return {"model": "moyal", "hbar": self.hbar,
                "alpha": self.alpha, "beta": self.beta}


class ToricModel(TwistModel):
    """Torus twist: parameter theta in (0, 1); mu = exp(i pi theta)."""

    kind = "toric"

    def __init__(self, theta):
        if not 0 <= theta < 1:
            raise ModelMismatch("theta must lie in [0, 1)")
        self._theta = float(theta)

    @property
    def theta(self):
        return self._theta

    @property
    def mu(self):
        return complex(np.exp(1j * np.pi * self._theta))

    def hopf_unit(self):
        return TORUS_UNIT

    def counit(self, h) -> complex:
        return 1.0  # group-like monomials

    def _weight(self, g: GeneratorId):
        if g.space == C4:
            w = [(1, 0), (-1, 0), (0, 1), (0, -1)][g.index - 1]
        elif g.space == R4:
            if g.index not in (1, 2):
                raise MissingCoaction(f"no coaction for {g}")
            w = [(1, -1), (-1, -1)][g.index - 1]
        elif g.space == MONAD_M:
            m, n = [(1, 0), (-1, 0), (0, 1), (0, -1)][g.index - 1]
            w = (-m, -n)
        else:
            raise MissingCoaction(f"no coaction for {g}")
        if g.conjugated:
            w = (-w[0], -w[1])
        return TorusMonomial(w)

    def coaction(self, g: GeneratorId):
        return ((1.0, self._weight(g), g),)

    @staticmethod
    def _cross(h, g):
        (m, n), (mp, np_) = h.exps, g.exps
        return m * np_ - n * mp

    def cocycle(self, h, g) -> Coefficient:
        if not isinstance(h, TorusMonomial) or not isinstance(g, TorusMonomial):
            raise ModelMismatch("toric cocycle needs torus monomials")
        # at theta = 0 the phase mu degenerates to 1 and the formal power
        # is dropped, so the derived rules become plain transpositions
        mu2 = -self._cross(h, g) if self._theta else 0
        return Coefficient(1.0, mu2=mu2)

    def cocycle_inv(self, h, g) -> Coefficient:
        mu2 = self._cross(h, g) if self._theta else 0
        return Coefficient(1.0, mu2=mu2)

    def eta(self, j, l) -> Coefficient:
        """eta_{jl} = F^{-2}(varsigma_j, varsigma_l)."""
        return self.cocycle_inv(VARSIGMA[j - 1], VARSIGMA[l - 1]) ** 2

    def hopf_letters(self):
        return (GeneratorId(HOPF_TORUS, 1), GeneratorId(HOPF_TORUS, 1, True),
                GeneratorId(HOPF_TORUS, 2), GeneratorId(HOPF_TORUS, 2, True))

    def tilde_decompose(self, j, h):
        if j in (1, 2):
            return [(1.0, j, VARSIGMA[j - 1].star() * h)]
        return [(1.0, j, h)]

    def to_json_dict(self):
        return {"model": "toric", "theta": self._theta}


def model_from_json(obj) -> TwistModel:
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("model")
    if kind == "classical":
        return ClassicalModel()
    if kind == "moyal":
        return MoyalModel(obj["hbar"], obj.get("alpha", 1.0), obj.get("beta", 1.0))
    if kind == "toric":
        return ToricModel(obj["theta"])
    raise ModelMismatch(f"unknown model kind {kind!r}")


# -- cocycle / R-matrix operations -------------------------------------------

def cocycle_eval(model: TwistModel, h, g) -> Coefficient:
    """Bicharacter extension of the generator cocycle values."""
    return model.cocycle(h, g)


def r_matrix(model: TwistModel, h, g) -> Coefficient:
    """R(h, g) = F(g1, h1) F^{-1}(h2, g2), convolution over coproducts."""
    total_val = 0.0
    hbar_pow = None
    mu2 = None
    for h1, h2, mh in h.coproduct():
        for g1, g2, mg in g.coproduct():
            a = model.cocycle(g1, h1)
            b = model.cocycle_inv(h2, g2)
            c = a * b
            if abs(c.value) == 0.0:
                continue
            if hbar_pow is None:
                hbar_pow, mu2 = c.hbar, c.mu2
            elif (c.hbar, c.mu2) != (hbar_pow, mu2):
                raise ModelMismatch("mixed formal degrees in R-matrix value")
            total_val += mh * mg * c.value
    if hbar_pow is None:
        return Coefficient(0.0)
    return Coefficient(total_val, hbar_pow, mu2)


def two_cocycle_residual(model: TwistModel, f, g, h) -> float:
    """Defect of the two-cocycle identity on the triple (h, g, f)."""
    theta = model.theta
    memo_f, memo_fi = {}, {}

    def F(a, b):
        key = (a.exps, b.exps)
        if key not in memo_f:
            memo_f[key] = model.cocycle(a, b).evaluate(theta)
        return memo_f[key]

    def Fi(a, b):
        key = (a.exps, b.exps)
        if key not in memo_fi:
            memo_fi[key] = model.cocycle_inv(a, b).evaluate(theta)
        return memo_fi[key]

    def cop3(x):
        out = []
        for x1, x23, m1 in x.coproduct():
            for x2, x3, m2 in x23.coproduct():
                out.append((x1, x2, x3, m1 * m2))
        return out

    def cop4(x):
        out = []
        for x1, x2, x34, m in cop3(x):
            for x3, x4, m2 in x34.coproduct():
                out.append((x1, x2, x3, x4, m * m2))
        return out

    total = 0.0
    for h1, h2, h3, mh in cop3(h):
        for g1, g2, g3, g4, mg in cop4(g):
            for f1, f2, f3, mf in cop3(f):
                v = F(g1, f1)
                if v == 0.0:
                    continue
                v *= F(h1, g2 * f2)
                if v == 0.0:
                    continue
                v *= Fi(h2 * g3, f3) * Fi(h3, g4)
                total += mh * mg * mf * v
    expected = (model.counit(f) * model.counit(g) * model.counit(h))
    return abs(total - expected)


def bicharacter_residual(model: TwistModel, f, g, h) -> float:
    """Defect of F(fg, h) = F(f, h1) F(g, h2) and its mirror."""
    lhs = model.cocycle(f * g, h).evaluate(model.theta)
    rhs = 0.0
    for h1, h2, m in h.coproduct():
        rhs += m * (model.cocycle(f, h1).evaluate(model.theta)
                    * model.cocycle(g, h2).evaluate(model.theta))
    d1 = abs(lhs - rhs)
    lhs = model.cocycle(f, g * h).evaluate(model.theta)
    rhs = 0.0
    for f1, f2, m in f.coproduct():
        rhs += m * (model.cocycle(f1, h).evaluate(model.theta)
                    * model.cocycle(f2, g).evaluate(model.theta))
    return max(d1, abs(lhs - rhs))


def cotriangularity_residual(model: TwistModel, h, g) -> float:
    """Defect of the convolution identity R(h1,g1) R(g2,h2) = eps(h) eps(g)."""
    total = 0.0
    for h1, h2, mh in h.coproduct():
        for g1, g2, mg in g.coproduct():
            total += mh * mg * (r_matrix(model, h1, g1).evaluate(model.theta)
                                * r_matrix(model, g2, h2).evaluate(model.theta))
    return abs(total - model.counit(h) * model.counit(g))


def act_formal(model: TwistModel, h, g: GeneratorId):
    """Canonical left action h |> g = R(g^(-1), h) g^(0) on one generator.

    Returns branches ``[(Coefficient, GeneratorId | None)]`` with the exact
    formal parameter exponents.
    """
    out = []
    for c, hm, x in model.coaction(g):
        r = r_matrix(model, hm, h)
        if abs(r.value) > 1e-15:
            out.append((r.scale(c), x))
    return out


def act(model: TwistModel, h, g: GeneratorId):
    """Evaluated version of :func:`act_formal` (complex branch weights)."""
    return [(c.evaluate(model.theta), x) for c, x in act_formal(model, h, g)]


def crossed_module_residual(model: TwistModel, h, g: GeneratorId) -> float:
    """Defect of h1 v^(-1) (x) h2 |> v^(0) = (h1 |> v)^(-1) h2 (x) (h1 |> v)^(0)."""
    lhs = {}
    for h1, h2, m in h.coproduct():
        for c, vm, v0 in model.coaction(g):
            for cv, x in act(model, h2, v0):
                key = (h1 * vm, x)
                lhs[key] = lhs.get(key, 0.0) + m * c * cv
    rhs = {}
    for h1, h2, m in h.coproduct():
        for cv, x in act(model, h1, g):
            if x is None:
                key = (h2, None)
                rhs[key] = rhs.get(key, 0.0) + m * cv
                continue
            for c, vm, v0 in model.coaction(x):
                key = (vm * h2, v0)
                rhs[key] = rhs.get(key, 0.0) + m * cv * c
    keys = set(lhs) | set(rhs)
    return max((abs(lhs.get(k, 0.0) - rhs.get(k, 0.0)) for k in keys),
               default=0.0)


# -- twisted products ---------------------------------------------------------

def _word_coaction(model: TwistModel, word):
    """Expand the tensor coaction of a classical word.

    Yields ``(coeff, HopfMonomial, residual_word)`` branches; unit legs of
    the coaction simply drop out of the residual word.
    """
    branches = [(1.0, model.hopf_unit(), ())]
    for g in word:
        new = []
        legs = model.coaction(g)
        for c0, h0, w0 in branches:
            for c, h, x in legs:
                nw = w0 if x is None else w0 + (x,)
                new.append((c0 * c, h0 * h, nw))
        branches = new
    return branches


def twist_product(model: TwistModel, a: NCPolynomial,
                  b: NCPolynomial) -> NCPolynomial:
    """a ._F b = F(a^(-1), b^(-1)) a^(0) b^(0) on classical polynomials.

    Inputs and output live in the classical (graded-commutative) algebra.
    """
    out = NCPolynomial()
    for (wa, ha, ma), va in a.terms.items():
        for (wb, hb, mb), vb in b.terms.items():
            for ca, hma, ra in _word_coaction(model, wa):
                for cb, hmb, rb in _word_coaction(model, wb):
                    f = model.cocycle(hma, hmb)
                    if f.is_zero():
                        continue
                    nf = classical_normal_form_word(ra + rb)
                    if nf is None:
                        continue
                    sign, w = nf
                    c = Coefficient(sign * va * vb * ca * cb * f.value,
                                    ha + hb + f.hbar, ma + mb + f.mu2)
                    out = out + NCPolynomial.from_word(w, c)
    return out


def _twist_eval_word(model: TwistModel, word) -> NCPolynomial:
    """Evaluate a word of the deformed algebra as a classical polynomial."""
    acc = NCPolynomial.one()
    for g in word:
        acc = twist_product(model, acc, NCPolynomial.from_generator(g))
    return acc


def express_in_deformed_basis(model: TwistModel, x: NCPolynomial):
    """Rewrite a classical polynomial as a combination of deformed words.

    Greedy triangular elimination against the quantisation map: the leading
    classical term of each deformed word is the word itself, up to an
    invertible phase (a pure mu-power for the torus model).
    """
    out = []
    merged = {}
    x = x.copy()
    guard = 0
    while x.terms:
        guard += 1
        if guard > 10000:
            raise NonConfluent("deformed-basis expansion did not terminate")
        (w, h, m), v = max(x.terms.items(),
                           key=lambda kv: (deglex_key(kv[0][0]), kv[0][1], kv[0][2]))
        q = _twist_eval_word(model, w)
        qkeys = [k for k in q.terms if k[0] == w]
        if len(qkeys) != 1 or qkeys[0][1] != 0:
            raise NonConfluent(f"word {w} has no invertible leading phase")
        _, _, mq = qkeys[0]
        qv = q.terms[qkeys[0]]
        c = Coefficient(v / qv, h, m - mq)
        key = (w, c.hbar, c.mu2)
        merged[key] = merged.get(key, 0.0) + c.value
        x = x - q.scale_coeff(c)
    for (w, h, m), v in sorted(merged.items(),
                               key=lambda kv: (deglex_key(kv[0][0]),
                                               kv[0][1], kv[0][2])):
        if abs(v) > 1e-15:
            out.append((w, Coefficient(v, h, m)))
    return out


# -- relation-system construction ---------------------------------------------

def _validate(rel: RelationSystem, seed=12345):
    rng = np.random.default_rng(seed)
    res = associativity_residual(rel, rng, trials=6)
    if res > 1e-9:
        raise NonConfluent(f"associativity defect {res:.3e}")
    res = star_closure_residual(rel, rng, trials=6)
    if res > 1e-9:
        raise NonConfluent(f"star-closure defect {res:.3e}")


def _is_default_rule(g, h, rhs):
    """True when the derived rule is the graded transposition (or the zero
    rule for a repeated odd letter) that the engine applies by default."""
    if g == h and g.grade:
        return rhs == ()
    if len(rhs) != 1:
        return False
    word, c = rhs[0]
    if word != (h, g) or c.hbar or c.mu2:
        return False
    sign = -1.0 if (g.grade and h.grade) else 1.0
    return abs(c.value - sign) <= 1e-14


def _derived_rule(model, g, h):
    x = twist_product(model, NCPolynomial.from_generator(g),
                      NCPolynomial.from_generator(h))
    return tuple(express_in_deformed_basis(model, x))


def derive_relations(model: TwistModel, space, k=1, calculus=True,
                     validate=True) -> RelationSystem:
    """Derive the rewrite system of one twisted algebra from the cocycle.

    ``space`` may be a single ambient tag or a tuple of tags (the twisted
    tensor product of the corresponding comodule algebras).  Only rules that
    differ from the default graded transposition are stored.
    """
    spaces = (space,) if isinstance(space, str) else tuple(space)
    gens = []
    for s in spaces:
        gens.extend(model.generators(s, k=k, calculus=calculus))
    gens = sorted(set(gens), key=lambda g: g.sort_key)
    rules = {}
    for i, g in enumerate(gens):
        for h in gens[:i + 1]:
            if g == h and g.grade == 0:
                continue
            rhs = _derived_rule(model, g, h)
            if not _is_default_rule(g, h, rhs):
                rules[(g, h)] = rhs
    rel = RelationSystem(gens, rules, theta=model.theta,
                         meta={"model": model.kind, "space": "+".join(spaces)})
    if validate:
        _validate(rel)
    return rel


def hopf_letter_monomial(hg: GeneratorId):
    """The Hopf monomial represented by one Hopf letter."""
    if hg.space == HOPF_TRANS:
        e = [0, 0, 0, 0]
        e[2 * (hg.index - 1) + (1 if hg.conjugated else 0)] = 1
        return TransMonomial(tuple(e))
    if hg.space == HOPF_TORUS:
        e = -1 if hg.conjugated else 1
        return TorusMonomial((e, 0) if hg.index == 1 else (0, e))
    raise ModelMismatch(f"{hg} is not a Hopf letter")


def smash_relations(model: TwistModel, space=MONAD_M, k=1,
                    include_coordinates=True, include_monad=True,
                    validate=True) -> RelationSystem:
    """Joint rewrite system of the smash product (algebra (x) Hopf letters).

    Monad letters obey their twisted relations, Hopf letters act on them via
    the canonical action, coordinate letters (when included) commute with
    both, as in the bosonised picture.  Unlisted pairs commute.
    """
    hopf = list(model.hopf_letters())
    mon = list(model.generators(MONAD_M, k=k)) if include_monad else []
    coords = list(model.generators(C4, calculus=False)) if include_coordinates else []
    gens = mon + coords + hopf
    rules = {}

    def algebra_rules(family):
        fam = sorted(family, key=lambda g: g.sort_key)
        for i, g in enumerate(fam):
            for h in fam[:i + 1]:
                if g == h and g.grade == 0:
                    continue
                rhs = _derived_rule(model, g, h)
                if not _is_default_rule(g, h, rhs):
                    rules[(g, h)] = rhs

    algebra_rules(mon)
    algebra_rules(coords)

    # Torus letters contract against their inverses; everything else commutes.
    for a in hopf:
        for b in hopf:
            if a.space == HOPF_TORUS and a.index == b.index and \
                    a.conjugated != b.conjugated:
                rules[(a, b)] = (((), Coefficient(1.0)),)

    # Hopf letters move right past monad letters via the canonical action;
    # coordinate letters live in the plain tensor factor and commute.
    for hg in hopf:
        hm = hopf_letter_monomial(hg)
        for a in mon:
            if hg.space == HOPF_TRANS:
                # (1 (x) t)(a (x) 1) = a (x) t + (t |> a) (x) 1
                rhs = [((a, hg), Coefficient(1.0))]
                for c, x in act_formal(model, hm, a):
                    rhs.append((() if x is None else (x,), c))
                if len(rhs) > 1:
                    rules[(hg, a)] = tuple(rhs)
            else:
                # group-like: (1 (x) s)(a (x) 1) = (s |> a) (x) s
                branches = act_formal(model, hm, a)
                if len(branches) != 1 or branches[0][1] != a:
                    raise MissingCoaction(f"torus action not diagonal on {a}")
                c = branches[0][0]
                if c.mu2 or abs(c.value - 1.0) > 1e-14:
                    rules[(hg, a)] = (((a, hg), c),)

    rel = RelationSystem(gens, rules, theta=model.theta,
                         meta={"model": model.kind, "space": "smash", "k": k})
    if validate:
        _validate(rel)
    return rel


def coordinate_smash_relations(model: TwistModel, validate=True):
    """Hopf letters plus deformed coordinates, no monad letters.

    This is the home of the bosonised monad maps with numeric entries.
    """
    return smash_relations(model, include_monad=False,
                           include_coordinates=True, validate=validate)

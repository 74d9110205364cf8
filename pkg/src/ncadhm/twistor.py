"""Symbolic checks of the twistor-fibration algebra maps.

Everything here is commutative: the seven-sphere inside C^4, the projective
twistor space presented through rank-one projector entries q_jl = z_j z_l*,
the four-sphere inside both, the quaternionic involution J, and the two
stereographic localisations.  Reduction modulo side relations (sphere,
localisation inverses) is plain commutative polynomial rewriting.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._report import Check, Report
from .star_algebra import (
    C4, CP3, R4, S4, Coefficient, GeneratorId, NCPolynomial, RelationSystem,
    UnknownGenerator, classical_normal_form_word, deglex_key, multiply,
    normal_form,
)
from .hopf_twist import ClassicalModel, ToricModel, MoyalModel, z, zeta

RESIDUAL_TOL = 1e-12


# -- commutative quotient contexts -------------------------------------------

def _commutative_relation_system(generators, star_overrides=None):
    return RelationSystem(generators, {}, star_table=star_overrides)


@dataclass
class QuotientContext:
    """A commutative algebra together with side relations declared zero.

    Each side relation is reduced against by eliminating its deglex-leading
    monomial (divisibility of commutative words); declared inverses are fresh
    generators whose defining relation is handled the same way.
    """

    rel: RelationSystem
    side_relations: list

    def __post_init__(self):
        self._rules = []
        for p in self.side_relations:
            p = normal_form(p, self.rel)
            (w, h, m), v = max(p.terms.items(),
                               key=lambda kv: (deglex_key(kv[0][0]),
                                               kv[0][1], kv[0][2]))
            if h != 0:
                raise UnknownGenerator("side relation with non-invertible lead")
            lead = Coefficient(v, h, m)
            rest = p - NCPolynomial.from_word(w, lead)
            self._rules.append((w, lead, rest))

    def reduce(self, p: NCPolynomial, max_steps=100000) -> NCPolynomial:
        p = normal_form(p, self.rel)
        steps = 0
        changed = True
        while changed:
            changed = False
            for (lw, lc, rest) in self._rules:
                for (w, h, m), v in list(p.terms.items()):
                    pos = _find_subword(w, lw)
                    if pos is None:
                        continue
                    steps += 1
                    if steps > max_steps:
                        raise UnknownGenerator("quotient reduction stalled")
                    cof = tuple(x for i, x in enumerate(w) if i not in pos)
                    c = Coefficient(v / lc.value, h - lc.hbar, m - lc.mu2)
                    p = p - NCPolynomial.from_word(w, Coefficient(v, h, m))
                    p = p - multiply(rest, NCPolynomial.from_word(cof, c),
                                     self.rel)
                    changed = True
                    break
                if changed:
                    break
        return p

    def is_zero(self, p: NCPolynomial, tol=RESIDUAL_TOL) -> bool:
        return self.reduce(p).eval_norm(self.rel.theta) <= tol


def _find_subword(word, sub):
    """Positions realizing ``sub`` as a sub-multiset of the sorted word."""
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


# -- generators and algebra maps ----------------------------------------------

def x_gen(i, conj=False):
    return GeneratorId(S4, i, conj)


X0 = x_gen(0)
X1, X2 = x_gen(1), x_gen(2)
X1S, X2S = x_gen(1, True), x_gen(2, True)
X0_INV = GeneratorId(S4, -1)

CP3_E_INV = GeneratorId(CP3, -1)
R4_INV = GeneratorId(R4, -1)


def cp3_gen(name):
    table = {"a1": 1, "a2": 2, "a3": 3, "a4": 4,
             "u1": 5, "u2": 6, "u3": 7, "v1": 8, "v2": 9, "v3": 10}
    conj = name.endswith("*")
    return GeneratorId(CP3, table[name.rstrip("*")], conj)


_SELF_ADJOINT = {X0: X0, X0_INV: X0_INV, CP3_E_INV: CP3_E_INV,
                 R4_INV: R4_INV}
for _n in ("a1", "a2", "a3", "a4"):
    _SELF_ADJOINT[cp3_gen(_n)] = cp3_gen(_n)
    _SELF_ADJOINT[cp3_gen(_n + "*")] = cp3_gen(_n + "*")


def c4_ring(calculus=False):
    gens = ClassicalModel().generators(C4, calculus=calculus)
    return _commutative_relation_system(gens)


def s4_ring(localised=False):
    gens = [X0, X1, X1S, X2, X2S] + ([X0_INV] if localised else [])
    return _commutative_relation_system(gens, _SELF_ADJOINT)


def r4_ring(localised=False):
    gens = list(ClassicalModel().generators(R4, calculus=False))
    if localised:
        gens.append(R4_INV)
    return _commutative_relation_system(gens, _SELF_ADJOINT)


def cp3_ring():
    names = ["a1", "a2", "a3", "a4", "u1", "u2", "u3", "v1", "v2", "v3"]
    gens = [cp3_gen(n) for n in names] + [cp3_gen(n + "*") for n in names]
    return _commutative_relation_system(gens, _SELF_ADJOINT)


def word(*gens):
    return NCPolynomial.from_word(tuple(gens))


def sphere_relation_c4() -> NCPolynomial:
    """z1* z1 + z2* z2 + z3* z3 + z4* z4 - 1."""
    p = NCPolynomial.one(-1.0)
    for j in range(1, 5):
        p = p + word(z(j), z(j, True))
    return p


def s7_context() -> QuotientContext:
    return QuotientContext(c4_ring(), [sphere_relation_c4()])


def x_images_in_c4() -> dict:
    """The four-sphere generators as quadratic expressions in z, z*."""
    x1 = (word(z(1), z(3, True)) + word(z(2, True), z(4))).scale(2.0)
    x2 = (word(z(2), z(3, True)) - word(z(1, True), z(4))).scale(2.0)
    x0 = (word(z(1), z(1, True)) + word(z(2), z(2, True))
          - word(z(3), z(3, True)) - word(z(4), z(4, True)))
    return {X1: x1, X2: x2, X0: x0,
            X1S: (word(z(1, True), z(3)) + word(z(2), z(4, True))).scale(2.0),
            X2S: (word(z(2, True), z(3)) - word(z(1), z(4, True))).scale(2.0)}


# q_jl = z_j z_l* identification of the projective-space generators.
_CP3_TO_Z = {
    "a1": (1, 1), "a2": (2, 2), "a3": (3, 3), "a4": (4, 4),
    "u1": (1, 2), "u2": (1, 3), "u3": (1, 4),
    "v1": (3, 4), "v2": (2, 4), "v3": (2, 3),
}


def cp3_z_image(g: GeneratorId) -> NCPolynomial:
    for name, (j, l) in _CP3_TO_Z.items():
        if cp3_gen(name) == g:
            return word(z(j), z(l, True))
        if cp3_gen(name + "*") == g:
            return word(z(l), z(j, True))
    raise UnknownGenerator(f"{g} is not a projective-space generator")


def substitute(p: NCPolynomial, images: dict, target_rel) -> NCPolynomial:
    """Apply an algebra map defined by generator images."""
    out = NCPolynomial.zero()
    for (w, h, m), v in p.terms.items():
        acc = NCPolynomial.from_word((), Coefficient(v, h, m))
        for g in w:
            acc = multiply(acc, images[g], target_rel)
        out = out + acc
    return out


# -- quaternionic structure ----------------------------------------------------

_J_C4 = {1: (-1.0, z(2, True)), 2: (1.0, z(1, True)),
         3: (-1.0, z(4, True)), 4: (1.0, z(3, True))}

_J_CP3 = {"a1": (1.0, "a2"), "a2": (1.0, "a1"), "a3": (1.0, "a4"),
          "a4": (1.0, "a3"), "u1": (-1.0, "u1"), "v1": (-1.0, "v1"),
          "u2": (1.0, "v2*"), "u3": (-1.0, "v3*"),
          "v2": (1.0, "u2*"), "v3": (-1.0, "u3*")}


def j_image(g: GeneratorId):
    """J on one generator: returns ``(sign, GeneratorId)``."""
    if g.space == C4:
        sign, base = _J_C4[g.index]
        out = base if not g.conjugated else base.star()
        if g.grade:
            out = out.d()
        return sign, out
    if g.space == CP3 and g.index >= 1:
        name = None
        for n, idx in (("a1", 1), ("a2", 2), ("a3", 3), ("a4", 4), ("u1", 5),
                       ("u2", 6), ("u3", 7), ("v1", 8), ("v2", 9), ("v3", 10)):
            if idx == g.index:
                name = n
        sign, img = _J_CP3[name]
        img_g = cp3_gen(img)
        if g.conjugated:
            img_g = img_g.star() if not img.endswith("*") else cp3_gen(img[:-1])
        return sign, img_g
    raise UnknownGenerator(f"J is not defined on {g}")


def apply_J(p: NCPolynomial, rel=None) -> NCPolynomial:
    """Linear *-anti-algebra extension of the quaternionic generator table."""
    out = NCPolynomial.zero()
    for (w, h, m), v in p.terms.items():
        sign = 1.0
        letters = []
        for g in reversed(w):
            s, img = j_image(g)
            sign *= s
            letters.append(img)
        nf = classical_normal_form_word(tuple(letters))
        if nf is None:
            continue
        s2, nw = nf
        out = out + NCPolynomial.from_word(nw, Coefficient(sign * s2 * v, h, m))
    return out


# -- the four embedding checks -------------------------------------------------

def _check_sphere_inclusion() -> Check:
    """x-images satisfy the four-sphere relation modulo the S^7 relation."""
    ctx = s7_context()
    images = x_images_in_c4()
    p = (multiply(images[X1S], images[X1], ctx.rel)
         + multiply(images[X2S], images[X2], ctx.rel)
         + multiply(images[X0], images[X0], ctx.rel)
         - NCPolynomial.one())
    res = ctx.reduce(p).eval_norm()
    return Check("s4_in_s7", res <= RESIDUAL_TOL, res, RESIDUAL_TOL)


def _fibration_images() -> dict:
    """S^4 generators inside the projective twistor algebra."""
    return {
        X0: (word(cp3_gen("a1")) + word(cp3_gen("a2"))
             - NCPolynomial.one()).scale(2.0),
        X1: (word(cp3_gen("u2")) + word(cp3_gen("v2*"))).scale(2.0),
        X2: (word(cp3_gen("v3")) - word(cp3_gen("u3*"))).scale(2.0),
    }


def _check_fibration_j_fixed() -> Check:
    """The fibration images are fixed by the quaternionic involution."""
    res = 0.0
    for img in _fibration_images().values():
        res = max(res, (apply_J(img) - img).eval_norm())
    return Check("fibration_j_fixed", res <= RESIDUAL_TOL, res, RESIDUAL_TOL)


def _check_stereographic() -> Check:
    """chart and its inverse compose to the identity on generators."""
    s4 = s4_ring(localised=True)
    r4 = r4_ring(localised=True)

    qmod = NCPolynomial.one() + word(zeta(1, True), zeta(1)) \
        + word(zeta(2, True), zeta(2))
    r4_ctx = QuotientContext(r4, [
        multiply(word(R4_INV), qmod, r4) - NCPolynomial.one()])

    sphere_x = (word(X1S, X1) + word(X2S, X2) + word(X0, X0)
                - NCPolynomial.one())
    s4_ctx = QuotientContext(s4, [
        sphere_x,
        multiply(word(X0_INV), NCPolynomial.one() + word(X0), s4)
        - NCPolynomial.one()])

    w = word(R4_INV)
    chart = {
        X1: multiply(word(zeta(1)), w, r4).scale(2.0),
        X1S: multiply(word(zeta(1, True)), w, r4).scale(2.0),
        X2: multiply(word(zeta(2)), w, r4).scale(2.0),
        X2S: multiply(word(zeta(2, True)), w, r4).scale(2.0),
        X0: multiply(NCPolynomial.one() - word(zeta(1, True), zeta(1))
                     - word(zeta(2, True), zeta(2)), w, r4),
        X0_INV: qmod.scale(0.5),
    }
    u = word(X0_INV)
    chart_inv = {
        zeta(1): multiply(word(X1), u, s4),
        zeta(1, True): multiply(word(X1S), u, s4),
        zeta(2): multiply(word(X2), u, s4),
        zeta(2, True): multiply(word(X2S), u, s4),
        R4_INV: (NCPolynomial.one() + word(X0)).scale(0.5),
    }

    res = 0.0
    # map well-definedness: images of the defining relations vanish
    res = max(res, r4_ctx.reduce(substitute(sphere_x, chart, r4)).eval_norm())
    res = max(res, r4_ctx.reduce(substitute(
        multiply(word(X0_INV), NCPolynomial.one() + word(X0), s4), chart, r4)
        - NCPolynomial.one()).eval_norm())
    res = max(res, s4_ctx.reduce(substitute(
        multiply(word(R4_INV), qmod, r4), chart_inv, s4)
        - NCPolynomial.one()).eval_norm())
    # round trips on generators
    for g in (zeta(1), zeta(2), zeta(1, True), zeta(2, True)):
        back = substitute(substitute(word(g), chart_inv, s4), chart, r4)
        res = max(res, r4_ctx.reduce(back - word(g)).eval_norm())
    for g in (X0, X1, X2, X1S, X2S):
        back = substitute(substitute(word(g), chart, r4), chart_inv, s4)
        res = max(res, s4_ctx.reduce(back - word(g)).eval_norm())
    return Check("stereographic_inverses", res <= RESIDUAL_TOL, res,
                 RESIDUAL_TOL)


def _check_localised_trivialisation() -> Check:
    """The localised twistor algebra splits as plane times projective line.

    Verified through the z-representation q_jl = z_j z_l* modulo the sphere
    relation: (a) the trace relation pulls back to the statement that the
    image of 1 + |zeta|^2 inverts a1 + a2, (b) the projective-line
    determinant relation is preserved, (c) the rank-one projector relations
    hold.
    """
    ctx = s7_context()
    rel = ctx.rel

    def zimg(name):
        return cp3_z_image(cp3_gen(name))

    res = 0.0
    # (a) (u2* + v2)(u2 + v2*) + (v3* - u3)(v3 - u3*) = (a1 + a2)(1 - a1 - a2)
    lhs = multiply(zimg("u2*") + zimg("v2"), zimg("u2") + zimg("v2*"), rel) \
        + multiply(zimg("v3*") - zimg("u3"), zimg("v3") - zimg("u3*"), rel)
    rho = zimg("a1") + zimg("a2")
    rhs = multiply(rho, NCPolynomial.one() - rho, rel)
    res = max(res, ctx.reduce(lhs - rhs).eval_norm())
    # (b) a1 a2 = u1* u1
    res = max(res, ctx.reduce(multiply(zimg("a1"), zimg("a2"), rel)
                              - multiply(zimg("u1*"), zimg("u1"), rel))
              .eval_norm())
    # (c) sum_r q_jr q_rl = q_jl for all j, l
    for j in range(1, 5):
        for l in range(1, 5):
            q_jl = word(z(j), z(l, True))
            s = NCPolynomial.zero()
            for r in range(1, 5):
                s = s + multiply(word(z(j), z(r, True)),
                                 word(z(r), z(l, True)), rel)
            res = max(res, ctx.reduce(s - q_jl).eval_norm())
    return Check("localised_trivialisation", res <= RESIDUAL_TOL, res,
                 RESIDUAL_TOL)


def verify_embeddings() -> Report:
    """Run the four symbolic twistor-fibration checks."""
    return Report([
        _check_sphere_inclusion(),
        _check_fibration_j_fixed(),
        _check_stereographic(),
        _check_localised_trivialisation(),
    ])


def j_squared_residual() -> float:
    """Defect of J^2 = -id on the plane generators and J^2 = +id upstairs."""
    res = 0.0
    for j in range(1, 5):
        for conj in (False, True):
            g = z(j, conj)
            res = max(res, (apply_J(apply_J(word(g))) + word(g)).eval_norm())
    for name in _CP3_TO_Z:
        g = cp3_gen(name)
        res = max(res, (apply_J(apply_J(word(g))) - word(g)).eval_norm())
    return res


def j_weight_residual(theta=0.25) -> int:
    """Check that J intertwines the torus coaction (weight bookkeeping)."""
    model = ToricModel(theta)
    bad = 0
    for j in range(1, 5):
        for conj in (False, True):
            g = z(j, conj)
            (_, wg, _), = model.coaction(g)
            sign, img = j_image(g)
            (_, wimg, _), = model.coaction(img)
            if wg.exps != wimg.exps:
                bad += 1
    return bad


def j_moyal_coaction_residual(hbar=0.1, alpha=1.0, beta=2.0) -> float:
    """Check (id (x) J) Delta = Delta J on the plane generators (translations)."""
    model = MoyalModel(hbar, alpha, beta)
    worst = 0.0
    for j in range(1, 5):
        for conj in (False, True):
            g = z(j, conj)
            sign, img = j_image(g)
            lhs = {}
            for c, hm, x in model.coaction(g):
                s, xi = j_image(x)
                lhs[(hm, xi)] = lhs.get((hm, xi), 0.0) + c * s
            rhs = {}
            for c, hm, x in model.coaction(img):
                rhs[(hm, x)] = rhs.get((hm, x), 0.0) + c * sign
            keys = set(lhs) | set(rhs)
            worst = max(worst, max(abs(lhs.get(k, 0.0) - rhs.get(k, 0.0))
                                   for k in keys))
    return worst

"""Noncommutative *-polynomial arithmetic with normal ordering.

Generators are tagged symbols carrying an ambient-space tag, a small index,
an optional matrix slot (row, col), a conjugation flag and a form degree.
Polynomials are complex-linear combinations of words in these generators.
Coefficients track exact powers of the two formal deformation parameters:
``hbar`` for the translation twist and ``mu`` for the torus twist (stored as
twice the mu-exponent so that half-integer cocycle values stay exact).

The deformation parameter of the translation twist is *anti-real*: the
involution sends hbar to -hbar, and numeric evaluation substitutes
``hbar -> i * hbar``.  This is the unique convention under which the shipped
Heisenberg-type relation systems are star-closed and the real solver
equations and the symbolic monad identities agree; see the repository notes.

A :class:`RelationSystem` holds rewrite rules (patterns of two or three
adjacent letters) that bring words to normal order.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

TOL = 1e-12
STEP_BUDGET = 10 ** 6

# Ambient space tags.
C4 = "C4"
R4 = "R4"
S4 = "S4"
CP3 = "CP3"
CP1 = "CP1"
MONAD_M = "MonadM"
MONAD_N = "MonadN"
HOPF_TRANS = "HopfTrans"
HOPF_TORUS = "HopfTorus"
AUX = "Aux"

# Inverse/auxiliary letters sort below everything so that substitution rules
# push them leftmost; Hopf letters sort above algebra letters so that smash
# words normal-order as (algebra part) * (Hopf part).
_SPACE_RANK = {
    AUX: -1, C4: 0, R4: 1, S4: 2, CP3: 3, CP1: 4,
    MONAD_M: 5, MONAD_N: 6, HOPF_TRANS: 7, HOPF_TORUS: 8,
}


class StarAlgebraError(Exception):
    pass


class UnknownGenerator(StarAlgebraError):
    pass


class NonTerminating(StarAlgebraError):
    pass


class MissingCalculus(StarAlgebraError):
    pass


class NonConfluent(StarAlgebraError):
    pass


# Localisation inverses use index -1 so they sort leftmost in their space.
_CP3_NAMES = {1: "a1", 2: "a2", 3: "a3", 4: "a4",
              5: "u1", 6: "u2", 7: "u3", 8: "v1", 9: "v2", 10: "v3",
              -1: "inv(a1+a2)"}
_S4_NAMES = {0: "x0", 1: "x1", 2: "x2", -1: "inv(1+x0)"}
_CP1_NAMES = {1: "ta1", 2: "ta2", 3: "tu1"}
_R4_NAMES = {1: "zeta1", 2: "zeta2", -1: "inv(1+|zeta|2)"}


@dataclass(frozen=True)
class GeneratorId:
    """A tagged generator symbol.

    ``grade`` is 0 for functions and 1 for differentials; ``row``/``col``
    are used only by matrix-valued generator families (monad entries).
    """

    space: str
    index: int
    conjugated: bool = False
    grade: int = 0
    row: int = 0
    col: int = 0

    def __post_init__(self):
        if self.space not in _SPACE_RANK:
            raise UnknownGenerator(f"unknown space tag {self.space!r}")
        key = (_SPACE_RANK[self.space], self.index, self.row, self.col,
               self.conjugated, self.grade)
        object.__setattr__(self, "_key", key)

    @property
    def sort_key(self):
        return self._key

    def star(self) -> "GeneratorId":
        """Raw conjugation toggle; relation systems may override via star_table."""
        return GeneratorId(self.space, self.index, not self.conjugated,
                           self.grade, self.row, self.col)

    def d(self) -> "GeneratorId":
        if self.grade != 0:
            raise MissingCalculus(f"{self} already has form degree 1")
        return GeneratorId(self.space, self.index, self.conjugated, 1,
                           self.row, self.col)

    def label(self) -> str:
        if self.space == C4:
            base = f"z{self.index}"
        elif self.space == R4:
            base = _R4_NAMES.get(self.index, f"r{self.index}")
        elif self.space == S4:
            base = _S4_NAMES.get(self.index, f"x{self.index}")
        elif self.space == CP3:
            base = _CP3_NAMES.get(self.index, f"q{self.index}")
        elif self.space == CP1:
            base = _CP1_NAMES.get(self.index, f"c{self.index}")
        elif self.space == MONAD_M:
            base = f"M{self.index}[{self.row},{self.col}]"
        elif self.space == MONAD_N:
            base = f"N{self.index}[{self.row},{self.col}]"
        elif self.space == HOPF_TRANS:
            base = f"t{self.index}"
        elif self.space == HOPF_TORUS:
            base = f"s{self.index}"
        else:
            base = "inv(rho2)" if self.index == 1 else f"aux{self.index}"
        if self.grade == 1:
            base = "d" + base
        if self.conjugated:
            base = base + "*"
        return base

    def __repr__(self):
        return self.label()


def word_key(word):
    return tuple(g.sort_key for g in word)


def deglex_key(word):
    return (len(word), word_key(word))


@dataclass(frozen=True)
class Coefficient:
    """``value * hbar^hbar_power * mu^(mu2/2)`` with exact formal exponents.

    ``value`` carries all numeric magnitude (including powers of the model's
    numeric hbar); ``hbar`` counts the formal degree, which controls the
    anti-real conjugation sign and the ``i**hbar`` evaluation phase.
    """

    value: complex
    hbar: int = 0
    mu2: int = 0

    def __mul__(self, other: "Coefficient") -> "Coefficient":
        return Coefficient(self.value * other.value, self.hbar + other.hbar,
                           self.mu2 + other.mu2)

    def scale(self, c: complex) -> "Coefficient":
        return Coefficient(self.value * c, self.hbar, self.mu2)

    def conj(self) -> "Coefficient":
        return Coefficient(self.value.conjugate() * (-1) ** self.hbar,
                           self.hbar, -self.mu2)

    def evaluate(self, theta: float | None = None) -> complex:
        v = self.value * (1j ** (self.hbar % 4))
        if self.mu2:
            if theta is None:
                raise StarAlgebraError("mu-power present but no theta given")
            v *= cmath.exp(0.5j * cmath.pi * theta * self.mu2)
        return v

    def is_zero(self, tol: float = TOL) -> bool:
        return abs(self.value) <= tol

    def __pow__(self, n: int) -> "Coefficient":
        return Coefficient(self.value ** n, self.hbar * n, self.mu2 * n)

    def approx_eq(self, other: "Coefficient", tol: float = TOL) -> bool:
        return (self.hbar == other.hbar and self.mu2 == other.mu2
                and abs(self.value - other.value) <= tol)

    @property
    def mu_power(self):
        if self.mu2 % 2:
            return self.mu2 / 2
        return self.mu2 // 2

    def __repr__(self):
        s = f"({self.value:.6g})"
        if self.hbar:
            s += f"*hbar^{self.hbar}"
        if self.mu2:
            s += f"*mu^{self.mu_power}"
        return s


@dataclass(frozen=True)
class Monomial:
    """A word of generators; normal-form words are sorted per the system order."""

    word: tuple

    @property
    def total_grade(self) -> int:
        return sum(g.grade for g in self.word)

    def label(self) -> str:
        return "*".join(g.label() for g in self.word) if self.word else "1"


class NCPolynomial:
    """Linear combination of words; terms keyed by (word, hbar, mu2)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = dict(terms) if terms else {}

    # -- constructors ------------------------------------------------------
    @staticmethod
    def zero() -> "NCPolynomial":
        return NCPolynomial()

    @staticmethod
    def one(c: complex = 1.0) -> "NCPolynomial":
        return NCPolynomial({((), 0, 0): complex(c)})

    @staticmethod
    def from_generator(g: GeneratorId, c: complex = 1.0) -> "NCPolynomial":
        return NCPolynomial({((g,), 0, 0): complex(c)})

    @staticmethod
    def from_word(word, coeff: Coefficient | complex = 1.0) -> "NCPolynomial":
        if not isinstance(coeff, Coefficient):
            coeff = Coefficient(complex(coeff))
        return NCPolynomial({(tuple(word), coeff.hbar, coeff.mu2): coeff.value})

    # -- ring-free operations ---------------------------------------------
    def copy(self) -> "NCPolynomial":
        return NCPolynomial(self.terms)

    def _accum(self, key, value):
        v = self.terms.get(key, 0.0) + value
        if abs(v) <= TOL:
            self.terms.pop(key, None)
        else:
            self.terms[key] = v

    def __add__(self, other):
        out = self.copy()
        for k, v in other.terms.items():
            out._accum(k, v)
        return out

    def __sub__(self, other):
        out = self.copy()
        for k, v in other.terms.items():
            out._accum(k, -v)
        return out

    def __neg__(self):
        return NCPolynomial({k: -v for k, v in self.terms.items()})

    def scale(self, c: complex) -> "NCPolynomial":
        if abs(c) <= TOL:
            return NCPolynomial()
        return NCPolynomial({k: v * c for k, v in self.terms.items()})

    def scale_coeff(self, c: Coefficient) -> "NCPolynomial":
        out = NCPolynomial()
        for (w, h, m), v in self.terms.items():
            out._accum((w, h + c.hbar, m + c.mu2), v * c.value)
        return out

    def is_structurally_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(w) for (w, _, _) in self.terms), default=0)

    def generators(self):
        seen = set()
        for (w, _, _) in self.terms:
            seen.update(w)
        return seen

    # -- coefficient access -------------------------------------------------
    def coefficients_of(self, word) -> list:
        word = tuple(word)
        return [Coefficient(v, h, m) for (w, h, m), v in self.terms.items()
                if w == word]

    def coefficient(self, word, hbar=0, mu2=0) -> Coefficient:
        v = self.terms.get((tuple(word), hbar, mu2), 0.0)
        return Coefficient(v, hbar, mu2)

    # -- numeric evaluation --------------------------------------------------
    def evaluated_coefficients(self, theta: float | None = None) -> dict:
        """Merge formal parameter sectors per word via numeric evaluation."""
        out = {}
        for (w, h, m), v in self.terms.items():
            out[w] = out.get(w, 0.0) + Coefficient(v, h, m).evaluate(theta)
        return out

    def eval_norm(self, theta: float | None = None) -> float:
        vals = self.evaluated_coefficients(theta)
        return sum(abs(v) for v in vals.values())

    def eval_max(self, theta: float | None = None) -> float:
        vals = self.evaluated_coefficients(theta)
        return max((abs(v) for v in vals.values()), default=0.0)

    # -- rendering ------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda kv: (deglex_key(kv[0][0]), kv[0][1], kv[0][2]))

    def canonical_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (w, h, m), v in self.sorted_terms():
            c = Coefficient(v, h, m)
            parts.append(f"{c!r}*{Monomial(w).label()}")
        return " + ".join(parts)

    def to_json_dict(self) -> dict:
        terms = []
        for (w, h, m), v in self.sorted_terms():
            if m % 2:
                raise StarAlgebraError("half-integer mu power in exported term")
            terms.append({"word": [g.label() for g in w],
                          "re": v.real, "im": v.imag,
                          "hbar_pow": h, "mu_pow": m // 2})
        return {"terms": terms}

    def __repr__(self):
        return self.canonical_text()


def classical_normal_form_word(word):
    """Sort a word as in the graded-commutative algebra.

    Returns ``(sign, sorted_word)`` or ``None`` when the word vanishes
    (repeated odd letter).  Only valid for classical (undeformed) reduction.
    """
    letters = list(word)
    sign = 1
    n = len(letters)
    for i in range(1, n):
        j = i
        while j > 0 and letters[j - 1].sort_key > letters[j].sort_key:
            if letters[j - 1].grade and letters[j].grade:
                sign = -sign
            letters[j - 1], letters[j] = letters[j], letters[j - 1]
            j -= 1
    for i in range(1, n):
        if letters[i] == letters[i - 1] and letters[i].grade:
            return None
    return sign, tuple(letters)


def classical_product(a: NCPolynomial, b: NCPolynomial) -> NCPolynomial:
    """Graded-commutative product (used by the twisting machinery)."""
    out = NCPolynomial()
    for (wa, ha, ma), va in a.terms.items():
        for (wb, hb, mb), vb in b.terms.items():
            nf = classical_normal_form_word(wa + wb)
            if nf is None:
                continue
            sign, w = nf
            out._accum((w, ha + hb, ma + mb), sign * va * vb)
    return out


class RelationSystem:
    """Terminating rewrite rules for one deformed algebra.

    ``rules`` maps an adjacent letter pair to a tuple of
    ``(word, Coefficient)`` replacement terms; pairs without a rule commute
    up to the Koszul sign.  ``star_table`` maps each generator to its
    adjoint image (identity entries encode self-adjoint generators).
    ``theta`` is kept for numeric evaluation of mu-powers.
    """

    def __init__(self, generators, rules, star_table=None, theta=None,
                 meta=None):
        self.generators = tuple(sorted(set(generators), key=lambda g: g.sort_key))
        self.rules = dict(rules)
        gen_set = set(self.generators)
        table = {}
        for g in self.generators:
            table[g] = g.star() if g.star() in gen_set else g
        if star_table:
            table.update(star_table)
        self.star_table = table
        self.theta = theta
        self.meta = dict(meta or {})

    def star(self, g: GeneratorId) -> GeneratorId:
        try:
            return self.star_table[g]
        except KeyError:
            raise UnknownGenerator(f"{g} has no adjoint image") from None

    def check_generators(self, p: NCPolynomial):
        known = set(self.generators)
        for g in p.generators():
            if g not in known:
                raise UnknownGenerator(f"{g} not in relation system")

    @property
    def has_calculus(self) -> bool:
        return any(g.grade == 1 for g in self.generators)

    def to_json_dict(self) -> dict:
        rules = []
        for pattern in sorted(self.rules, key=word_key):
            rhs = NCPolynomial()
            for w, c in self.rules[pattern]:
                rhs = rhs + NCPolynomial.from_word(w, c)
            rules.append({"pattern": [g.label() for g in pattern],
                          "rhs": rhs.to_json_dict()})
        return {
            "generators": [g.label() for g in self.generators],
            "rules": rules,
            "meta": {k: v for k, v in sorted(self.meta.items())},
        }


# -- normal-ordering engine -----------------------------------------------

def _reduce_terms(terms, rel: RelationSystem, budget: int):
    """Worklist reduction of ``(word, hbar, mu2) -> value`` term dicts.

    Adjacent pairs with an explicit rule are rewritten by it; out-of-order
    pairs without a rule commute up to the Koszul sign, and a repeated
    grade-1 letter kills the word.
    """
    out = {}
    stack = [(w, h, m, v) for (w, h, m), v in terms.items()]
    steps = 0
    rules = rel.rules
    while stack:
        w, h, m, v = stack.pop()
        if abs(v) <= TOL:
            continue
        n = len(w)
        hit = None
        for i in range(n - 1):
            a, b = w[i], w[i + 1]
            if (a, b) in rules:
                hit = (i, "rule")
                break
            if a == b and a.grade:
                hit = (i, "kill")
                break
            if a.sort_key > b.sort_key:
                hit = (i, "swap")
                break
        if hit is None:
            key = (w, h, m)
            nv = out.get(key, 0.0) + v
            if abs(nv) <= TOL:
                out.pop(key, None)
            else:
                out[key] = nv
            continue
        steps += 1
        if steps > budget:
            raise NonTerminating("rewrite step budget exceeded")
        i, kind = hit
        if kind == "rule":
            for u, c in rules[w[i:i + 2]]:
                stack.append((w[:i] + u + w[i + 2:], h + c.hbar, m + c.mu2,
                              v * c.value))
        elif kind == "swap":
            sign = -1.0 if (w[i].grade and w[i + 1].grade) else 1.0
            stack.append((w[:i] + (w[i + 1], w[i]) + w[i + 2:], h, m, sign * v))
        # "kill": nothing pushed
    return out


def normal_form(p: NCPolynomial, rel: RelationSystem,
                budget: int = STEP_BUDGET) -> NCPolynomial:
    """Bring every word of ``p`` to normal order with respect to ``rel``."""
    rel.check_generators(p)
    return NCPolynomial(_reduce_terms(p.terms, rel, budget))


def multiply(a: NCPolynomial, b: NCPolynomial,
             rel: RelationSystem) -> NCPolynomial:
    """Normal form of the concatenation product."""
    rel.check_generators(a)
    rel.check_generators(b)
    prod = {}
    for (wa, ha, ma), va in a.terms.items():
        for (wb, hb, mb), vb in b.terms.items():
            key = (wa + wb, ha + hb, ma + mb)
            prod[key] = prod.get(key, 0.0) + va * vb
    return NCPolynomial(_reduce_terms(prod, rel, STEP_BUDGET))


def adjoint(p: NCPolynomial, rel: RelationSystem) -> NCPolynomial:
    """Anti-multiplicative involution; coefficients conjugated (anti-real
    hbar, negated mu-power), result in normal form."""
    rel.check_generators(p)
    out = {}
    for (w, h, m), v in p.terms.items():
        sw = tuple(rel.star(g) for g in reversed(w))
        c = Coefficient(v, h, m).conj()
        key = (sw, c.hbar, c.mu2)
        out[key] = out.get(key, 0.0) + c.value
    return NCPolynomial(_reduce_terms(out, rel, STEP_BUDGET))


def differential(p: NCPolynomial, rel: RelationSystem) -> NCPolynomial:
    """Graded Leibniz derivation of degree +1 (d: g -> dg, d(dg) = 0)."""
    if not rel.has_calculus:
        raise MissingCalculus("relation system has no grade-1 generators")
    rel.check_generators(p)
    gen_set = set(rel.generators)
    out = {}
    for (w, h, m), v in p.terms.items():
        sign = 1
        for i, g in enumerate(w):
            if g.grade == 1:
                sign = -sign
                continue
            dg = g.d()
            if dg not in gen_set:
                continue  # letters without differentials are constants
            nw = w[:i] + (dg,) + w[i + 1:]
            key = (nw, h, m)
            out[key] = out.get(key, 0.0) + sign * v
    return NCPolynomial(_reduce_terms(out, rel, STEP_BUDGET))


# -- validation helpers -----------------------------------------------------

def _random_poly(rel, rng, max_deg=3, n_terms=3):
    gens = [g for g in rel.generators if g.grade == 0]
    p = NCPolynomial()
    for _ in range(n_terms):
        d = int(rng.integers(1, max_deg + 1))
        word = tuple(gens[int(rng.integers(0, len(gens)))] for _ in range(d))
        c = complex(rng.standard_normal(), rng.standard_normal())
        p = p + NCPolynomial.from_word(word, c)
    return p


def associativity_residual(rel: RelationSystem, rng, trials: int = 10,
                           theta: float | None = None) -> float:
    """Largest associativity defect over random triples; the confluence probe."""
    worst = 0.0
    theta = rel.theta if theta is None else theta
    for _ in range(trials):
        a = _random_poly(rel, rng)
        b = _random_poly(rel, rng)
        c = _random_poly(rel, rng)
        lhs = multiply(multiply(a, b, rel), c, rel)
        rhs = multiply(a, multiply(b, c, rel), rel)
        worst = max(worst, (lhs - rhs).eval_norm(theta))
    return worst


def star_closure_residual(rel: RelationSystem, rng, trials: int = 10,
                          theta: float | None = None) -> float:
    """Largest defect of adjoint(ab) = adjoint(b) adjoint(a) over samples."""
    worst = 0.0
    theta = rel.theta if theta is None else theta
    for _ in range(trials):
        a = _random_poly(rel, rng)
        b = _random_poly(rel, rng)
        lhs = adjoint(multiply(a, b, rel), rel)
        rhs = multiply(adjoint(b, rel), adjoint(a, rel), rel)
        worst = max(worst, (lhs - rhs).eval_norm(theta))
    return worst

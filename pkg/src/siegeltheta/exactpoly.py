"""Exact sparse multivariate polynomials over the rationals.

Coefficients are Fractions (unbounded integers, always in lowest terms
with positive denominator), exponent vectors are tuples over a fixed,
name-sorted variable list, and a polynomial is zero exactly when its
term map is empty.  Term iteration and serialization use graded
lexicographic order.

On top of the ring arithmetic this module certifies the two
coefficient-level identities of the genus-2 thetanull ring and one
consistency lemma:

  * the chi identity: with chi1 = (p-q)^2, chi2 = (p-r)^2,
    chi3 = (r-q)^2 in three indeterminates,
    chi1^2+chi2^2+chi3^2 - 2(chi1 chi2 + chi2 chi3 + chi3 chi1) = 0;

  * the phi identity: with phi_0..phi_3 built from first-slot
    differences and developed 2x2 determinants in the twelve
    indeterminates psi_{a,j} (a in {00,01,02,03}, j in {1,2,3}),
    ((phi_0+..+phi_3)^2 - 2(phi_0^2+..+phi_3^2))^2
      - 64 phi_0 phi_1 phi_2 phi_3 = 0;

  * the Gopel sum lemma: the fifteen per-system derivative identities
    and the ten single-characteristic ones express the same derivatives,
    and the two global sums cancel exactly in the thirty genus-2 symbols
    (per system the difference is not formally zero; it vanishes only on
    the theta locus, which the numeric harness covers).
"""

from __future__ import annotations

from fractions import Fraction

from .characteristics import digit_encode, enumerate_characteristics, gopel_systems

__all__ = [
    "RationalPoly",
    "verify_chi_identity",
    "verify_phi_identity",
    "verify_gopel_sum_lemma",
    "chi_combination",
    "phi_polynomials",
    "phi_combination",
    "gopel_sum_defect",
    "gopel_sum_defects_by_system",
]

MAX_DEGREE = 10**6


class RationalPoly:
    """Sparse polynomial with exact rational coefficients."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms=None):
        self.variables = tuple(variables)
        clean = {}
        for expo, coeff in (terms or {}).items():
            c = Fraction(coeff)
            if c == 0:
                continue
            expo = tuple(int(e) for e in expo)
            if len(expo) != len(self.variables):
                raise ValueError("exponent vector length does not match variable count")
            if any(e < 0 for e in expo):
                raise ValueError("negative exponents are not supported")
            if sum(expo) > MAX_DEGREE:
                raise OverflowError(f"degree above the supported limit {MAX_DEGREE}")
            clean[expo] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, variables=()) -> "RationalPoly":
        return cls(variables, {})

    @classmethod
    def constant(cls, value, variables=()) -> "RationalPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): Fraction(value)})

    @classmethod
    def variable(cls, name: str, variables=None) -> "RationalPoly":
        if variables is None:
            variables = (name,)
        variables = tuple(variables)
        expo = [0] * len(variables)
        expo[variables.index(name)] = 1
        return cls(variables, {tuple(expo): Fraction(1)})

    @classmethod
    def ring(cls, names) -> list["RationalPoly"]:
        """Generators x_1, ..., x_k over a shared variable context."""
        names = tuple(names)
        return [cls.variable(n, names) for n in names]

    # -- variable alignment ---------------------------------------------

    def _remap(self, variables) -> "RationalPoly":
        if variables == self.variables:
            return self
        pos = [variables.index(v) for v in self.variables]
        n = len(variables)
        terms = {}
        for expo, c in self.terms.items():
            new = [0] * n
            for p, e in zip(pos, expo):
                new[p] = e
            terms[tuple(new)] = c
        return RationalPoly(variables, terms)

    @staticmethod
    def _common(a: "RationalPoly", b: "RationalPoly"):
        if a.variables == b.variables:
            return a, b
        merged = tuple(sorted(set(a.variables) | set(b.variables)))
        return a._remap(merged), b._remap(merged)

    def _coerce(self, other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            return other
        return RationalPoly.constant(other, self.variables)

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        a, b = self._common(self, self._coerce(other))
        terms = dict(a.terms)
        for expo, c in b.terms.items():
            s = terms.get(expo, Fraction(0)) + c
            if s:
                terms[expo] = s
            else:
                terms.pop(expo, None)
        return RationalPoly(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RationalPoly):
            s = Fraction(other)
            return RationalPoly(self.variables, {e: c * s for e, c in self.terms.items()})
        a, b = self._common(self, other)
        out: dict = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(key, Fraction(0)) + ca * cb
                if s:
                    out[key] = s
                else:
                    del out[key]
        return RationalPoly(a.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = RationalPoly.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def substitute(self, name: str, replacement) -> "RationalPoly":
        """Substitute a polynomial (or constant) for the named variable."""
        if name not in self.variables:
            return self
        repl = replacement if isinstance(replacement, RationalPoly) else \
            RationalPoly.constant(replacement, self.variables)
        idx = self.variables.index(name)
        out = RationalPoly.zero(self.variables)
        powers = {0: RationalPoly.constant(1, self.variables)}
        for expo, c in sorted(self.terms.items()):
            k = expo[idx]
            if k not in powers:
                powers[k] = repl**k
            rest = list(expo)
            rest[idx] = 0
            mono = RationalPoly(self.variables, {tuple(rest): c})
            out = out + mono * powers[k]
        return out

    def evaluate(self, assignment: dict):
        """Exact evaluation with Fractions (or any commutative values)."""
        vals = [assignment[v] for v in self.variables]
        total = Fraction(0)
        first = True
        for expo, c in self.sorted_terms():
            term = c
            for v, e in zip(vals, expo):
                if e:
                    term = term * v**e
            total = term if first else total + term
            first = False
        return total if not first else Fraction(0)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            other = RationalPoly.constant(other, self.variables)
        a, b = self._common(self, other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def sorted_terms(self):
        """Terms in graded lexicographic order on the fixed variable list."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for expo, c in self.sorted_terms():
            factors = [str(c)]
            for v, e in zip(self.variables, expo):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append(f"{v}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"RationalPoly({len(self.variables)} vars, {len(self.terms)} terms)"


# ----------------------------------------------------------------------
# the chi identity
# ----------------------------------------------------------------------

def chi_combination(cross_factor=2) -> RationalPoly:
    """chi1^2 + chi2^2 + chi3^2 - f (chi1 chi2 + chi2 chi3 + chi3 chi1)
    with chi1 = (p-q)^2, chi2 = (p-r)^2, chi3 = (r-q)^2.

    With the true cross factor f = 2 this is the zero polynomial; any
    other factor is a mutation control.
    """
    p, q, r = RationalPoly.ring(["p", "q", "r"])
    chi1 = (p - q) ** 2
    chi2 = (p - r) ** 2
    chi3 = (r - q) ** 2
    f = Fraction(cross_factor)
    return (
        chi1**2 + chi2**2 + chi3**2
        - f * (chi1 * chi2) - f * (chi2 * chi3) - f * (chi3 * chi1)
    )


def verify_chi_identity() -> bool:
    """True iff the chi combination expands to exactly zero."""
    return chi_combination().is_zero()


# ----------------------------------------------------------------------
# the phi identity (developed determinants, twelve indeterminates)
# ----------------------------------------------------------------------

_K0 = ("00", "01", "02", "03")


def _psi_vars():
    names = tuple(f"psi_{a}_{j}" for a in _K0 for j in (1, 2, 3))
    gens = {(a, j): RationalPoly.variable(f"psi_{a}_{j}", names) for a in _K0 for j in (1, 2, 3)}
    return gens


def _eta_developed(gens, a: str, b: str) -> RationalPoly:
    # det of the difference of psi matrices in first-minor form:
    # (psi_{a,1}-psi_{b,1})(psi_{a,2}-psi_{b,2}) - (psi_{a,3}-psi_{b,3})^2
    return (gens[(a, 1)] - gens[(b, 1)]) * (gens[(a, 2)] - gens[(b, 2)]) - (
        gens[(a, 3)] - gens[(b, 3)]
    ) ** 2


def phi_polynomials(slot: int = 1) -> list[RationalPoly]:
    """The four phi polynomials over the twelve psi indeterminates.

    slot selects which derivative slot the plain differences use (1 by
    default; 2 gives the symmetric partner obtained by the index swap
    1 <-> 2, which satisfies the same relation).
    """
    if slot not in (1, 2):
        raise ValueError("slot must be 1 or 2")
    gens = _psi_vars()
    eta = {}
    for a in _K0:
        for b in _K0:
            if a != b:
                eta[(a, b)] = _eta_developed(gens, a, b)

    def d(a, b):
        return gens[(a, slot)] - gens[(b, slot)]

    def phi(x, y, z):
        # the triple excluding one member of K0, in the fixed pattern
        return (
            d(z, x) * d(x, y) * eta[(y, z)]
            + d(y, z) * d(x, y) * eta[(z, x)]
            + d(y, z) * d(z, x) * eta[(x, y)]
        )

    return [
        phi("01", "02", "03"),
        phi("00", "02", "03"),
        phi("00", "01", "03"),
        phi("00", "01", "02"),
    ]


def phi_combination(product_constant=64, slot: int = 1) -> tuple[RationalPoly, dict]:
    """((sum phi)^2 - 2 sum phi^2)^2 - c * phi_0 phi_1 phi_2 phi_3.

    Returns the expanded polynomial together with expansion statistics
    (term-count high-water mark across intermediates).
    """
    phis = phi_polynomials(slot)
    high_water = max(p.term_count for p in phis)
    total = phis[0] + phis[1] + phis[2] + phis[3]
    squares = [p * p for p in phis]
    high_water = max(high_water, *(s.term_count for s in squares))
    inner = total * total - 2 * squares[0] - 2 * squares[1] - 2 * squares[2] - 2 * squares[3]
    high_water = max(high_water, inner.term_count)
    inner_sq = inner * inner
    high_water = max(high_water, inner_sq.term_count)
    prod = (phis[0] * phis[1]) * (phis[2] * phis[3])
    high_water = max(high_water, prod.term_count)
    result = inner_sq - Fraction(product_constant) * prod
    stats = {
        "term_count_high_water": high_water,
        "result_terms": result.term_count,
        "phi_terms": [p.term_count for p in phis],
    }
    return result, stats


def verify_phi_identity() -> bool:
    """True iff the phi combination (with constant 64) is exactly zero."""
    poly, _ = phi_combination()
    return poly.is_zero()


# ----------------------------------------------------------------------
# Gopel sum lemma (thirty genus-2 symbols)
# ----------------------------------------------------------------------

def _genus2_symbol_ring():
    evens = enumerate_characteristics(2, "even")
    labels = [digit_encode(a) for a in evens]
    names = tuple(sorted([f"psi_{a}_{j}" for a in labels for j in (1, 2, 3)] + ["u1", "u2"]))
    u1 = RationalPoly.variable("u1", names)
    u2 = RationalPoly.variable("u2", names)
    qforms = {}
    for a in labels:
        p1 = RationalPoly.variable(f"psi_{a}_1", names)
        p2 = RationalPoly.variable(f"psi_{a}_2", names)
        p3 = RationalPoly.variable(f"psi_{a}_3", names)
        # quadratic form of the symmetric matrix [[p1, p3], [p3, p2]]
        qforms[a] = p1 * u1 * u1 + p2 * u2 * u2 + 2 * (p3 * u1) * u2
    return labels, qforms


def _gopel_setup(quarter):
    labels, q = _genus2_symbol_ring()
    systems = [[digit_encode(m) for m in G.members] for G in gopel_systems(2)]
    sum_all = sum((q[a] for a in labels), RationalPoly.zero())
    sum_sq = sum((q[a] * q[a] for a in labels), RationalPoly.zero())
    sum_all_sq = sum_all * sum_all
    system_sq = {}
    for G in systems:
        s = sum((q[a] for a in G), RationalPoly.zero())
        system_sq[tuple(G)] = s * s

    def rhs_single(a: str) -> RationalPoly:
        out = -2 * (q[a] * q[a]) - Fraction(1, 3) * sum_sq - Fraction(1, 6) * sum_all_sq
        for G in systems:
            if a in G:
                out = out + Fraction(quarter) * system_sq[tuple(G)]
        return out

    def rhs_system(G) -> RationalPoly:
        s = sum((q[a] for a in G), RationalPoly.zero())
        return s * s - 2 * sum((q[a] * q[a] for a in G), RationalPoly.zero())

    return labels, systems, rhs_single, rhs_system


def gopel_sum_defect(quarter=Fraction(1, 4)) -> RationalPoly:
    """Global consistency defect between the per-system and the
    single-characteristic derivative expressions:

        sum over all fifteen systems of the per-system right-hand side
        minus 6 * sum over the ten even characteristics of the
        single-characteristic right-hand side

    (the factor 6 is the incidence degree: every characteristic lies in
    six systems, so both sums express the same derivative).  With the
    true coefficient 1/4 this expands to the zero polynomial in the
    thirty symbols; any other coefficient is a mutation control.
    """
    labels, systems, rhs_single, rhs_system = _gopel_setup(quarter)
    total_systems = sum((rhs_system(G) for G in systems), RationalPoly.zero())
    total_single = sum((rhs_single(a) for a in labels), RationalPoly.zero())
    return total_systems - 6 * total_single


def gopel_sum_defects_by_system(quarter=Fraction(1, 4)) -> list[RationalPoly]:
    """Per-system defects: sum of the four single-characteristic right-hand
    sides minus the per-system right-hand side.

    These are NOT the zero polynomial in free symbols (the cross-term
    coefficients obstruct); they vanish only on the theta locus, which
    the numeric harness checks.  Only the sum over all fifteen systems
    cancels formally; see gopel_sum_defect.
    """
    labels, systems, rhs_single, rhs_system = _gopel_setup(quarter)
    return [
        sum((rhs_single(a) for a in G), RationalPoly.zero()) - rhs_system(G)
        for G in systems
    ]


def verify_gopel_sum_lemma() -> bool:
    """True iff the global consistency defect expands to exactly zero."""
    return gopel_sum_defect().is_zero()

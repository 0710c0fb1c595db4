"""Certified evaluation of theta functions with 2-characteristics.

The series evaluated here is

    theta_a(z, tau) = sum_{n in Z^g} exp( pi i (n+a'/2)^t tau (n+a'/2)
                                          + 2 pi i (n+a'/2)^t (z+a''/2) ),

truncated to the box |n_j + a'_j/2| <= N.  Every term with m = n + a'/2
satisfies |term| <= exp(-pi lam |m|^2 + 2 pi r |m|) where lam is the
smallest eigenvalue of Im(tau) and r = |Im z|; the discarded tail is
bounded by a product of one-dimensional Gaussian sums, so each returned
value carries a certified absolute truncation bound.

Derivatives come from the same lattice sum: d/dz_j brings a per-term
factor 2 pi i m_j, and the heat equation makes the normalized tau
derivatives computable termwise as well,

    delta_jl theta_a = (1/(2 pi i)^2) d^2 theta_a / dz_j dz_l,

i.e. a per-term factor m_j m_l.  Logarithmic derivatives of thetanulls
are assembled into the symmetric matrix psi_a with entries
psi_{a,jl} = delta_jl theta_a / theta_a, and the quartic form
delta(psi_a) has coefficients

    delta_jl psi_{a,mp} = (fourth moment)_{jlmp} / theta_a
                          - psi_{a,jl} psi_{a,mp},

computed from fourth-order z-derivative data, never by tau differencing.

Summation runs in a fixed lexicographic order with exactly rounded
(Shewchuk) accumulation, so results are reproducible bitwise and the
parity cancellations are exact: odd characteristics give value and
Hessian exactly 0 at z = 0, even ones give gradient exactly 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import fsum

import numpy as np

from .characteristics import Characteristic
from .siegel import PD_MARGIN, SiegelPoint, DerivationIndex, HalfSpaceError

__all__ = [
    "ThetaJet",
    "SymmetricForm",
    "QuarticForm",
    "Moments",
    "TruncationError",
    "NearZeroThetanull",
    "truncation_radius",
    "theta_jet",
    "theta_values",
    "theta_moments",
    "batch_moments",
    "delta_theta",
    "psi_matrix",
    "odd_z_gradient",
    "quartic_delta_psi",
    "DEFAULT_EPS",
]

#: default absolute accuracy requested from the series kernel
DEFAULT_EPS = 1e-14

_MAX_RADIUS = 400

_PHASES = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


class TruncationError(ValueError):
    """Requested accuracy unreachable (tau too close to the boundary)."""


class NearZeroThetanull(ArithmeticError):
    """A thetanull is too close to 0 for a reliable logarithmic derivative."""


# ----------------------------------------------------------------------
# truncation bounds
# ----------------------------------------------------------------------

def _one_dim_sums(lam: float, r: float, shift: int, nrad: int) -> tuple[float, float]:
    """(S, T): S = sum of h(|x|) over lattice points x in Z + shift/2 with
    |x| <= nrad, and T = certified upper bound for the rest, where
    h(x) = exp(-pi lam x^2 + 2 pi r x).  T = inf when the geometric
    bound does not yet apply at radius nrad."""
    if shift:
        xs = np.arange(0.5, nrad + 0.25, 1.0)
        inside = fsum(2.0 * np.exp(-math.pi * lam * xs * xs + 2 * math.pi * r * xs))
        x1 = nrad + 0.5
    else:
        xs = np.arange(1.0, nrad + 0.5, 1.0)
        inside = 1.0 + fsum(2.0 * np.exp(-math.pi * lam * xs * xs + 2 * math.pi * r * xs))
        x1 = float(nrad + 1)
    rho = math.exp(-math.pi * lam * (2 * x1 + 1) + 2 * math.pi * r)
    if rho >= 1.0:
        return inside, math.inf
    h1 = math.exp(-math.pi * lam * x1 * x1 + 2 * math.pi * r * x1)
    return inside, 2.0 * h1 / (1.0 - rho)


def _box_tail(lam: float, r: float, shifts, nrad: int, weight: int) -> float:
    """Certified bound for sum of |m|^weight * exp(-pi lam |m|^2 + 2 pi r |m|)
    over lattice points m outside the box |m_j| <= nrad.

    shifts holds one entry per axis: 0 or 1 for the parity of a'_j, or
    "any" to dominate both parities at once (per-axis maxima; the
    resulting bound is monotone in each one-dimensional sum, so it covers
    every mixed pattern).
    """
    if weight == 0:
        lam_eff, scale = lam, 1.0
    else:
        # |m|^w <= C exp(pi (lam/2) |m|^2) with C the analytic maximum
        half = lam / 2.0
        lam_eff = lam - half
        scale = (weight / (2.0 * math.pi * half * math.e)) ** (weight / 2.0)
    sums, tails = [], []
    for aj in shifts:
        if aj == "any":
            s0, t0 = _one_dim_sums(lam_eff, r, 0, nrad)
            s1, t1 = _one_dim_sums(lam_eff, r, 1, nrad)
            s, t = max(s0, s1), max(t0, t1)
        else:
            s, t = _one_dim_sums(lam_eff, r, aj % 2, nrad)
        if math.isinf(t):
            return math.inf
        sums.append(s)
        tails.append(t)
    # prod(S+T) - prod(S), telescoped to avoid catastrophic cancellation
    diff = 0.0
    g = len(sums)
    for j in range(g):
        part = tails[j]
        for k in range(j):
            part *= sums[k] + tails[k]
        for k in range(j + 1, g):
            part *= sums[k]
        diff += part
    return scale * diff


@dataclass(frozen=True)
class TruncationResult:
    radius: int
    bound: float


def truncation_radius(
    tau: SiegelPoint, z, eps: float, weight: int = 0, a: Characteristic | None = None
) -> TruncationResult:
    """Smallest box radius N whose certified tail is <= eps.

    The tail bound covers sum of |m|^weight |term(m)| outside the box
    |n_j + a'_j/2| <= N; weight 0 is the plain value.  Without an
    explicit characteristic the bound dominates every parity pattern of
    a'; with one it uses the exact per-axis parities (slightly tighter).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    lam = tau.lambda_min
    if lam <= PD_MARGIN:
        raise HalfSpaceError("Im(tau) is not positive definite with margin")
    r = _imag_norm(z, tau.genus)
    shifts = ("any",) * tau.genus if a is None else a.a_prime
    for nrad in range(1, _MAX_RADIUS + 1):
        bound = _box_tail(lam, r, shifts, nrad, weight)
        if bound <= eps:
            return TruncationResult(nrad, bound)
    raise TruncationError(
        f"no radius up to {_MAX_RADIUS} certifies eps={eps:g} (lambda_min={lam:g})"
    )


def _imag_norm(z, genus: int) -> float:
    if z is None:
        return 0.0
    zz = np.asarray(z, dtype=complex).reshape(genus)
    return float(np.linalg.norm(zz.imag))


def _radius_for(a_prime, lam: float, r: float, eps: float, weight: int) -> tuple[int, float]:
    for nrad in range(1, _MAX_RADIUS + 1):
        bound = _box_tail(lam, r, a_prime, nrad, weight)
        if bound <= eps:
            return nrad, bound
    raise TruncationError(f"no radius up to {_MAX_RADIUS} certifies eps={eps:g}")


# ----------------------------------------------------------------------
# lattice enumeration and exact summation
# ----------------------------------------------------------------------

@lru_cache(maxsize=64)
def _lattice_two_m(a_prime: tuple[int, ...], nrad: int) -> np.ndarray:
    """Integer array of doubled lattice points 2m = 2n + a' with
    |m_j| <= nrad, in lexicographic order."""
    axes = []
    for aj in a_prime:
        if aj % 2 == 0:
            axes.append(np.arange(-2 * nrad, 2 * nrad + 1, 2, dtype=np.int64))
        else:
            axes.append(np.arange(-2 * nrad + 1, 2 * nrad, 2, dtype=np.int64))
    grids = np.meshgrid(*axes, indexing="ij")
    two_m = np.stack([gr.reshape(-1) for gr in grids], axis=1)
    two_m.setflags(write=False)
    return two_m


def _csum(arr: np.ndarray) -> complex:
    """Exactly rounded complex sum (Shewchuk accumulation per part)."""
    return complex(fsum(arr.real.tolist()), fsum(arr.imag.tolist()))


def _exp_terms(two_m: np.ndarray, tau: np.ndarray, z) -> np.ndarray:
    """exp(pi i m^t tau m + 2 pi i m^t z) for every lattice row (phase of
    a'' excluded; that factor is exact and applied separately)."""
    m = two_m.astype(np.float64) / 2.0
    expo = 1j * math.pi * np.einsum("bj,jl,bl->b", m, tau, m)
    if z is not None:
        zz = np.asarray(z, dtype=complex).reshape(two_m.shape[1])
        if np.any(zz != 0):
            expo = expo + 2j * math.pi * (m @ zz)
    return np.exp(expo)


def _phase_factors(two_m: np.ndarray, a_double_prime) -> np.ndarray:
    """i^((2m).a'' mod 4); exactly one of {1, i, -1, -i} per point."""
    p = (two_m @ np.asarray(a_double_prime, dtype=np.int64)) % 4
    return _PHASES[p]


# ----------------------------------------------------------------------
# jets and moments
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaJet:
    """theta_a at (z, tau) with z-gradient, z-Hessian and a certified
    absolute truncation bound on the value."""

    value: complex
    z_gradient: np.ndarray
    z_hessian: np.ndarray
    tail_bound: float

    def to_json(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "grad": [[v.real, v.imag] for v in self.z_gradient],
            "hess": [[[v.real, v.imag] for v in row] for row in self.z_hessian],
            "tail_bound": self.tail_bound,
        }


@dataclass(frozen=True)
class Moments:
    """Termwise z = 0 lattice moments of one characteristic.

    value = theta_a(0, tau); t1[j] = sum m_j term (equals the gradient
    over 2 pi i); t2[j,l] = sum m_j m_l term (equals delta_jl theta_a);
    t4[(j,l,m,p) sorted] = sum m_j m_l m_m m_p term.
    """

    value: complex
    t1: np.ndarray
    t2: np.ndarray
    t4: dict
    tail_bound: float
    radius: int


def _check_char(a: Characteristic, tau: SiegelPoint):
    if a.genus != tau.genus:
        raise ValueError("characteristic and point have different genus")


def theta_jet(a: Characteristic, z, tau: SiegelPoint, eps: float = DEFAULT_EPS) -> ThetaJet:
    """Evaluate theta_a and its z-derivatives to order 2 at (z, tau).

    The box radius is chosen so that value, gradient and Hessian all
    carry truncation error at most eps; tail_bound is the (smaller)
    certified bound on the value itself.
    """
    _check_char(a, tau)
    if eps <= 0:
        raise ValueError("eps must be positive")
    g = tau.genus
    lam = tau.lambda_min
    r = _imag_norm(z, g)
    two_pi = 2.0 * math.pi
    n0, bound0 = _radius_for(a.a_prime, lam, r, eps, 0)
    n1, _ = _radius_for(a.a_prime, lam, r, eps / two_pi, 1)
    n2, _ = _radius_for(a.a_prime, lam, r, eps / two_pi**2, 2)
    nrad = max(n0, n1, n2)
    bound0 = _box_tail(lam, r, a.a_prime, nrad, 0)

    two_m = _lattice_two_m(a.a_prime, nrad)
    m = two_m.astype(np.float64) / 2.0
    t = _exp_terms(two_m, tau.tau, z) * _phase_factors(two_m, a.a_double_prime)

    value = _csum(t)
    grad = np.empty(g, dtype=complex)
    hess = np.empty((g, g), dtype=complex)
    for j in range(g):
        grad[j] = 2j * math.pi * _csum(m[:, j] * t)
    for j in range(g):
        for l in range(j, g):
            hess[j, l] = hess[l, j] = (2j * math.pi) ** 2 * _csum(m[:, j] * m[:, l] * t)
    return ThetaJet(value, grad, hess, bound0)


def theta_values(
    chars, z, tau: SiegelPoint, eps: float = DEFAULT_EPS
) -> dict[Characteristic, complex]:
    """Batch values theta_a(z, tau) for several characteristics.

    Characteristics sharing the same a' reuse one lattice/exponential
    pass; only the exact phase factors differ.
    """
    chars = list(chars)
    for a in chars:
        _check_char(a, tau)
    lam = tau.lambda_min
    r = _imag_norm(z, tau.genus)
    out: dict[Characteristic, complex] = {}
    by_coset: dict[tuple, list[Characteristic]] = {}
    for a in chars:
        by_coset.setdefault(a.a_prime, []).append(a)
    for a_prime, group in by_coset.items():
        nrad, _ = _radius_for(a_prime, lam, r, eps, 0)
        two_m = _lattice_two_m(a_prime, nrad)
        base = _exp_terms(two_m, tau.tau, z)
        for a in group:
            out[a] = _csum(base * _phase_factors(two_m, a.a_double_prime))
    return out


def theta_moments(
    a: Characteristic, tau: SiegelPoint, eps: float = DEFAULT_EPS, order: int = 4
) -> Moments:
    """z = 0 moments of theta_a up to the requested order (2 or 4)."""
    return batch_moments([a], tau, eps, order)[a]


def batch_moments(
    chars, tau: SiegelPoint, eps: float = DEFAULT_EPS, order: int = 4
) -> dict[Characteristic, Moments]:
    """Batch z = 0 moments, sharing lattice passes within each a' coset."""
    if order not in (1, 2, 4):
        raise ValueError("order must be 1, 2 or 4")
    chars = list(chars)
    for a in chars:
        _check_char(a, tau)
    g = tau.genus
    lam = tau.lambda_min
    out: dict[Characteristic, Moments] = {}
    by_coset: dict[tuple, list[Characteristic]] = {}
    for a in chars:
        by_coset.setdefault(a.a_prime, []).append(a)
    quads = list(itertools.combinations_with_replacement(range(g), 4))
    for a_prime, group in by_coset.items():
        nrad, bound0 = _radius_for(a_prime, lam, 0.0, eps, 0)
        for w in range(1, order + 1):
            nw, _ = _radius_for(a_prime, lam, 0.0, eps, w)
            nrad = max(nrad, nw)
        bound0 = _box_tail(lam, 0.0, a_prime, nrad, 0)
        two_m = _lattice_two_m(a_prime, nrad)
        m = two_m.astype(np.float64) / 2.0
        base = _exp_terms(two_m, tau.tau, None)
        w2 = {}
        w4 = {}
        if order >= 2:
            for j in range(g):
                for l in range(j, g):
                    w2[(j, l)] = m[:, j] * m[:, l]
        if order >= 4:
            for key in quads:
                j, l, mm, p = key
                w4[key] = m[:, j] * m[:, l] * m[:, mm] * m[:, p]
        for a in group:
            t = base * _phase_factors(two_m, a.a_double_prime)
            value = _csum(t)
            t1 = np.array([_csum(m[:, j] * t) for j in range(g)])
            t2 = np.zeros((g, g), dtype=complex)
            t4 = {}
            if order >= 2:
                for (j, l), w in w2.items():
                    t2[j, l] = t2[l, j] = _csum(w * t)
            if order >= 4:
                for key, w in w4.items():
                    t4[key] = _csum(w * t)
            out[a] = Moments(value, t1, t2, t4, bound0, nrad)
    return out


# ----------------------------------------------------------------------
# quadratic and quartic form containers
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetricForm:
    """Coefficients of a quadratic form sum_{j,l} c_jl u_j u_l (c symmetric)."""

    genus: int
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (self.genus, self.genus):
            raise ValueError("coefficient matrix has wrong shape")
        c = (np.triu(c) + np.triu(c, 1).T)  # exact symmetry, shared storage
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __getitem__(self, jl):
        return self.coefficients[jl]

    def __add__(self, other):
        return SymmetricForm(self.genus, self.coefficients + other.coefficients)

    def __sub__(self, other):
        return SymmetricForm(self.genus, self.coefficients - other.coefficients)

    def __mul__(self, s):
        return SymmetricForm(self.genus, self.coefficients * s)

    __rmul__ = __mul__

    def value_at(self, u) -> complex:
        u = np.asarray(u, dtype=complex)
        return complex(u @ self.coefficients @ u)

    def det(self) -> complex:
        return complex(np.linalg.det(self.coefficients))


class QuarticForm:
    """A quartic form in u, stored by monomial.

    Keys are sorted index 4-tuples; the stored number is the full
    monomial coefficient, i.e. the sum over all index orderings of the
    defining 4-index array, so evaluation is a plain sum over keys.
    """

    __slots__ = ("genus", "coeffs")

    def __init__(self, genus: int, coeffs: dict | None = None):
        self.genus = genus
        self.coeffs = dict(coeffs or {})

    @staticmethod
    def keys_for_genus(genus: int):
        return list(itertools.combinations_with_replacement(range(genus), 4))

    @staticmethod
    def from_quadratic_product(phi: SymmetricForm, eta: SymmetricForm) -> "QuarticForm":
        """The quartic form phi(u) * eta(u)."""
        g = phi.genus
        if eta.genus != g:
            raise ValueError("genus mismatch")
        out: dict = {}
        p, q = phi.coefficients, eta.coefficients
        for j in range(g):
            for l in range(g):
                pjl = p[j, l]
                for mm in range(g):
                    for pp in range(g):
                        key = tuple(sorted((j, l, mm, pp)))
                        out[key] = out.get(key, 0.0) + pjl * q[mm, pp]
        return QuarticForm(g, out)

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return QuarticForm(self.genus, out)

    def __sub__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) - v
        return QuarticForm(self.genus, out)

    def __mul__(self, s):
        return QuarticForm(self.genus, {k: v * s for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def coefficient(self, j, l, m, p) -> complex:
        return self.coeffs.get(tuple(sorted((j, l, m, p))), 0.0)

    def value_at(self, u) -> complex:
        u = np.asarray(u, dtype=complex)
        total = 0.0 + 0.0j
        for (j, l, m, p), c in self.coeffs.items():
            total += c * u[j] * u[l] * u[m] * u[p]
        return complex(total)

    def max_abs(self) -> float:
        return max((abs(v) for v in self.coeffs.values()), default=0.0)


# ----------------------------------------------------------------------
# derived quantities
# ----------------------------------------------------------------------

def delta_theta(
    a: Characteristic,
    tau: SiegelPoint,
    idx: DerivationIndex,
    eps: float = DEFAULT_EPS,
) -> complex:
    """delta_jl theta_a(0, tau), computed termwise via the heat equation."""
    if not a.is_even:
        raise ValueError("delta_theta expects an even characteristic (thetanull context)")
    if idx.l > a.genus:
        raise ValueError("derivation index out of range for this genus")
    mom = theta_moments(a, tau, eps, order=2)
    return complex(mom.t2[idx.j - 1, idx.l - 1])


def _psi_from_moments(mom: Moments) -> SymmetricForm:
    if abs(mom.value) <= 1e3 * mom.tail_bound:
        raise NearZeroThetanull(
            f"|theta| = {abs(mom.value):.3g} is within 10^3 of the certified "
            f"tail bound {mom.tail_bound:.3g}"
        )
    return SymmetricForm(mom.t2.shape[0], mom.t2 / mom.value)


def psi_matrix(a: Characteristic, tau: SiegelPoint, eps: float = DEFAULT_EPS) -> SymmetricForm:
    """The symmetric matrix psi_a with entries delta_jl theta_a / theta_a."""
    if not a.is_even:
        raise ValueError("psi_matrix is defined for even characteristics")
    return _psi_from_moments(theta_moments(a, tau, eps, order=2))


def odd_z_gradient(a: Characteristic, tau: SiegelPoint, eps: float = DEFAULT_EPS) -> np.ndarray:
    """(1 / 2 pi i) dtheta_a/dz at z = 0, for odd a."""
    if a.is_even:
        raise ValueError("odd_z_gradient requires an odd characteristic")
    mom = theta_moments(a, tau, eps, order=1)
    return mom.t1  # per-term factor m_j already equals the normalized gradient


def _delta_psi_from_moments(mom: Moments) -> QuarticForm:
    g = mom.t2.shape[0]
    psi = mom.t2 / mom.value
    out: dict = {}
    for j in range(g):
        for l in range(g):
            for mm in range(g):
                for pp in range(g):
                    skey = tuple(sorted((j, l, mm, pp)))
                    val = mom.t4[skey] / mom.value - psi[j, l] * psi[mm, pp]
                    out[skey] = out.get(skey, 0.0) + val
    return QuarticForm(g, out)


def quartic_delta_psi(a: Characteristic, tau: SiegelPoint, eps: float = DEFAULT_EPS) -> QuarticForm:
    """The quartic form delta(psi_a) with entries delta_jl psi_{a,mp}.

    Computed from fourth-order z-derivative data and the quotient rule;
    tau finite differences are used only as a test oracle elsewhere.
    """
    if not a.is_even:
        raise ValueError("quartic_delta_psi is defined for even characteristics")
    mom = theta_moments(a, tau, eps, order=4)
    if abs(mom.value) <= 1e3 * mom.tail_bound:
        raise NearZeroThetanull("thetanull too close to zero")
    return _delta_psi_from_moments(mom)

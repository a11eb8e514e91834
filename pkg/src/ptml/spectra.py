"""Closed-form partial-transpose spectra and high-precision moments.

For locally depolarized GHZ states on a balanced cut and globally
depolarized stabilizer states the PT spectrum is known in closed form, with
exact integer multiplicities.  This module evaluates those spectra at
arbitrary decimal precision (mpmath) so that moment power sums stay
meaningful at large n, where binomial multiplicities around 10^88 multiply
eigenvalue powers around 10^-100 and float64 would return noise.

Conventions: multiplicities are exact Python ints; eigenvalues are mpmath
mpf values computed at a requested number of significant decimal digits.
Zero-multiplicity entries are dropped at construction (the closed-form
GHZ formulas produce mu = 0 entries for n = 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp, mpf, workdps


DEFAULT_DIGITS = 60


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with exact multiplicities: entries (lambda, mu)."""

    entries: tuple
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        assert all(mu >= 0 for _, mu in self.entries)
        object.__setattr__(
            self, "entries",
            tuple((lam, mu) for lam, mu in self.entries if mu > 0))

    @property
    def total_multiplicity(self) -> int:
        return sum(mu for _, mu in self.entries)

    def min_eigenvalue(self):
        return min(lam for lam, _ in self.entries)

    def trace(self):
        terms = sorted((lam * mu for lam, mu in self.entries), key=abs)
        total = mpf(0)
        for t in terms:
            total += t
        return total


@dataclass(frozen=True)
class MomentVector:
    """PT moments p_1..p_m, optionally with Schatten variants ptilde_k.

    digits records the working precision (None means float64 arithmetic).
    """

    values: tuple
    schatten: tuple = None
    digits: int = None

    def __len__(self):
        return len(self.values)

    def p(self, k: int):
        assert 1 <= k <= len(self.values)
        return self.values[k - 1]

    def ptilde(self, k: int):
        assert self.schatten is not None and 1 <= k <= len(self.schatten)
        return self.schatten[k - 1]


def ghz_local_spectrum(n: int, eps, digits: int = DEFAULT_DIGITS) -> Spectrum:
    """PT spectrum of the locally depolarized n-qubit GHZ state, balanced cut.

    Eigenvalues: for j = 0..n,
        lambda_j = ((1-e/2)^(n-j) (e/2)^j + (1-e/2)^j (e/2)^(n-j)) / 2
    with multiplicity C(n,j) - 2*delta_{j,n/2}, plus the isolated pair
        lambda_pm = ((1-e/2)(e/2))^(n/2) +- (1-e)^n / 2
    with multiplicity 1 each.  Valid for even n only.
    """
    if n % 2 or n < 2:
        raise ValueError("closed-form GHZ spectrum requires even n >= 2")
    if not 0 <= float(eps) <= 1:
        raise ValueError("eps must lie in [0, 1]")
    with workdps(digits):
        e = mpf(eps)
        u = 1 - e / 2
        v = e / 2
        entries = []
        for j in range(n + 1):
            lam = (u ** (n - j) * v ** j + u ** j * v ** (n - j)) / 2
            mu = math.comb(n, j) - (2 if j == n // 2 else 0)
            entries.append((lam, mu))
        cross = (u * v) ** (n // 2)
        gap = (1 - e) ** n / 2
        entries.append((cross + gap, 1))
        entries.append((cross - gap, 1))
    return Spectrum(tuple(entries), digits=digits)


def stab_global_spectrum(n: int, r: int, eps,
                         digits: int = DEFAULT_DIGITS) -> Spectrum:
    """PT spectrum of a globally depolarized pure stabilizer state.

    A state with r Bell pairs across the cut has PT eigenvalues
    lambda_pm = eps/2^n +- (1-eps)/2^r with multiplicities 2^(r-1)(2^r +- 1)
    and lambda_0 = eps/2^n with multiplicity 2^n - 2^(2r).
    """
    if not 0 <= r <= n:
        raise ValueError("need 0 <= r <= n")
    if not 0 <= float(eps) <= 1:
        raise ValueError("eps must lie in [0, 1]")
    with workdps(digits):
        e = mpf(eps)
        base = e / 2 ** n
        gap = (1 - e) / 2 ** r
        mu_plus = 2 ** (r - 1) * (2 ** r + 1) if r else 1
        mu_minus = 2 ** (r - 1) * (2 ** r - 1) if r else 0
        entries = (
            (base + gap, mu_plus),
            (base - gap, mu_minus),
            (base, 2 ** n - 2 ** (2 * r)),
        )
    return Spectrum(entries, digits=digits)


def moments_from_spectrum(s: Spectrum, m_max: int) -> MomentVector:
    """Power sums p_k = sum_j mu_j lambda_j^k for k = 1..m_max.

    Terms are accumulated from smallest to largest magnitude.  Each sum is
    evaluated at the spectrum's precision and again at twice that precision;
    if they disagree beyond 10^-(digits/2) relative, the arithmetic
    precision doubles until they agree (the entries themselves are exact
    binary values, so this bounds pure summation round-off).
    """
    assert m_max >= 1
    digits = s.digits
    while True:
        p_lo, pt_lo = _power_sums(s, m_max, digits)
        p_hi, pt_hi = _power_sums(s, m_max, 2 * digits)
        tol = mpf(10) ** (-(digits // 2))
        ok = all(_close(a, b, tol) for a, b in zip(p_lo, p_hi))
        ok = ok and all(_close(a, b, tol) for a, b in zip(pt_lo, pt_hi))
        if ok or digits >= 16 * s.digits:
            return MomentVector(tuple(p_hi), tuple(pt_hi), digits=digits)
        digits *= 2


def _power_sums(s: Spectrum, m_max: int, digits: int):
    with workdps(digits):
        p = []
        pt = []
        for k in range(1, m_max + 1):
            terms = sorted((mu * lam ** k for lam, mu in s.entries), key=abs)
            total = mpf(0)
            for t in terms:
                total += t
            p.append(+total)
            terms = sorted((mu * abs(lam) ** k for lam, mu in s.entries))
            total = mpf(0)
            for t in terms:
                total += t
            pt.append(+total)
    return p, pt


def _close(a, b, tol):
    scale = max(abs(a), abs(b), mpf(1))
    return abs(a - b) <= tol * scale


def distinct_count(s: Spectrum, tol=1e-12) -> int:
    """Number of distinct eigenvalues after merging within absolute tol."""
    assert tol >= 0
    lams = sorted(lam for lam, _ in s.entries)
    count = 0
    prev = None
    for lam in lams:
        if prev is None or lam - prev > tol:
            count += 1
        prev = lam
    return count


def merge_spectrum(s: Spectrum, tol=1e-12) -> Spectrum:
    """Merge eigenvalues within tol, summing multiplicities.

    Clusters are chained exactly as in distinct_count: a new cluster starts
    whenever the gap to the previous eigenvalue exceeds tol.
    """
    lams = sorted(s.entries, key=lambda t: t[0])
    merged = []
    prev = None
    for lam, mu in lams:
        if prev is not None and lam - prev <= tol:
            merged[-1][1] += mu
        else:
            merged.append([lam, mu])
        prev = lam
    return Spectrum(tuple((lam, mu) for lam, mu in merged), digits=s.digits)


def ppt_threshold_ghz(n: int) -> float:
    """Closed-form PPT noise threshold for the locally depolarized GHZ state.

    eps_max = 1 - (2^(2 - 2/n) + 1)^(-1/2); approaches 1 - 1/sqrt(5) as
    n grows.
    """
    if n % 2 or n < 2:
        raise ValueError("requires even n >= 2")
    return 1.0 - (2.0 ** (2.0 - 2.0 / n) + 1.0) ** -0.5

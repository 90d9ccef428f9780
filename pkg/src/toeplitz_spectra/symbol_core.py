"""Symbols on the torus: Fourier data, root splits and spectral factorization.

A symbol is a real-valued function on the unit circle given by finitely many
Fourier coefficients (optionally backed by a sample function that was used to
produce them).  This module turns a symbol into its root data on the z-plane
and from there into the multiplicative split

    f(chi) = C * g1(chi) * g2(chi),    chi = e^{i theta},

where g1 is a product of factors (1 - w chi) with |w| < 1 (so g1 and 1/g1 are
analytic in the disk) and g2 the mirrored product in chibar.  Partial-fraction
data for 1/g1 and 1/g2 is computed here as well, since every downstream
computation consumes it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    AliasingRisk,
    DegeneratePoles,
    RootFindFailure,
    UnbalancedWinding,
    UnitModulusRoot,
)

UNIT_CIRCLE_TOL = 1e-8
CLUSTER_TOL = 1e-6
RECON_TOL = 1e-9
PF_TOL = 1e-10


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrigSymbol:
    """Real symbol theta -> sum_{|j| <= d} coeffs[j] e^{i j theta}.

    ``coeffs`` stores hat(f)(-d..d) in ascending index order, so
    ``coeffs[d + j]`` is the j-th Fourier coefficient.  Construction enforces
    Hermitian symmetry (real symbol); ``parity`` marks even symbols, whose
    coefficients are real and symmetric.
    """

    coeffs: np.ndarray
    parity: bool = False
    sample_fn: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, compare=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coefficient array must be 1-D of odd length")
        d = c.size // 2
        herm = 0.5 * (c + np.conj(c[::-1]))
        if np.max(np.abs(c - herm)) > 1e-8 * max(1.0, np.max(np.abs(c))):
            raise ValueError("coefficients are not Hermitian-symmetric")
        # trim zero outer coefficients so degree is the true degree
        while d > 0 and abs(herm[0]) == 0 and abs(herm[-1]) == 0:
            herm = herm[1:-1]
            d -= 1
        even = bool(
            np.max(np.abs(herm.imag)) <= 1e-12 * max(1.0, np.max(np.abs(herm)))
            and np.max(np.abs(herm - herm[::-1]))
            <= 1e-12 * max(1.0, np.max(np.abs(herm))))
        herm = np.array(herm)
        herm.setflags(write=False)
        object.__setattr__(self, "coeffs", herm)
        object.__setattr__(self, "parity", even)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_cosine(cls, cosine: Sequence[float],
                    sample_fn=None) -> "TrigSymbol":
        """Even symbol sum_j cosine[j] * cos(j theta)."""
        cosine = np.asarray(cosine, dtype=float)
        d = cosine.size - 1
        c = np.zeros(2 * d + 1, dtype=complex)
        c[d] = cosine[0]
        for j in range(1, d + 1):
            c[d + j] = cosine[j] / 2.0
            c[d - j] = cosine[j] / 2.0
        return cls(c, sample_fn=sample_fn)

    @classmethod
    def constant(cls, value: float) -> "TrigSymbol":
        return cls(np.array([value], dtype=complex))

    # -- basic queries -------------------------------------------------------

    @property
    def degree(self) -> int:
        return self.coeffs.size // 2

    def coeff(self, j: int) -> complex:
        """hat(f)(j), zero beyond the stored degree."""
        d = self.degree
        if abs(j) > d:
            return 0j
        return complex(self.coeffs[d + j])

    def padded(self, upto: int) -> np.ndarray:
        """Coefficients -upto..upto, zero padded."""
        d = self.degree
        if upto < d:
            raise ValueError("padded() cannot truncate")
        out = np.zeros(2 * upto + 1, dtype=complex)
        out[upto - d: upto + d + 1] = self.coeffs
        return out

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        d = self.degree
        js = np.arange(-d, d + 1)
        vals = np.exp(1j * np.multiply.outer(theta, js)) @ self.coeffs
        return np.real(vals)

    def derivative(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        d = self.degree
        js = np.arange(-d, d + 1)
        vals = np.exp(1j * np.multiply.outer(theta, js)) @ (1j * js * self.coeffs)
        return np.real(vals)

    def cosine_coeffs(self) -> np.ndarray:
        """Coefficients c_j with f = sum c_j cos(j theta); requires parity."""
        if not self.parity:
            raise ValueError("cosine_coeffs() needs an even symbol")
        d = self.degree
        out = np.empty(d + 1)
        out[0] = self.coeffs[d].real
        out[1:] = 2.0 * self.coeffs[d + 1:].real
        return out

    def range_on_grid(self, n: int = 4096) -> tuple[float, float]:
        vals = self(np.linspace(0.0, 2.0 * np.pi, n, endpoint=False))
        return float(vals.min()), float(vals.max())

    def __add__(self, other: "TrigSymbol") -> "TrigSymbol":
        d = max(self.degree, other.degree)
        return TrigSymbol(self.padded(d) + other.padded(d))

    def scaled(self, c: float) -> "TrigSymbol":
        return TrigSymbol(c * self.coeffs)


def fourier_coeffs(f: Callable[[np.ndarray], np.ndarray], d: int,
                   grid_size: int) -> np.ndarray:
    """Trapezoidal Fourier coefficients hat(f)(-d..d) of a circle function.

    Parameters
    ----------
    f : callable
        Real-valued on theta in [0, 2pi).
    d : int
        Highest coefficient order wanted.
    grid_size : int
        Number of equispaced samples; must be a power of two and at least
        ``8 * d`` (raises AliasingRisk otherwise).

    Returns
    -------
    ndarray of length 2d + 1 with Hermitian symmetry enforced by averaging
    hat(j) against conj(hat(-j)).
    """
    if grid_size < max(8 * d, 2) or grid_size & (grid_size - 1) != 0:
        raise AliasingRisk(
            f"grid_size={grid_size} too small or not a power of two for d={d}")
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    vals = np.asarray(f(theta), dtype=complex)
    spec = np.fft.fft(vals) / grid_size
    out = np.empty(2 * d + 1, dtype=complex)
    for j in range(-d, d + 1):
        out[d + j] = spec[j % grid_size]
    out = 0.5 * (out + np.conj(out[::-1]))
    return out


# ---------------------------------------------------------------------------
# symbol literals (CLI / config format)
# ---------------------------------------------------------------------------

def symbol_from_spec(spec: dict) -> TrigSymbol:
    """Build a TrigSymbol from its JSON-object literal form.

    Two forms are accepted::

        {"coeffs": [[re, im], ...], "offset": -d}
        {"cosine": [c0, c1, ...]}
    """
    if not isinstance(spec, dict):
        raise ValueError("symbol literal must be a JSON object")
    if "cosine" in spec:
        vals = spec["cosine"]
        if not isinstance(vals, list) or not vals:
            raise ValueError('"cosine" must be a non-empty list of numbers')
        return TrigSymbol.from_cosine([float(v) for v in vals])
    if "coeffs" in spec:
        pairs = spec["coeffs"]
        offset = int(spec.get("offset", -(len(pairs) - 1) // 2))
        if len(pairs) % 2 != 1 or offset != -(len(pairs) // 2):
            raise ValueError('"coeffs" must have odd length with offset -d')
        c = np.array([complex(p[0], p[1]) for p in pairs])
        return TrigSymbol(c)
    raise ValueError('symbol literal needs a "cosine" or "coeffs" key')


# ---------------------------------------------------------------------------
# Laurent polynomial and roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentPoly:
    """K(z) = sum_n hat(f)(n) z^{n + n0}, an ordinary polynomial of degree 2 n0."""

    coeffs: np.ndarray        # ascending, length 2 n0 + 1
    n0: int

    @classmethod
    def from_symbol(cls, sym: TrigSymbol) -> "LaurentPoly":
        c = np.array(sym.coeffs, dtype=complex)
        return cls(c, sym.degree)

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)


@dataclass(frozen=True)
class RootSet:
    """Roots of K split by position relative to the unit circle."""

    inside: tuple            # ((root, multiplicity), ...)
    outside: tuple

    @property
    def n_inside(self) -> int:
        return sum(m for _, m in self.inside)

    @property
    def n_outside(self) -> int:
        return sum(m for _, m in self.outside)

    @property
    def balanced(self) -> bool:
        return self.n_inside == self.n_outside

    @property
    def rho(self) -> float:
        """Largest inside-root modulus."""
        return max((abs(r) for r, _ in self.inside), default=0.0)


def _poly_derivative(c: np.ndarray) -> np.ndarray:
    n = c.size - 1
    return c[1:] * np.arange(1, n + 1)


def aberth_roots(coeffs: Sequence[complex], *, seed: int = 0,
                 max_iter: int = 160, tol: float = 1e-13) -> np.ndarray:
    """All complex roots of a polynomial by simultaneous (Aberth) iteration.

    ``coeffs`` are ascending.  Deterministic for a fixed seed: the starting
    circle gets a tiny seeded jitter so symmetric configurations cannot lock
    the iteration.
    """
    c = np.asarray(coeffs, dtype=complex)
    while c.size > 1 and c[-1] == 0:
        c = c[:-1]
    n = c.size - 1
    if n < 1:
        return np.empty(0, dtype=complex)
    # strip exact zero roots
    nzero = 0
    while c[0] == 0:
        c = c[1:]
        nzero += 1
    n_eff = c.size - 1
    if n_eff == 0:
        return np.zeros(nzero, dtype=complex)
    dc = _poly_derivative(c)
    rng = np.random.default_rng(seed)
    radius = max(abs(c[0] / c[-1]) ** (1.0 / n_eff), 1e-3)
    angles = 2.0 * np.pi * (np.arange(n_eff) + 0.5) / n_eff + 0.35
    z = radius * np.exp(1j * angles) * (1.0 + 1e-3 * rng.standard_normal(n_eff))
    ok = False
    for _ in range(max_iter):
        p = np.polynomial.polynomial.polyval(z, c)
        dp = np.polynomial.polynomial.polyval(z, dc)
        dp = np.where(dp == 0, 1e-300, dp)
        w = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = np.sum(1.0 / diff, axis=1) - 1.0 / 1.0  # remove the diagonal 1/1 term
        denom = 1.0 - w * s
        denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        delta = w / denom
        z = z - delta
        if not np.all(np.isfinite(z)):
            raise RootFindFailure("iteration produced non-finite root estimates")
        if np.max(np.abs(delta)) <= tol * max(1.0, np.max(np.abs(z))):
            ok = True
            break
    if not ok:
        # multiple roots stall around sqrt(eps); clustering + polish below
        # recovers them, so only a gross residual is fatal here
        p = np.polynomial.polynomial.polyval(z, c)
        scale = np.sum(np.abs(c)) * np.maximum(1.0, np.abs(z)) ** n_eff
        if np.max(np.abs(p) / scale) > 1e-6:
            raise RootFindFailure("simultaneous iteration did not converge")
    if nzero:
        z = np.concatenate([np.zeros(nzero, dtype=complex), z])
    return z


def _cluster(roots: np.ndarray, cluster_tol: float):
    """Greedy linkage of root estimates within cluster_tol."""
    remaining = list(roots)
    clusters = []
    while remaining:
        group = [remaining.pop(0)]
        changed = True
        while changed:
            changed = False
            for r in remaining[:]:
                if any(abs(r - g) <= cluster_tol for g in group):
                    group.append(r)
                    remaining.remove(r)
                    changed = True
        clusters.append(group)
    return [(sum(g) / len(g), len(g)) for g in clusters]


def _newton_polish(c: np.ndarray, z0: complex, multiplicity: int) -> complex:
    """Polish an m-fold root of c by Newton on the (m-1)-th derivative."""
    p = np.array(c, dtype=complex)
    for _ in range(multiplicity - 1):
        p = _poly_derivative(p)
    dp = _poly_derivative(p)
    z = z0
    for _ in range(60):
        pv = np.polynomial.polynomial.polyval(z, p)
        dv = np.polynomial.polynomial.polyval(z, dp)
        if dv == 0:
            break
        step = pv / dv
        z_new = z - step
        if not cmath.isfinite(z_new.real) or not cmath.isfinite(z_new.imag):
            return z0
        if abs(z_new - z0) > 10 * max(1.0, abs(z0)):
            return z0
        z = z_new
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def laurent_roots(K: LaurentPoly, unit_circle_tol: float = UNIT_CIRCLE_TOL,
                  cluster_tol: float = CLUSTER_TOL, *, seed: int = 0) -> RootSet:
    """Root set of K with multiplicities and inside/outside classification.

    Simultaneous iteration feeds a geometric clustering pass that recovers
    multiplicities; each cluster is then re-polished by Newton on the
    derivative of matching order.  Roots whose modulus is within
    ``unit_circle_tol`` of 1 abort the construction.
    """
    if K.coeffs.size - 1 < 1:
        raise ValueError("laurent_roots needs degree >= 1")
    raw = aberth_roots(K.coeffs, seed=seed)
    clusters = _cluster(raw, cluster_tol)
    polished = [(_newton_polish(K.coeffs, z, m), m) for z, m in clusters]
    # polishing can occasionally merge neighbouring clusters; re-merge
    merged = _cluster(
        np.array([z for z, m in polished for _ in range(m)]), cluster_tol)
    scale = float(np.sum(np.abs(K.coeffs)))
    inside, outside = [], []
    for z, m in merged:
        if abs(abs(z) - 1.0) < unit_circle_tol:
            raise UnitModulusRoot(
                f"root {z} has modulus within {unit_circle_tol} of 1")
        resid = abs(K(z)) / (scale * max(1.0, abs(z)) ** (K.coeffs.size - 1))
        if resid > 1e-7:
            raise RootFindFailure(f"residual {resid:.2e} too large at root {z}")
        (inside if abs(z) < 1.0 else outside).append((complex(z), int(m)))
    inside.sort(key=lambda rm: (abs(rm[0]), rm[0].real, rm[0].imag))
    outside.sort(key=lambda rm: (abs(rm[0]), rm[0].real, rm[0].imag))
    return RootSet(tuple(inside), tuple(outside))


# ---------------------------------------------------------------------------
# partial fractions with repeated poles
# ---------------------------------------------------------------------------

def partial_fractions(poles: Sequence[tuple[complex, int]],
                      pf_tol: float = PF_TOL, *, verify: bool = True):
    """Expand 1 / prod_j (1 - w_j z)^{m_j} into sum_{j,h} c_{j,h}/(1 - w_j z)^h.

    Coefficients come from derivative (residue) formulas at each pole order.
    The expansion is verified at 16 deterministic points on |z| = 0.99 unless
    ``verify`` is disabled.

    Returns a list of (pole, order, coefficient) triples.
    """
    poles = [(complex(w), int(m)) for w, m in poles]
    for w, m in poles:
        if w == 0:
            raise DegeneratePoles("zero pole in partial fractions")
        if m < 1:
            raise ValueError("pole order must be positive")
    for a in range(len(poles)):
        for b in range(a + 1, len(poles)):
            if abs(poles[a][0] - poles[b][0]) <= 1e-12 * max(
                    1.0, abs(poles[a][0])):
                raise DegeneratePoles(
                    f"coincident poles {poles[a][0]} and {poles[b][0]}")
    out = []
    for j, (wj, mj) in enumerate(poles):
        z0 = 1.0 / wj
        others = [(wn, mn) for n, (wn, mn) in enumerate(poles) if n != j]
        g0 = 1.0 + 0j
        for wn, mn in others:
            g0 *= (1.0 - wn * z0) ** (-mn)
        # Taylor data of G_j around z0 via the log-derivative recurrence
        G = [g0]
        L = []
        for k in range(mj - 1):
            lk = sum(mn * math.factorial(k) * wn ** (k + 1)
                     / (1.0 - wn * z0) ** (k + 1) for wn, mn in others)
            L.append(lk)
        for t in range(1, mj):
            G.append(sum(math.comb(t - 1, k) * L[k] * G[t - 1 - k]
                         for k in range(t)))
        for h in range(1, mj + 1):
            t = mj - h
            d_t = (-1.0 / wj) ** t * G[t] / math.factorial(t)
            out.append((wj, h, complex(d_t)))
    if verify and poles:
        rng = np.random.default_rng(1234)
        z = 0.99 * np.exp(2j * np.pi * rng.random(16))
        lhs = np.ones_like(z)
        for w, m in poles:
            lhs = lhs / (1.0 - w * z) ** m
        rhs = np.zeros_like(z)
        for w, h, c in out:
            rhs = rhs + c / (1.0 - w * z) ** h
        resid = np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(lhs)))
        if resid > pf_tol:
            raise DegeneratePoles(
                f"partial-fraction residual {resid:.2e} exceeds {pf_tol}")
    return out


# ---------------------------------------------------------------------------
# spectral factorization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralFactorization:
    """Multiplicative split f = C * g1 * g2 of a circle-root-free real symbol.

    g1(chi) = phase * prod_j (1 - w_j chi)^{s_j} with w_j = conj(inside root),
    g2(chi) = prod_i (1 - a_i chibar)^{s_i} over the inside roots a_i, and
    C > 0 real.  ``pf_g1_inv``/``pf_g2_inv`` hold (pole, order, coefficient)
    triples for 1/g1 and 1/g2.
    """

    scale: float
    phase: complex
    g1_factors: tuple          # ((w_j, s_j), ...), |w_j| < 1
    g2_factors: tuple          # ((a_i, s_i), ...), |a_i| < 1
    pf_g1_inv: tuple
    pf_g2_inv: tuple
    roots: RootSet
    symbol: TrigSymbol = field(compare=False)

    @property
    def n0(self) -> int:
        return sum(s for _, s in self.g2_factors)

    @property
    def rho(self) -> float:
        return max((abs(a) for a, _ in self.g2_factors), default=0.0)

    def eval_g1(self, theta) -> np.ndarray:
        chi = np.exp(1j * np.asarray(theta, dtype=float))
        out = np.full_like(chi, self.phase)
        for w, s in self.g1_factors:
            out = out * (1.0 - w * chi) ** s
        return out

    def eval_g2(self, theta) -> np.ndarray:
        chi = np.exp(-1j * np.asarray(theta, dtype=float))
        out = np.ones_like(chi)
        for a, s in self.g2_factors:
            out = out * (1.0 - a * chi) ** s
        return out

    def reconstruct(self, theta) -> np.ndarray:
        return self.scale * self.eval_g1(theta) * self.eval_g2(theta)


def wiener_hopf_factor(sym: TrigSymbol, *, seed: int = 0,
                       recon_tol: float = RECON_TOL) -> SpectralFactorization:
    """Split a circle-root-free real symbol into C * g1 * g2.

    The inside roots (with multiplicities) of the symbol's Laurent lift
    define both factors; the scale is normalized real positive, with any
    leftover unimodular phase absorbed into g1.  Reconstruction against the
    symbol on a 1024-point grid must hold to ``recon_tol`` * sup|f|.
    """
    if sym.degree == 0:
        c = sym.coeff(0)
        if c == 0:
            raise ValueError("zero symbol cannot be factorized")
        phase = c / abs(c)
        return SpectralFactorization(
            scale=abs(c), phase=complex(phase), g1_factors=(), g2_factors=(),
            pf_g1_inv=(), pf_g2_inv=(), roots=RootSet((), ()), symbol=sym)
    K = LaurentPoly.from_symbol(sym)
    roots = laurent_roots(K, seed=seed)
    if not roots.balanced or roots.n_inside != sym.degree:
        raise UnbalancedWinding(
            f"{roots.n_inside} roots inside vs {roots.n_outside} outside "
            f"for degree {sym.degree}")
    g1_factors = tuple((np.conj(a), s) for a, s in roots.inside)
    g2_factors = tuple(roots.inside)
    theta = np.linspace(0.0, 2.0 * np.pi, 1024, endpoint=False)
    chi = np.exp(1j * theta)
    prod = np.ones_like(chi)
    for w, s in g1_factors:
        prod = prod * (1.0 - w * chi) ** s
    for a, s in g2_factors:
        prod = prod * (1.0 - a * np.conj(chi)) ** s
    fvals = sym(theta)
    ratio = fvals / prod
    c_raw = complex(ratio[int(np.argmax(np.abs(prod)))])
    sup = float(np.max(np.abs(fvals)))
    if np.max(np.abs(ratio - c_raw)) > recon_tol * max(sup, 1e-30):
        raise UnbalancedWinding(
            "factor product does not reconstruct the symbol; "
            "root data is inconsistent")
    phase = c_raw / abs(c_raw)
    scale = abs(c_raw)
    pf_g1 = tuple((w, h, c / phase)
                  for w, h, c in partial_fractions(g1_factors))
    pf_g2 = tuple(partial_fractions(g2_factors))
    return SpectralFactorization(
        scale=float(scale), phase=complex(phase), g1_factors=g1_factors,
        g2_factors=g2_factors, pf_g1_inv=pf_g1, pf_g2_inv=pf_g2,
        roots=roots, symbol=sym)


# ---------------------------------------------------------------------------
# cepstral analytic factor (shared by the regular-symbol machinery)
# ---------------------------------------------------------------------------

def cepstral_factor(f: Callable[[np.ndarray], np.ndarray], degree: int,
                    grid_size: int = 2048) -> np.ndarray:
    """Analytic-factor coefficients of a strictly positive circle function.

    Returns p_0..p_degree with P(chi) = sum p_u chi^u approximating the outer
    function g = exp(c_0/2 + sum_{u>0} c_u chi^u), c = log f, so that
    |P|^2 ~ f.  Pure coefficient computation; callers enforce their own
    accuracy targets.
    """
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    vals = np.asarray(f(theta), dtype=float)
    if np.min(vals) <= 0:
        raise ValueError("cepstral factor needs a strictly positive function")
    chat = np.fft.fft(np.log(vals)) / grid_size
    half = grid_size // 2
    analytic = np.zeros(grid_size, dtype=complex)
    analytic[0] = chat[0] / 2.0
    analytic[1:half] = chat[1:half]
    g_on_grid = np.exp(np.fft.ifft(analytic * grid_size))
    p = np.fft.fft(g_on_grid) / grid_size
    return np.asarray(p[: degree + 1])

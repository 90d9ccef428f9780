"""Spectra of Toeplitz sections: dense eigensolver, grid-form localization of
eigenvalues of even symbols, and the characteristic-determinant pipeline that
reproduces the spectrum from the circle partners of the symbol antecedents.

For an even cosine polynomial f and real lambda, writing x = cos(theta),
f - lambda factors over its antecedent roots x_j through the partners
omega_j (|omega_j| <= 1) with omega + 1/omega = 2 x_j.  The composed Hankel
matrix on the simple-pole basis has the closed form

    M[i, j] = A_i w_i^{N+2} sum_h A_h w_h^{N+2} Q_j(w_h) Q_h(w_i),

with A the simple partial-fraction weights and Q_m the products skipping one
factor.  lambda belongs to the spectrum of the order-N section exactly when
det(I - M(lambda)) = 0, which is located here by phase-normalized sign scans.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.optimize

from .errors import (
    EigenFailure,
    ExcludedLambda,
    LocalizationFailure,
    NonUniqueMinimum,
    NotHermitian,
)
from .predictor import PredictorPoly, levinson
from .symbol_core import TrigSymbol, aberth_roots
from .toeplitz_core import DenseMatrix, build

log = logging.getLogger("toeplitz_spectra")

CRIT_TOL = 1e-6


# ---------------------------------------------------------------------------
# dense Hermitian eigensolver (oracle)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray            # ascending
    eigenvectors: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.eigenvalues.size


def hermitian_eigen(M: DenseMatrix, want_vectors: bool = False
                    ) -> EigenDecomposition:
    """Eigenvalues (ascending, optionally vectors) of a Hermitian matrix.

    Input must be Hermitian within 1e-12 (relative); vectors, when requested,
    are residual-checked to 1e-9 * ||M||.
    """
    M = np.asarray(M, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(M))) if M.size else 0.0)
    if np.max(np.abs(M - M.conj().T)) > 1e-12 * scale:
        raise NotHermitian("matrix is not Hermitian within 1e-12")
    try:
        if want_vectors:
            lam, V = np.linalg.eigh(M)
        else:
            lam = np.linalg.eigvalsh(M)
            V = None
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    lam = lam.real
    order = np.argsort(lam)
    lam = lam[order]
    if V is not None:
        V = V[:, order]
        resid = np.max(np.abs(M @ V - V * lam[None, :]))
        if resid > 1e-9 * scale:
            raise EigenFailure(f"eigenvector residual {resid:.2e} too large")
    return EigenDecomposition(eigenvalues=lam, eigenvectors=V)


# ---------------------------------------------------------------------------
# monotone branches and grid localization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridLocation:
    """Grid assignment theta* ~ k pi/(N+2) + theta_shift pi/N of an eigenvalue.

    The asserted localization bound |theta_shift| < 1 is validated by the
    callers, not enforced here.
    """

    k: int
    theta_shift: float
    theta_star: float = 0.0
    branch: int = 0
    eigenvalue: float = 0.0


def _refine_derivative_zero(sym: TrigSymbol, a: float, b: float) -> float:
    fa = sym.derivative(a)
    for _ in range(80):
        m = 0.5 * (a + b)
        fm = sym.derivative(m)
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def monotone_branches(sym: TrigSymbol, n_grid: int = 8193):
    """Maximal monotone pieces (a, b, f(a), f(b)) of the symbol on [0, pi]."""
    theta = np.linspace(0.0, np.pi, n_grid)
    df = sym.derivative(theta)
    cuts = [0.0]
    for i in range(n_grid - 1):
        if df[i] == 0.0 and 0 < i:
            cuts.append(theta[i])
        elif df[i] * df[i + 1] < 0:
            cuts.append(_refine_derivative_zero(sym, theta[i], theta[i + 1]))
    cuts.append(np.pi)
    cuts = sorted(set(cuts))
    merged = [cuts[0]]
    for c in cuts[1:]:
        if c - merged[-1] > 1e-9:
            merged.append(c)
    out = []
    for a, b in zip(merged[:-1], merged[1:]):
        out.append((a, b, float(sym(a)), float(sym(b))))
    return out


def _bisect_on_branch(sym: TrigSymbol, a: float, b: float, fa: float,
                      fb: float, lam: float) -> float:
    inc = fb >= fa
    for _ in range(90):
        m = 0.5 * (a + b)
        fm = float(sym(m))
        if (fm < lam) == inc:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def grid_localize(sym: TrigSymbol, N: int, eig: EigenDecomposition
                  ) -> list[GridLocation]:
    """Assign each eigenvalue a grid point k pi/(N+2) through an antecedent.

    For every eigenvalue the antecedents on all monotone branches are
    bisected and the assignment eigenvalue -> (branch, k) minimizing the
    total grid distance is chosen, injectively per branch.  Raises
    LocalizationFailure when some eigenvalue has no antecedent slot.
    """
    lams = eig.eigenvalues
    if sym.degree == 0:
        # every eigenvalue equals the constant; grid position is conventional
        return [GridLocation(k=min(j, N + 1), theta_shift=0.0, theta_star=0.0,
                             branch=0, eigenvalue=float(l))
                for j, l in enumerate(lams)]
    branches = monotone_branches(sym)
    fmin = min(min(fa, fb) for _, _, fa, fb in branches)
    fmax = max(max(fa, fb) for _, _, fa, fb in branches)
    span = max(fmax - fmin, 1e-300)
    grid_step = np.pi / (N + 2)
    candidates = []          # per eigenvalue: list of (cost, slot, data)
    slot_index = {}
    for j, lam in enumerate(lams):
        lam_c = float(np.clip(lam, fmin, fmax))
        if abs(lam_c - lam) > 1e-9 * span:
            raise LocalizationFailure(
                f"eigenvalue {lam} outside the symbol range "
                f"[{fmin}, {fmax}]")
        row = []
        for bi, (a, b, fa, fb) in enumerate(branches):
            lo, hi = min(fa, fb), max(fa, fb)
            if lam_c < lo - 1e-12 * span or lam_c > hi + 1e-12 * span:
                continue
            theta_star = _bisect_on_branch(
                sym, a, b, fa, fb, float(np.clip(lam_c, lo, hi)))
            k0 = int(round(theta_star / grid_step))
            for k in (k0 - 1, k0, k0 + 1):
                if 0 <= k <= N + 1:
                    dist = abs(theta_star - k * grid_step)
                    slot = (bi, k)
                    if slot not in slot_index:
                        slot_index[slot] = len(slot_index)
                    row.append((dist, slot, theta_star))
        if not row:
            raise LocalizationFailure(
                f"eigenvalue {lam} has no antecedent on any branch")
        candidates.append(row)
    n_eig, n_slot = len(lams), len(slot_index)
    BIG = 1e9
    cost = np.full((n_eig, max(n_slot, n_eig)), BIG)
    meta = {}
    for j, row in enumerate(candidates):
        for dist, slot, theta_star in row:
            si = slot_index[slot]
            c = (dist / grid_step) ** 2
            if c < cost[j, si]:
                cost[j, si] = c
                meta[(j, si)] = (slot, theta_star)
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    out = [None] * n_eig
    for j, si in zip(rows, cols):
        if cost[j, si] >= BIG:
            raise LocalizationFailure(
                f"no injective grid assignment for eigenvalue "
                f"{lams[j]} (slot exhaustion)")
        (bi, k), theta_star = meta[(j, si)]
        shift = (theta_star - k * grid_step) * N / np.pi
        out[j] = GridLocation(k=k, theta_shift=float(shift),
                              theta_star=float(theta_star), branch=bi,
                              eigenvalue=float(lams[j]))
    return out


# ---------------------------------------------------------------------------
# characteristic matrix and determinant equation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EigenCharacterization:
    """Antecedent data of f - lambda for an even cosine polynomial.

    ``antecedent_roots`` holds the partners chi_j with chi + 1/chi = 2 x_j
    and |chi_j| >= 1 (unimodular exactly when the antecedent is real in
    (-1, 1)); ``r`` counts them; ``h_lambda`` is the constant positive factor
    and ``predictor_ref`` its (constant) predictor.
    """

    lam: float
    antecedent_roots: tuple
    r: int
    h_lambda: TrigSymbol
    predictor_ref: PredictorPoly
    hankel_matrix: np.ndarray

    @property
    def omegas(self) -> np.ndarray:
        return np.array([1.0 / chi for chi in self.antecedent_roots])


def _antecedent_partners(sym: TrigSymbol, lam: float, *, seed: int = 0,
                         boundary_tol: float = 1e-10):
    """Partners omega_j (|omega| <= 1) of the roots of f(x) - lam, x = cos."""
    cos_c = sym.cosine_coeffs()
    px = np.polynomial.chebyshev.cheb2poly(cos_c).astype(complex)
    px[0] -= lam
    xroots = aberth_roots(px, seed=seed)
    omegas = []
    for x in xroots:
        if abs(x.imag) < 1e-11 and abs(x.real) <= 1.0 - 1e-11:
            th = math.acos(float(x.real))
            omegas.append(complex(math.cos(th), -math.sin(th)))
        else:
            disc = np.sqrt(np.asarray(x * x - 1.0, dtype=complex))
            w1, w2 = x + disc, x - disc
            w = w1 if abs(w1) < abs(w2) else w2
            if abs(abs(w) - 1.0) < boundary_tol:
                raise ExcludedLambda(
                    f"antecedent partner {w} on the unit circle at "
                    f"lambda={lam}")
            omegas.append(complex(w))
    om = np.array(omegas)
    prod = np.abs(np.multiply.outer(om, om) - 1.0)
    if np.min(prod) < 1e-8:
        raise ExcludedLambda(
            f"partner product within 1e-8 of 1 at lambda={lam}")
    return om


def characteristic_matrix_from_omegas(omegas: np.ndarray, N: int,
                                      R: float = 1.0) -> np.ndarray:
    """Closed-form r x r matrix of the composed Hankel maps at parameter R."""
    om = R * np.asarray(omegas, dtype=complex)
    r = om.size
    if r == 0:
        return np.zeros((0, 0), dtype=complex)
    diff = 1.0 - np.divide.outer(om, om).T     # [h, n] = 1 - om_n / om_h
    np.fill_diagonal(diff, 1.0)
    A = 1.0 / np.prod(diff, axis=1)
    Qz = np.empty((r, r), dtype=complex)       # Q_m(om_i)
    for m in range(r):
        fac = 1.0 - np.multiply.outer(np.delete(om, m), om)
        Qz[m] = np.prod(fac, axis=0)
    pw = om ** (N + 2)
    V = (A * pw)[:, None] * Qz.T               # V[i, h] = A_i w_i^{N+2} Q_h(w_i)
    return V @ V


def characterize(sym: TrigSymbol, lam: float, N: int, *, R: float = 1.0,
                 seed: int = 0) -> EigenCharacterization:
    """Full antecedent/Hankel data of f - lambda at one spectral parameter."""
    if not sym.parity:
        raise ValueError("the characteristic pipeline needs an even symbol")
    om = _antecedent_partners(sym, lam, seed=seed)
    cos_c = sym.cosine_coeffs()
    d = sym.degree
    lead = abs(cos_c[d] * 2.0 ** (d - 1)) if d >= 1 else abs(cos_c[0])
    h_lambda = TrigSymbol.constant(lead)
    pred = levinson(h_lambda, 0)
    chis = tuple(complex(1.0 / w) for w in om)
    H = characteristic_matrix_from_omegas(om, N, R)
    return EigenCharacterization(lam=float(lam), antecedent_roots=chis,
                                 r=len(chis), h_lambda=h_lambda,
                                 predictor_ref=pred, hankel_matrix=H)


def characteristic_matrix(chr: EigenCharacterization, N: int,
                          R: float = 1.0) -> np.ndarray:
    """r x r composed-Hankel matrix for already-characterized antecedents."""
    return characteristic_matrix_from_omegas(chr.omegas, N, R)


@dataclass(frozen=True)
class DetRootsResult:
    roots: tuple
    excluded: tuple           # (lo, hi) windows skipped around excluded values

    def __iter__(self):
        return iter(self.roots)


def _critical_values(sym: TrigSymbol) -> list[float]:
    vals = [float(sym(0.0)), float(sym(np.pi))]
    for a, b, fa, fb in monotone_branches(sym):
        vals.extend([fa, fb])
    out = []
    for v in sorted(vals):
        if not out or v - out[-1] > 1e-12:
            out.append(v)
    return out


def _det_normalized(sym: TrigSymbol, lam: float, N: int, seed: int = 0):
    om = _antecedent_partners(sym, lam, seed=seed)
    M = characteristic_matrix_from_omegas(om, N)
    D = complex(np.linalg.det(np.eye(om.size) - M))
    uni = om[np.abs(np.abs(om) - 1.0) < 1e-9]
    n_uni = uni.size
    phase = np.prod((uni / np.abs(uni)) ** (-(N + 2))) if n_uni else 1.0 + 0j
    return D * phase / (1j ** n_uni), D, n_uni


def det_equation_roots(sym: TrigSymbol, N: int,
                       lambda_window: tuple[float, float],
                       n_samples: int = 2000, *, seed: int = 0,
                       crit_tol: float = CRIT_TOL,
                       resid_tol: float = 1e-6) -> DetRootsResult:
    """All roots of det(I - M(lambda)) = 0 in a window of spectral parameters.

    The window is sampled, guard bands of width ``crit_tol`` around critical
    values of the symbol are skipped (reported in the result), and sign
    changes of the phase-normalized real part are bisected.  Refined roots
    must pass a determinant-residual test; their normalized imaginary part is
    asserted below 1e-8.
    """
    lo, hi = lambda_window
    crit = _critical_values(sym)

    def in_guard(lam):
        return any(abs(lam - c) < crit_tol for c in crit)

    lams = np.linspace(lo, hi, n_samples)
    samples = []
    excluded = []
    for lam in lams:
        if in_guard(lam):
            excluded.append(float(lam))
            samples.append(None)
            continue
        try:
            Dn, D, n_uni = _det_normalized(sym, float(lam), N, seed)
        except ExcludedLambda:
            excluded.append(float(lam))
            samples.append(None)
            continue
        samples.append((float(lam), Dn, n_uni))
    scale = max((abs(s[1]) for s in samples if s is not None), default=1.0)
    roots = []
    for i in range(len(samples) - 1):
        a, b = samples[i], samples[i + 1]
        if a is None or b is None or a[2] != b[2]:
            continue
        ra, rb = a[1].real, b[1].real
        if ra == 0.0:
            ra = 1e-300
        if ra * rb >= 0:
            continue
        la, lb = a[0], b[0]
        fa = ra
        for _ in range(80):
            lm = 0.5 * (la + lb)
            try:
                fm = _det_normalized(sym, lm, N, seed)[0].real
            except ExcludedLambda:
                break
            if fa * fm <= 0:
                lb = lm
            else:
                la, fa = lm, fm
        lam_root = 0.5 * (la + lb)
        try:
            Dn, D, _ = _det_normalized(sym, lam_root, N, seed)
        except ExcludedLambda:
            continue
        if abs(D) > resid_tol * scale:
            log.debug("rejecting pseudo-crossing at lambda=%.8f |D|=%.2e",
                      lam_root, abs(D))
            continue
        if abs(Dn.imag) > 1e-8 * max(1.0, scale):
            raise ExcludedLambda(
                f"normalized determinant not real at root {lam_root}: "
                f"imag {Dn.imag:.2e}")
        if not roots or abs(lam_root - roots[-1]) > 1e-9 * max(1.0, abs(hi)):
            roots.append(float(lam_root))
    excl_windows = []
    for lam in excluded:
        if excl_windows and lam - excl_windows[-1][1] < 2 * (hi - lo) / n_samples:
            excl_windows[-1] = (excl_windows[-1][0], lam)
        else:
            excl_windows.append((lam, lam))
    return DetRootsResult(roots=tuple(roots), excluded=tuple(excl_windows))


# ---------------------------------------------------------------------------
# Weyl-gap diagnostics
# ---------------------------------------------------------------------------

def default_test_functions() -> list[Callable[[np.ndarray], np.ndarray]]:
    return [lambda x: x, lambda x: x ** 2, lambda x: x ** 3,
            lambda x: x ** 4, np.abs, np.exp]


def weyl_gap(sym: TrigSymbol, N: int,
             test_fns: Optional[Sequence[Callable]] = None) -> float:
    """Max averaged test-function gap between the spectrum and symbol samples.

    Compares the N smallest eigenvalues of the order-N section against the
    symbol on the uniform grid -pi + 2 pi j/(N+1), j = 1..N (both families
    have N members); returns the worst |mean difference| over the test
    functions.
    """
    if test_fns is None:
        test_fns = default_test_functions()
    eig = hermitian_eigen(build(sym, N).dense())
    lams = eig.eigenvalues[:N]
    theta = -np.pi + 2.0 * np.pi * np.arange(1, N + 1) / (N + 1)
    samples = sym(theta)
    worst = 0.0
    for h in test_fns:
        gap = abs(np.sum(h(lams)) - np.sum(h(samples))) / N
        worst = max(worst, float(gap))
    return worst


# ---------------------------------------------------------------------------
# minimum-eigenvalue reporting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinEigenReport:
    lambda_min: float
    location: GridLocation
    theta0: float
    f_theta0: float


def _unique_minimizer(sym: TrigSymbol, n_grid: int = 8192) -> float:
    theta = np.linspace(0.0, 2.0 * np.pi, n_grid, endpoint=False)
    vals = sym(theta)
    fmin = float(vals.min())
    span = max(float(vals.max()) - fmin, 1e-300)
    near = theta[vals <= fmin + 1e-10 * span]
    # collapse contiguous grid runs (and the wrap-around) into candidates
    groups = [[float(near[0])]] if near.size else []
    for t in near[1:]:
        if t - groups[-1][-1] <= 2.5 * (2 * np.pi / n_grid):
            groups[-1].append(float(t))
        else:
            groups.append([float(t)])
    if len(groups) >= 2 and (groups[0][0] + 2 * np.pi - groups[-1][-1]
                             <= 2.5 * (2 * np.pi / n_grid)):
        groups[0] = groups.pop() + groups[0]
    if len(groups) != 1:
        raise NonUniqueMinimum(
            f"{len(groups)} separated minimizer groups detected")
    center = groups[0][len(groups[0]) // 2]
    # parabolic refinement of the minimizer
    h = 2 * np.pi / n_grid
    for _ in range(60):
        f0, fp, fm = sym(center), sym(center + h), sym(center - h)
        denom = fp - 2 * f0 + fm
        if denom <= 0:
            break
        step = 0.5 * h * (fm - fp) / denom
        center += float(np.clip(step, -h, h))
        h *= 0.5
    return center % (2.0 * np.pi)


def min_eigen_report(sym: TrigSymbol, N: int) -> MinEigenReport:
    """Smallest eigenvalue, its grid location, and the symbol minimizer."""
    theta0 = _unique_minimizer(sym)
    eig = hermitian_eigen(build(sym, N).dense())
    loc = grid_localize(sym, N, eig)[0]
    return MinEigenReport(lambda_min=float(eig.eigenvalues[0]), location=loc,
                          theta0=float(theta0), f_theta0=float(sym(theta0)))


def min_eigen_sweep(sym: TrigSymbol, N_list: Sequence[int]):
    """Reports over an order sweep plus the grid-point distances to theta0.

    The second element gives |k pi/(N+2) - theta0| per order; under the
    localization theorem it trends to zero as N grows.
    """
    reports = [min_eigen_report(sym, int(N)) for N in N_list]
    dists = []
    for rep, N in zip(reports, N_list):
        grid_theta = rep.location.k * np.pi / (N + 2)
        t0 = rep.theta0
        dist = min(abs(grid_theta - t0), abs(grid_theta - (2 * np.pi - t0)))
        dists.append(float(dist))
    return reports, dists

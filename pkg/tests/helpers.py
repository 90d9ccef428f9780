"""Shared construction helpers and independent oracles for the test suite.

Everything here is deliberately written along a *different* route than the
library code it checks (series truncation, convolution identities, dense
linear algebra), so the two sides never share a bug.
"""

from math import comb

import numpy as np

from toeplitz_spectra.symbol_core import TrigSymbol


def poly_from_factors(ws):
    """Ascending coefficients of prod (1 - w z)."""
    c = np.array([1.0 + 0j])
    for w in ws:
        c = np.convolve(c, np.array([1.0, -w]))
    return c


def symbol_from_inside_roots(roots, scale=1.0):
    """Real symbol scale * prod |1 - a chi|^2 over the given inside roots.

    ``roots`` may contain repeats (multiplicities) and complex entries; for a
    real symbol complex entries must come in conjugate pairs.
    """
    p = poly_from_factors(roots)
    conv = np.convolve(p, np.conj(p[::-1]))
    return TrigSymbol(scale * conv)


def series_project_minus(shift, pole, order, n_terms=256):
    """Truncated-series coefficients of pi_-(chi^shift / (1-pole*chibar)^order).

    Returns c[0..n_terms] with c[w] the coefficient of chibar^w (c[0] = 0).
    """
    out = np.zeros(n_terms + 1, dtype=complex)
    for u in range(shift + 1, shift + n_terms + 1):
        w = u - shift
        out[w] = comb(u + order - 1, order - 1) * pole ** u
    return out


def series_project_plus_conj(shift, pole, order, n_terms=256):
    """chi-coefficients of pi_+(chibar^shift / (1-pole*chi)^order), shift >= 0."""
    out = np.zeros(n_terms, dtype=complex)
    for u in range(shift, shift + n_terms):
        v = u - shift
        out[v] = comb(u + order - 1, order - 1) * pole ** u
    return out


def plus_element_coeffs(elem, n_terms):
    """chi-coefficients 0..n_terms-1 of a plus-side rational element."""
    out = np.zeros(n_terms, dtype=complex)
    poly = np.asarray(elem.poly, dtype=complex)
    out[: min(poly.size, n_terms)] += poly[:n_terms]
    ks = np.arange(n_terms)
    for w, h, c in elem.terms:
        out += c * np.array([comb(k + h - 1, h - 1) for k in ks]) * w ** ks
    return out


def minus_element_coeffs(elem, n_terms):
    """chibar-coefficients 0..n_terms of a minus-side rational element."""
    out = np.zeros(n_terms + 1, dtype=complex)
    poly = np.asarray(elem.poly, dtype=complex)
    for t in range(1, min(poly.size, n_terms + 1)):
        out[t] += poly[t]
    for w, h, c in elem.terms:
        for k in range(1, n_terms + 1):
            out[k] += c * comb(k - 1 + h - 1, h - 1) * w ** (k - 1)
    return out


def char_poly_coeffs(M):
    """Characteristic polynomial of M by Faddeev-LeVerrier (trace recursion).

    Independent of any eigenvalue routine.  Returns ascending coefficients of
    det(lambda I - M).
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    c = np.zeros(n + 1, dtype=complex)
    c[n] = 1.0
    A = np.zeros_like(M)
    for k in range(1, n + 1):
        A = M @ A + c[n - k + 1] * np.eye(n)
        c[n - k] = -np.trace(M @ A) / k
    return c


def _pf_simple(poles):
    """Weights A_h with 1/prod(1 - w z) = sum A_h/(1 - w_h z), simple poles."""
    A = []
    for h, wh in enumerate(poles):
        prod = 1.0 + 0j
        for n, wn in enumerate(poles):
            if n != h:
                prod *= 1 - wn / wh
        A.append(1.0 / prod)
    return np.array(A)


def laurent_tables(plus_poles, minus_poles, scale, N, U):
    """Laurent coefficients of chi^{N+1} scale*G1/G2 and chi^{-N-1} G2/(scale G1).

    Simple poles only.  Returns two dicts exponent -> coefficient covering
    all exponents reachable with series index up to U.
    """
    g1 = scale * poly_from_factors(plus_poles)
    g2 = poly_from_factors(minus_poles)
    A_minus = _pf_simple(minus_poles) if len(minus_poles) else None
    A_plus = _pf_simple(plus_poles) if len(plus_poles) else None
    u = np.arange(U + 1)
    inv_g2 = np.zeros(U + 1, dtype=complex)
    if A_minus is None:
        inv_g2[0] = 1.0
    else:
        for Ah, q in zip(A_minus, minus_poles):
            inv_g2 += Ah * q ** u
    inv_g1 = np.zeros(U + 1, dtype=complex)
    if A_plus is None:
        inv_g1[0] = 1.0
    else:
        for Ah, w in zip(A_plus, plus_poles):
            inv_g1 += Ah * w ** u
    inv_g1 = inv_g1 / scale
    phi = {}
    for mu, g in enumerate(g1):
        for k in range(U + 1):
            e = N + 1 + mu - k
            phi[e] = phi.get(e, 0j) + g * inv_g2[k]
    phit = {}
    for mu, g in enumerate(g2):
        for k in range(U + 1):
            e = -(N + 1) - mu + k
            phit[e] = phit.get(e, 0j) + g * inv_g1[k]
    return phi, phit


def brute_hankel_product(plus_poles, minus_poles, scale, N, dim):
    """Fourier-truncated matrix of the composed Hankel maps on chi^0..chi^{dim-1}."""
    phi, phit = laurent_tables(plus_poles, minus_poles, scale, N,
                               U=3 * dim + 2 * N + 8)
    H = np.array([[phi.get(-(w + k), 0j) for k in range(dim)]
                  for w in range(1, dim + 1)])
    Ht = np.array([[phit.get(k + w, 0j) for w in range(1, dim + 1)]
                   for k in range(dim)])
    return Ht @ H

"""Spectral polynomial of the DTV potential via the stationary-KdV chain.

The chain is the zero-mean-antiderivative form of the recursion

    u_0 = 1,   r_l = 1/4 u_{l-1}''' + q u_{l-1}' + 1/2 q' u_{l-1},
    u_l = zero-mean antiderivative of r_l,

with the free integration constants entering affinely through
f_l = sum_j d_j u_{l-j} (d_0 = 1) and solved by least squares against the
termination condition sum_{j=0}^{g} d_j u_{g+1-j}' = 0.  From f_0..f_g the
product solution F(E, z) = sum_l f_{g-l} E^l satisfies
F''' = 4 (E - q) F' - 2 q' F, and the Wronskian-square identity

    Q(E) = 1/4 F'^2 - 1/2 F F'' + (E - q) F^2

is independent of z; it is the monic spectral polynomial of degree 2g + 1
whose roots are the band edges.  Q is recovered from 2g + 2 Chebyshev-placed
E samples by interpolation on the scaled domain.

Numerical layout: the repeated third derivatives amplify mode-k roundoff by
(2 pi k)^2 per chain step, which in double precision caps the achievable
termination residual near 1e-7 for genus 3-4 potentials.  The chain therefore
runs in extended precision (numpy clongdouble) on truncated Fourier
coefficient vectors: the sampled line potential has closed-form coefficients
(geometric csc^2 sums, no FFT), products are exact convolutions truncated at
a content-based cutoff, and only final results are cast back to doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .elliptic import invariants
from .errors import (
    ConstancyFailure,
    IllConditioned,
    NotNormalized,
    RankDeficiency,
    ResolutionError,
    UnsupportedMultiplicity,
)
from .potential import (
    CONSTANT,
    ELLIPTIC,
    TRIG_LIMIT,
    MultiplicityVector,
    PotentialSpec,
    genus,
    line_pole_distance,
    trig_constant,
)

__all__ = [
    "PeriodicFunctionSeries",
    "KdVChain",
    "SpectralPolynomial",
    "RootCluster",
    "kdv_chain",
    "product_solution",
    "product_ode_residual",
    "spectral_polynomial",
    "spectral_roots",
    "trig_spectral_polynomial",
    "poly_discriminant",
    "default_grid_size",
]

_TOP_MODE_TOL = 1e-10
_CONSTANCY_TOL = 1e-6
_ROOT_MERGE_TOL = 1e-6
_ROOT_COND_LIMIT = 1e8
_MAX_N0 = 8

_LD = np.float128
_CLD = np.complex256
_PI_LD = _LD("3.14159265358979323846264338327950288")


@dataclass(frozen=True)
class PeriodicFunctionSeries:
    """Samples of a 1-periodic function on z0 + j/N and their DFT."""

    grid_size: int
    z0: complex
    values: np.ndarray  # (N,) complex samples
    coefficients: np.ndarray  # DFT / N, so coefficients[0] is the mean

    @classmethod
    def from_modes(cls, modes: np.ndarray, n: int, z0: complex) -> "PeriodicFunctionSeries":
        """Expand a centered mode vector c_{-K..K} onto an N-point grid."""
        k_half = len(modes) // 2
        coeffs = np.zeros(n, dtype=complex)
        center = np.asarray(modes, dtype=complex)
        for j, c in enumerate(center):
            mode = j - k_half
            coeffs[mode % n] += c
        return cls(grid_size=n, z0=z0, values=np.fft.ifft(coeffs) * n,
                   coefficients=coeffs)

    def top_mode_ratio(self) -> float:
        c = np.abs(self.coefficients)
        top = max(c[self.grid_size // 2 - 1], c[self.grid_size // 2])
        return float(top / max(c.max(), 1e-300))


@dataclass(frozen=True)
class KdVChain:
    """Recursion basis u_0..u_{g+1}, solved constants, and diagnostics.

    basis_modes holds the extended-precision centered coefficient vectors
    (modes -k_cut..k_cut) that downstream assembly reuses; basis holds the
    same functions expanded onto the reporting grid.
    """

    spec: PotentialSpec
    genus_g: int
    grid_size: int
    k_cut: int
    basis: tuple[PeriodicFunctionSeries, ...]  # u_0 .. u_{g+1}
    constants: np.ndarray  # d_0 = 1, d_1 .. d_g
    termination_residual: float
    basis_modes: tuple[np.ndarray, ...]
    q_modes: np.ndarray


@dataclass(frozen=True)
class SpectralPolynomial:
    """Monic polynomial Q(E), coefficients in descending powers.

    coefficients_extended carries the clongdouble copy used to polish roots;
    near-degenerate band edges split by less than sqrt(double eps) would
    otherwise surface as spurious conjugate pairs.
    """

    coefficients: np.ndarray  # (2g+2,) complex, coefficients[0] == 1
    z_constancy_diag: float
    tau: Optional[complex]
    n: MultiplicityVector
    coefficients_extended: Optional[np.ndarray] = None

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, E):
        return np.polyval(self.coefficients, E)

    def to_json_dict(self) -> dict:
        d = {
            "n": list(self.n.as_tuple()),
            "tau_im": self.tau.imag if self.tau is not None else None,
        }
        if self.tau is not None and abs(self.tau.real) > 0:
            d["tau_re"] = self.tau.real
        d.update({
            "degree": self.degree,
            "coeffs": [[c.real, c.imag] for c in self.coefficients],
            "z_constancy": self.z_constancy_diag,
        })
        return d


@dataclass(frozen=True)
class RootCluster:
    value: complex
    multiplicity: int
    is_real: bool


def default_grid_size(n: MultiplicityVector) -> int:
    return 256 if n.total() <= 8 else 512


# -- extended-precision coefficient-space helpers ----------------------------
# centered layout: array index j holds the coefficient of exp(2 pi i (j-K) x)

def _modes_of(arr: np.ndarray) -> np.ndarray:
    k = len(arr) // 2
    return np.arange(-k, k + 1, dtype=_LD)


def _deriv_modes(arr: np.ndarray, order: int = 1) -> np.ndarray:
    fac = (2j * _PI_LD * _modes_of(arr)) ** order
    return arr * fac.astype(_CLD)


def _antider_modes(arr: np.ndarray) -> np.ndarray:
    k = len(arr) // 2
    modes = _modes_of(arr)
    out = np.zeros_like(arr)
    nz = modes != 0
    out[nz] = arr[nz] / (2j * _PI_LD * modes[nz]).astype(_CLD)
    out[k] = 0.0
    return out


def _conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of two centered mode vectors, truncated to the window."""
    k = len(a) // 2
    return np.convolve(a, b)[k: 3 * k + 1]


def _norm(arr: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(arr) ** 2)))


def _solve_extended(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Square solve in clongdouble (Gaussian elimination, partial pivoting)."""
    a = a.copy()
    b = b.copy()
    m = len(b)
    for col in range(m):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        for row in range(col + 1, m):
            f = a[row, col] / a[col, col]
            a[row, col:] -= f * a[col, col:]
            b[row] -= f * b[col]
    x = np.zeros(m, dtype=_CLD)
    for row in range(m - 1, -1, -1):
        x[row] = (b[row] - np.sum(a[row, row + 1:] * x[row + 1:])) / a[row, row]
    return x


def _lstsq_extended(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Least squares in extended precision via MGS QR with reorthogonalization.

    The termination columns become nearly parallel near the trig limit
    (condition numbers up to ~1e13), which double-precision solvers cannot
    resolve; a tall-skinny QR in clongdouble keeps the residual meaningful.
    Returns (solution, |R| diagonal).
    """
    m, k = a.shape
    qmat = np.zeros((m, k), dtype=_CLD)
    rmat = np.zeros((k, k), dtype=_CLD)
    for j in range(k):
        v = a[:, j].copy()
        for _ in range(2):
            for i in range(j):
                proj = np.sum(np.conj(qmat[:, i]) * v)
                rmat[i, j] += proj
                v -= proj * qmat[:, i]
        rjj = np.sqrt(np.sum(np.abs(v) ** 2))
        rmat[j, j] = rjj
        if float(rjj) > 0.0:
            qmat[:, j] = v / rjj
    rhs = np.array([np.sum(np.conj(qmat[:, i]) * b) for i in range(k)], dtype=_CLD)
    sol = np.zeros(k, dtype=_CLD)
    for i in range(k - 1, -1, -1):
        acc = rhs[i] - np.sum(rmat[i, i + 1:] * sol[i + 1:])
        sol[i] = acc / rmat[i, i] if float(np.abs(rmat[i, i])) > 0.0 else 0.0
    return sol, np.abs(np.diag(rmat)).astype(_LD)


def _mode_cutoff(spec: PotentialSpec, g: int, n_grid: int) -> int:
    """Highest mode carrying chain content above the extended-precision floor.

    Chain element u_l has poles of order 2l, hence mode-k content of order
    k^(2l) exp(-2 pi k d) with d the line-to-pole distance; the cutoff is
    where that drops below ~1e-21 of its peak for l = g + 1.
    """
    d = line_pole_distance(spec)
    if not math.isfinite(d):
        return 8
    p = 2 * (g + 1)
    k_peak = max(1.0, p / (2.0 * math.pi * d))
    target = 21.0 * math.log(10.0)
    k = k_peak
    for _ in range(40):
        k = k_peak + (target + p * math.log(k / k_peak)) / (2.0 * math.pi * d)
    k = math.ceil(k)
    return min(max(16, k), max(16, n_grid // 2 - 1), 220)


def _line_modes(spec: PotentialSpec, k_cut: int) -> np.ndarray:
    """Closed-form Fourier coefficients of q(z0 + x) on the sampling line.

    For 0 < Im s < Im tau the Weierstrass term wp(s + x) expands as
      mode  0:  -2 eta1  (= -pi^2/3 + 8 pi^2 sum m q^m/(1-q^m))
      mode +m:  -4 pi^2 m exp(2 pi i m s) / (1 - q^m)
      mode -m:  -4 pi^2 m q^m exp(-2 pi i m s) / (1 - q^m)
    with q = exp(2 pi i tau); the trig limit keeps only the upper series.
    """
    if spec.mode == CONSTANT:
        out = np.zeros(2 * k_cut + 1, dtype=_CLD)
        out[k_cut] = _CLD(spec.constant)
        return out

    m = np.arange(1, k_cut + 1, dtype=_LD)
    pi2 = _PI_LD * _PI_LD
    out = np.zeros(2 * k_cut + 1, dtype=_CLD)

    def expi(w: complex, mm: np.ndarray) -> np.ndarray:
        # exp(2 pi i m w) in extended precision
        base = 2j * _PI_LD * (_LD(w.real) + 1j * _LD(w.imag))
        return np.exp(mm * base.astype(_CLD))

    if spec.mode == TRIG_LIMIT:
        out[k_cut] = _LD(trig_constant(spec.n))
        for weight, shift in ((spec.n.n0 * (spec.n.n0 + 1), 0.0),
                              (spec.n.n1 * (spec.n.n1 + 1), 0.5)):
            if weight == 0:
                continue
            es = expi(spec.z0 + shift, m)
            out[k_cut + 1:] += weight * 4.0 * pi2 * m * es
        return out

    tau = spec.torus.tau
    b = tau.imag
    qm = expi(tau, m)  # q^m
    half = (0.0, 0.5, tau / 2.0, (1 + tau) / 2.0)
    for k, nk in enumerate(spec.n.as_tuple()):
        if nk < 1:
            continue
        w = nk * (nk + 1)
        s = spec.z0 + half[k]
        s = s - math.floor(s.imag / b) * tau
        es_p = expi(s, m)
        es_m = expi(-s, m)
        # -w * wp(s + x)
        out[k_cut] += w * (pi2 / 3.0 - 8.0 * pi2 * np.sum(m * qm / (1.0 - qm)))
        out[k_cut + 1:] += w * 4.0 * pi2 * m * es_p / (1.0 - qm)
        out[:k_cut] += (w * 4.0 * pi2 * m * qm * es_m / (1.0 - qm))[::-1]
    return out


# -- chain construction ------------------------------------------------------

def kdv_chain(spec: PotentialSpec, g: int, N: int) -> KdVChain:
    """Build the recursion basis and solve the termination constants."""
    if max(spec.n.as_tuple()) > _MAX_N0:
        raise UnsupportedMultiplicity(
            f"max n_k = {max(spec.n.as_tuple())} > {_MAX_N0}: chain magnitudes "
            "exceed what the extended-precision window can certify to 1e-9")
    k_cut = _mode_cutoff(spec, g, N)
    q = _line_modes(spec, k_cut)
    qtail = float(np.max(np.abs(q[[0, -1]])) / np.max(np.abs(q)))
    if qtail > _TOP_MODE_TOL:
        raise ResolutionError(
            f"potential top-mode ratio {qtail:.2e} exceeds {_TOP_MODE_TOL:.0e} "
            f"at cutoff {k_cut} (pole too close to the sampling line)")
    dq = _deriv_modes(q)

    u = [np.zeros(2 * k_cut + 1, dtype=_CLD)]
    u[0][k_cut] = 1.0
    r: list[Optional[np.ndarray]] = [None]
    for _ in range(1, g + 2):
        prev = u[-1]
        r_l = 0.25 * _deriv_modes(prev, 3) + _conv(q, _deriv_modes(prev)) \
            + 0.5 * _conv(dq, prev)
        r.append(r_l)
        u.append(_antider_modes(r_l))

    # termination: r_{g+1} + sum_{j=1..g} d_j r_{g+1-j} = 0, least squares
    norms = [_norm(r_l) for r_l in r[1:]]
    scale = max(max(norms), 1e-300)
    if g >= 1:
        cols = np.stack([r[g + 1 - j] for j in range(1, g + 1)], axis=1)
        col_norms = np.array([max(_norm(cols[:, j]), 1e-300) for j in range(g)])
        a_scaled = cols / col_norms.astype(_LD)
        rhs = -r[g + 1]
        sol, rdiag = _lstsq_extended(a_scaled, rhs)
        # near the trig limit the genus-carrying directions shrink like
        # exp(-pi Im tau) but stay far above the extended-precision floor;
        # genuine deficiency collapses the QR diagonal to roundoff
        if float(min(rdiag)) < 1e-16:
            raise RankDeficiency(
                f"termination QR diagonal {float(min(rdiag)):.2e} signals rank "
                f"< g = {g}: wrong genus or degenerate tau")
        resid_vec = rhs - a_scaled @ sol
        d = (sol / col_norms.astype(_LD)).astype(complex)
        resid = _norm(resid_vec) / scale
    else:
        d = np.zeros(0, dtype=complex)
        resid = _norm(r[g + 1]) / scale

    constants = np.concatenate([[1.0 + 0j], d])
    basis = tuple(
        PeriodicFunctionSeries.from_modes(c.astype(complex), N, spec.z0) for c in u
    )
    return KdVChain(spec=spec, genus_g=g, grid_size=N, k_cut=k_cut,
                    basis=basis, constants=constants,
                    termination_residual=float(resid),
                    basis_modes=tuple(u), q_modes=q)


def _f_modes(chain: KdVChain) -> list[np.ndarray]:
    """f_l = sum_{j=0..l} d_j u_{l-j} for l = 0..g (extended precision)."""
    d = chain.constants.astype(_CLD)
    fs = []
    for ell in range(chain.genus_g + 1):
        f = np.zeros(2 * chain.k_cut + 1, dtype=_CLD)
        for j in range(ell + 1):
            f += d[j] * chain.basis_modes[ell - j]
        fs.append(f)
    return fs


def _assemble_f(chain: KdVChain, E: complex) -> np.ndarray:
    fs = _f_modes(chain)
    g = chain.genus_g
    e_ld = _CLD(complex(E))
    out = np.zeros(2 * chain.k_cut + 1, dtype=_CLD)
    for ell in range(g + 1):
        out += fs[g - ell] * e_ld**ell
    return out


def product_solution(chain: KdVChain, E: complex) -> PeriodicFunctionSeries:
    """F(E, z) = sum_l f_{g-l}(z) E^l as a function of z."""
    f = _assemble_f(chain, E)
    return PeriodicFunctionSeries.from_modes(f.astype(complex),
                                             chain.grid_size, chain.spec.z0)


def product_ode_residual(chain: KdVChain, E: complex) -> float:
    """Relative residual of F''' = 4 (E - q) F' - 2 q' F at this E."""
    f = _assemble_f(chain, E)
    f1 = _deriv_modes(f)
    f3 = _deriv_modes(f, 3)
    lhs = f3
    rhs = 4.0 * (_CLD(complex(E)) * f1 - _conv(chain.q_modes, f1)) \
        - 2.0 * _conv(_deriv_modes(chain.q_modes), f)
    denom = max(_norm(lhs), _norm(rhs), 1e-300)
    return _norm(lhs - rhs) / denom


def spectral_polynomial(spec: PotentialSpec, N: Optional[int] = None) -> SpectralPolynomial:
    """Monic spectral polynomial Q(E) of degree 2g + 1.

    Raises ConstancyFailure when the Wronskian-square values vary along z
    beyond 1e-6 relative (wrong genus, unresolved grid, or bad convention).
    """
    if spec.mode != ELLIPTIC:
        raise ValueError("spectral_polynomial requires an elliptic-mode spec")
    g = genus(spec.n)
    if N is None:
        N = default_grid_size(spec.n)
    chain = kdv_chain(spec, g, N)
    fs = _f_modes(chain)
    k_cut = chain.k_cut
    q = chain.q_modes

    inv = invariants(spec.torus)
    emax = max(abs(inv.e1), abs(inv.e2), abs(inv.e3))
    radius = 2.0 * (1.0 + emax * spec.n.weight_sum())
    m = 2 * g + 2
    nodes = radius * np.cos(math.pi * (2.0 * np.arange(m) + 1.0) / (2.0 * m))

    q_means_ld = np.empty(m, dtype=_CLD)
    diag = 0.0
    for j, E in enumerate(nodes):
        e_ld = _CLD(E)
        F = np.zeros(2 * k_cut + 1, dtype=_CLD)
        for ell in range(g + 1):
            F += fs[g - ell] * e_ld**ell
        F1 = _deriv_modes(F)
        F2 = _deriv_modes(F, 2)
        FF = _conv(F, F)
        qz = 0.25 * _conv(F1, F1) - 0.5 * _conv(F, F2) + e_ld * FF - _conv(q, FF)
        mean = qz[k_cut]
        wiggle = qz.copy()
        wiggle[k_cut] = 0.0
        q_means_ld[j] = mean
        diag = max(diag, _norm(wiggle) / (1.0 + abs(complex(mean))))
    if diag > _CONSTANCY_TOL:
        raise ConstancyFailure(
            f"z-constancy diagnostic {diag:.2e} > {_CONSTANCY_TOL:.0e}")

    # interpolate on the scaled domain, then restore powers of the radius
    x_ld = (nodes / radius).astype(_LD)
    vand = np.zeros((m, m), dtype=_CLD)
    vand[:, m - 1] = 1.0
    for j in range(m - 2, -1, -1):
        vand[:, j] = vand[:, j + 1] * x_ld
    c_scaled = _solve_extended(vand, q_means_ld)
    powers = (_LD(radius) ** np.arange(m - 1, -1, -1)).astype(_CLD)
    coeffs_ld = c_scaled / powers
    coeffs_ld = coeffs_ld / coeffs_ld[0]
    coeffs = coeffs_ld.astype(complex)
    return SpectralPolynomial(coefficients=coeffs, z_constancy_diag=diag,
                              tau=spec.torus.tau, n=spec.n,
                              coefficients_extended=coeffs_ld)


def _polish_roots(coeffs_ld: np.ndarray, approx: np.ndarray) -> np.ndarray:
    """Newton-polish companion-matrix roots against extended coefficients.

    Companion eigenvalues carry double-rounding of the coefficients, which
    splits tightly clustered real band edges into spurious conjugate pairs
    at the sqrt(eps) level; a few Newton steps with clongdouble Horner
    evaluation pull them back below the 1e-6-scale reality threshold.
    """
    dcoeffs = coeffs_ld[:-1] * np.arange(len(coeffs_ld) - 1, 0, -1, dtype=_LD)
    roots = approx.astype(_CLD)
    for _ in range(8):
        p = np.zeros_like(roots)
        for c in coeffs_ld:
            p = p * roots + c
        dp = np.zeros_like(roots)
        for c in dcoeffs:
            dp = dp * roots + c
        step = np.where(np.abs(dp) > 0, p / dp, 0.0)
        # clamp to stay within the cluster the estimate came from
        lim = (1e-4 * (1.0 + np.abs(roots))).astype(_LD)
        mag = np.maximum(np.abs(step), _LD(1e-300))
        step = np.where(mag > lim, step * (lim / mag).astype(_CLD), step)
        roots = roots - step
    return roots.astype(complex)


def spectral_roots(poly: SpectralPolynomial) -> list[RootCluster]:
    """Roots of Q with multiplicity clustering and reality flags.

    Roots closer than 1e-6 * scale are merged; a root is real when
    |Im E| <= 1e-6 * scale.  Ordering: descending real part, then descending
    imaginary part, so an all-real spectrum lists E_0 > E_1 > ... > E_2g.
    """
    raw = np.roots(poly.coefficients)
    if poly.coefficients_extended is not None:
        raw = _polish_roots(poly.coefficients_extended, raw)
    scale = 1.0 + float(np.abs(raw).max()) if raw.size else 1.0
    order = np.lexsort((-raw.imag, -raw.real))
    raw = raw[order]

    clusters: list[list[complex]] = []
    for r in raw:
        if clusters and abs(r - np.mean(clusters[-1])) <= _ROOT_MERGE_TOL * scale:
            clusters[-1].append(r)
        else:
            clusters.append([r])

    dpoly = np.polyder(poly.coefficients)
    abs_coeff = np.abs(poly.coefficients)
    out = []
    for grp in clusters:
        val = complex(np.mean(grp))
        mult = len(grp)
        if mult == 1:
            cond = float(np.polyval(abs_coeff, abs(val))
                         / max(abs(np.polyval(dpoly, val)), 1e-300)
                         / max(abs(val), 1.0))
            if cond > _ROOT_COND_LIMIT:
                raise IllConditioned(
                    f"root {val} condition number {cond:.2e} > {_ROOT_COND_LIMIT:.0e}")
        is_real = abs(val.imag) <= _ROOT_MERGE_TOL * scale
        if is_real:
            val = complex(val.real, 0.0)
        out.append(RootCluster(value=val, multiplicity=mult, is_real=is_real))
    # a conjugate pair straddling the reality threshold flattens onto the
    # same real value; fold such duplicates into one even-order cluster
    folded: list[RootCluster] = []
    for r in out:
        if (folded and r.is_real and folded[-1].is_real
                and abs(r.value - folded[-1].value) <= 1e-12 * scale):
            folded[-1] = RootCluster(
                value=folded[-1].value,
                multiplicity=folded[-1].multiplicity + r.multiplicity,
                is_real=True)
        else:
            folded.append(r)
    return folded


def trig_spectral_polynomial(n: MultiplicityVector) -> SpectralPolynomial:
    """Closed-form trig-limit polynomial Q_T(E), degree 2 n0 + 1.

    (E - C) prod_{j=1}^{n0-n1} (E - C + j^2 pi^2)^2
            prod_{j=n0-n1+1}^{n0} (E - C + (2j - n0 + n1)^2 pi^2)^2
    with C = C_T(n); requires n0 >= n1.
    """
    if n.n0 < n.n1:
        raise NotNormalized(f"trig polynomial needs n0 >= n1, got {n.as_tuple()}")
    c = trig_constant(n)
    roots = [c]
    for j in range(1, n.n0 - n.n1 + 1):
        roots += [c - j**2 * math.pi**2] * 2
    for j in range(n.n0 - n.n1 + 1, n.n0 + 1):
        roots += [c - (2 * j - n.n0 + n.n1) ** 2 * math.pi**2] * 2
    coeffs = np.poly(np.array(roots, dtype=complex))
    return SpectralPolynomial(coefficients=coeffs, z_constancy_diag=0.0,
                              tau=None, n=n)


def poly_discriminant(poly: SpectralPolynomial) -> complex:
    """Discriminant via the Sylvester resultant of (Q, Q').

    disc = (-1)^(d(d-1)/2) Res(Q, Q') for monic Q.  Coefficients are
    rescaled (E -> s E) before the determinant and the scaling restored in
    log space, so intermediate overflow is avoided.
    """
    c = np.asarray(poly.coefficients, dtype=complex)
    d = len(c) - 1
    # scale from the coefficient magnitudes: |c_k|^(1/k) bounds the root size
    mags = [abs(c[k]) ** (1.0 / k) for k in range(1, d + 1) if abs(c[k]) > 0]
    s = max(mags) if mags else 1.0
    cs = c / s ** np.arange(d + 1)
    dcs = np.polyder(cs)

    size = 2 * d - 1
    syl = np.zeros((size, size), dtype=complex)
    for i in range(d - 1):
        syl[i, i: i + d + 1] = cs
    for i in range(d):
        syl[d - 1 + i, i: i + d] = dcs
    sign, logdet = np.linalg.slogdet(syl)
    if sign == 0:
        return 0j
    log_mag = logdet + d * (d - 1) * math.log(s)
    phase = sign * (-1.0) ** (d * (d - 1) // 2)
    if log_mag > 700.0:
        return phase * complex(math.inf)
    return complex(phase * math.exp(log_mag))

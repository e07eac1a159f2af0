"""Numerical verification of the kernel-norm and integral envelopes.

Every decay estimate used by the contraction argument has the shape

    ||W . d_y^m K(x, .)||_{L^p}  <=  C <x>^s1 x^{-s2} e^{b(nS) x q}

for a kernel K, optional weight W = |y|^beta, and a rate multiple q of
the worst-case decay b.  Each check reconstructs the kernel on an
adaptive one-dimensional grid (spectral cutoff and domain size grow as
x shrinks/grows), evaluates the left-hand side at logarithmically
spaced x over [1e-2, 1e2] for a set of temporal frequencies, and forms
the ratio against the envelope.  A check passes when the ratio stays
finite and shows no growth trend over the last decade of x; the
smallest constant observed is reported as fitted C.

The checks are numerical evidence, not proofs: they would catch a
wrong exponent (ratio diverging like a power) or a wrong rate factor
(exponential trend), which is exactly the failure mode that matters
when transcribing estimates into code.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .kernels import Dispersion, rate_b, symbol
from .params import Params

__all__ = ["BoundCheck", "kernel_profile", "kernel_norm",
           "check_kernel_norms", "check_B_functions", "check_heat_limits",
           "check_L_operators", "run_all"]


@dataclass
class BoundCheck:
    """Outcome of one envelope check."""

    check_id: str
    quantity: str
    envelope: str
    fitted_c: float
    margin: float          # 0.05 - (last-decade ratio trend); >= 0 passes
    passed: bool
    xs: np.ndarray = dc_field(default=None, repr=False)
    ratios: np.ndarray = dc_field(default=None, repr=False)


# ---------------------------------------------------------------------------
# adaptive one-dimensional reconstruction


def _grid_for(x: float):
    """Spectral cutoff, domain half-width, and point count for one x."""
    kcut = 1.2 * max(74.0 / x, 4.0)
    ly = 12.0 * np.sqrt(x) + 6.0 * x + 25.0
    n = int(2 ** np.ceil(np.log2(max(2.0 * ly * kcut / np.pi, 4096.0))))
    n = min(n, 2 ** 17)
    dk = 2.0 * kcut / n
    half = np.pi / dk
    y = -half + (2.0 * half / n) * np.arange(n)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=2.0 * half / n)
    return k, y, half


class _Profiles:
    """Cache of physical kernel profiles per (builder key, x, nS)."""

    def __init__(self):
        self._store = {}

    def get(self, key, build, x: float, ns: float):
        tag = (key, float(x), float(ns))
        hit = self._store.get(tag)
        if hit is not None:
            return hit
        k, y, half = _grid_for(x)
        disp = Dispersion.build(k, np.array([ns]))
        sym = build(x, k, disp)[0]
        phase = np.where(np.arange(k.size) % 2 == 0, 1.0, -1.0)
        prof = np.fft.fft(sym * phase) / (2.0 * half)
        self._store[tag] = (y, prof)
        return y, prof


def kernel_profile(kid: str, x: float, ns: float, deriv: int = 0):
    """Physical-space kernel d_y^m K(x, y) on an adaptive grid."""
    k, y, half = _grid_for(x)
    disp = Dispersion.build(k, np.array([ns]))
    sym = symbol(kid, x, disp)[0] * (-1j * k) ** deriv
    phase = np.where(np.arange(k.size) % 2 == 0, 1.0, -1.0)
    return y, np.fft.fft(sym * phase) / (2.0 * half)


def _lp(y, prof, p, beta=None):
    w = np.abs(prof)
    if beta is not None:
        w = np.abs(y) ** beta * w
    dy = y[1] - y[0]
    if p == np.inf:
        return float(np.max(w))
    if p == 1:
        return float(np.sum(w) * dy)
    return float((np.sum(w ** p) * dy) ** (1.0 / p))


def kernel_norm(kid: str, x: float, ns: float, p, beta=None, deriv: int = 0):
    y, prof = kernel_profile(kid, x, ns, deriv)
    return _lp(y, prof, p, beta)


# ---------------------------------------------------------------------------
# envelope rows


def _env(x, s1, s2, bq=0.0, ns=0.0):
    return (np.hypot(1.0, x) ** s1) * x ** (-s2) * np.exp(bq * rate_b(ns) * x)


def _env_str(s1, s2, bq=0.0):
    out = "C"
    if s1:
        out += f" <x>^{s1:g}"
    if s2:
        out += f" x^-{s2:g}"
    if bq:
        out += f" e^{{{bq:g} b(nS) x}}"
    return out


# rows: (check_id, kernel, deriv, beta, p, s1, s2, bq, modes)
# modes: "all" includes n = 0; "osc" oscillating modes only
_SIMPLE_ROWS = [
    ("k1-l1", "K1", 0, None, 1, 0.0, 0.0, 0.0, "all"),
    ("k1-sup", "K1", 0, None, np.inf, 0.5, 1.0, 0.0, "all"),
    ("k1-w2", "K1", 0, 2.0, 2, -0.25 + 1.0, 0.0, 0.0, "all"),
    ("dk1-l1", "K1", 1, None, 1, 0.5, 1.0, 0.0, "all"),
    ("dk1-sup", "K1", 1, None, np.inf, 1.0, 2.0, 0.0, "all"),
    ("dk1-w2", "K1", 1, 2.0, 2, -0.75 + 1.0, 0.0, 0.0, "all"),
    ("d2k1-sup", "K1", 2, None, np.inf, 1.5, 3.0, 0.0, "all"),
    ("d2k1-l1", "K1", 2, None, 1, 1.0, 2.0, 0.0, "all"),
    ("k2-l1", "K2", 0, None, 1, 0.0, 0.5, 0.0, "all"),
    ("k2-sup", "K2", 0, None, np.inf, 0.0, 1.0, 0.0, "all"),
    ("k2-w2", "K2", 0, 2.0, 2, -0.75 + 1.0, 0.0, 0.0, "all"),
    ("dk2-sup", "K2", 1, None, np.inf, 0.5, 2.0, 0.0, "all"),
    ("dk2-l1", "K2", 1, None, 1, 0.5, 1.5, 0.0, "all"),
    ("k5-l1", "K5", 0, None, 1, 0.0, 0.5, 0.0, "all"),
    ("k6-l1", "K6", 0, None, 1, 0.0, 0.5, 0.0, "all"),
    ("k7-l1", "K7", 0, None, 1, 0.25, 0.25, 0.0, "all"),
    ("k5-w1-l2", "K5", 0, 1.0, 2, 0.0, 0.25, 0.0, "all"),
    ("k6-w1-l2", "K6", 0, 1.0, 2, 0.0, 0.25, 0.0, "all"),
    ("k7-w1-l2", "K7", 0, 1.0, 2, 0.5, 0.25, 0.0, "all"),
    # oscillating projections gain a quarter of the worst-case rate
    ("k1-sup-osc", "K1", 0, None, np.inf, 0.5, 1.0, 0.25, "osc"),
    ("k2-l1-osc", "K2", 0, None, 1, 0.0, 0.5, 0.25, "osc"),
    ("k8-l1-lo", "K8", 0, None, 1, 0.0, 0.25, 0.0, "all"),
    ("k8-l1-hi", "K8", 0, None, 1, 0.0, 1.0, 0.0, "all"),
    ("k8-l2-lo", "K8", 0, None, 2, 0.0, 0.5, 0.0, "all"),
    ("k8-l2-hi", "K8", 0, None, 2, 0.0, 1.25, 0.0, "all"),
    ("k8-sup", "K8", 0, None, np.inf, 0.5, 2.0, 0.0, "all"),
    ("dk8-sup", "K8", 1, None, np.inf, 1.0, 3.0, 0.0, "all"),
    ("dk8-l1", "K8", 1, None, 1, 0.25, 1.75, 0.0, "all"),
    ("k8-w2", "K8", 0, 2.0, 2, -1.25 + 2.0 / 2.0, 0.0, 0.0, "all"),
    ("dk8-w2", "K8", 1, 2.0, 2, -0.75 + 1.0, 1.0, 0.0, "all"),
    ("k8-l1-osc", "K8", 0, None, 1, 0.0, 0.25, 0.25, "osc"),
    ("k10-sup", "K10", 0, None, np.inf, 0.0, 1.0, 0.25, "osc"),
    ("k10-l2", "K10", 0, None, 2, 0.0, 0.75, 0.25, "osc"),
    ("k10-l1", "K10", 0, None, 1, 0.125, 0.625, 0.25, "osc"),
    ("k10-w2", "K10", 0, 2.0, 2, 0.375 + 2.0 / 8.0, -9.0 / 8.0 + 6.0 / 8.0,
     0.25, "osc"),
    ("dk10-sup", "K10", 1, None, np.inf, 0.5, 2.0, 0.25, "osc"),
    ("dk10-l1", "K10", 1, None, 1, 0.625, 1.625, 0.25, "osc"),
    ("k12-sup", "K12", 0, None, np.inf, 0.5, 1.0, 0.0, "all"),
    ("k12-l2", "K12", 0, None, 2, 0.25, 0.5, 0.0, "all"),
    ("dk12-l2", "K12", 1, None, 2, 1.0 - 0.25, 2.0 - 0.5, 0.0, "all"),
    ("dk12-sup", "K12", 1, None, np.inf, 1.0, 2.0, 0.0, "all"),
    ("k13-sup", "K13", 0, None, np.inf, 0.5, 1.0, 0.5, "osc"),
    ("k13-l2", "K13", 0, None, 2, 0.25, 0.5, 0.5, "osc"),
    ("dk13-l2", "K13", 1, None, 2, 0.75, 1.5, 0.5, "osc"),
    ("dk13-sup", "K13", 1, None, np.inf, 1.0, 2.0, 0.5, "osc"),
    ("kr-sup", "Kr", 0, None, np.inf, 0.5, 1.0, 0.25, "osc"),
    ("ki-sup", "Ki", 0, None, np.inf, 0.5, 1.0, 0.25, "osc"),
    ("dkr-l2", "Kr", 1, None, 2, 0.75, 1.5, 0.25, "osc"),
    ("dki-l2", "Ki", 1, None, 2, 0.75, 1.5, 0.25, "osc"),
    ("dkr-sup", "Kr", 1, None, np.inf, 1.0, 2.0, 0.25, "osc"),
    ("f-p0-l2", "K0", 0, None, 2, 0.0, 0.5, 0.0, "mean"),
    ("f-p0-l4", "K0", 0, None, 4, 0.0, 0.75, 0.0, "mean"),
    ("f-l2", "F", 0, None, 2, 0.0, 0.5, 0.0, "osc"),
    ("g-l2", "G", 0, None, 2, 0.0, 0.5, 0.0, "osc"),
    ("df-l2", "F", 1, None, 2, 0.0, 1.5, 0.0, "osc"),
    ("dg-l2", "G", 1, None, 2, 0.0, 1.5, 0.0, "osc"),
    ("df-sup", "F", 1, None, np.inf, 0.0, 2.0, 0.0, "osc"),
    ("dg-sup", "G", 1, None, np.inf, 0.0, 2.0, 0.0, "osc"),
]

_DEFAULT_XS = np.geomspace(1e-2, 1e3, 44)
_QUICK_XS = np.geomspace(1e-2, 1e3, 16)


def _trend(xs, ratios):
    sel = xs >= xs[-1] / 10.0
    r = np.maximum(ratios[sel], 1e-300)
    return float(np.polyfit(np.log(xs[sel]), np.log(r), 1)[0])


def _finish(check_id, quantity, env_s, xs, ratios) -> BoundCheck:
    ratios = np.asarray(ratios)
    finite = bool(np.all(np.isfinite(ratios)))
    trend = _trend(xs, ratios) if finite else np.inf
    margin = 0.05 - trend
    return BoundCheck(check_id=check_id, quantity=quantity, envelope=env_s,
                      fitted_c=float(np.max(ratios)) if finite else np.inf,
                      margin=margin, passed=finite and margin >= 0.0,
                      xs=xs, ratios=ratios)


def _mode_set(params: Params, which: str):
    s = params.strouhal
    if which == "mean" or s == 0.0:
        return [0.0]
    if which == "osc":
        return [s, -s, 2 * s, 5 * s]
    return [0.0, s, -s, 2 * s, 5 * s]


def check_kernel_norms(params: Params, quick: bool = False) -> list[BoundCheck]:
    """All single-kernel envelope rows plus the combination bounds."""
    xs = _QUICK_XS if quick else _DEFAULT_XS
    cache = _Profiles()
    out = []

    for (cid, kid, m, beta, p, s1, s2, bq, modes) in _SIMPLE_ROWS:
        ratios = []
        for x in xs:
            worst = 0.0
            for ns in _mode_set(params, modes):
                y, prof = cache.get((kid, m), _sym_builder(kid, m), x, ns)
                val = _lp(y, prof, p, beta)
                worst = max(worst, val / _env(x, s1, s2, bq, ns))
            ratios.append(worst)
        w = f"|y|^{beta:g} " if beta else ""
        d = f"d_y^{m} " if m else ""
        out.append(_finish(cid, f"||{w}{d}{kid}(x)||_{_pname(p)}",
                           _env_str(s1, s2, bq), xs, ratios))

    out.append(_combo_k12_k13(params, xs, cache))
    out.extend(_combo_kr_ki(params, xs, cache))
    out.extend(_scaled_fg(params, xs, cache))
    out.append(_k0_mass(xs))
    return out


def _pname(p):
    return "inf" if p == np.inf else f"{p:g}"


def _sym_builder(kid, m):
    def build(x, k, disp):
        return symbol(kid, x, disp) * (-1j * k) ** m
    return build


def _combo_k12_k13(params, xs, cache) -> BoundCheck:
    """||K12||_1 + e^{-b x/2} ||K13||_1 <= C (1 + <nS>/(|nS| x^{1/4}))."""
    s = params.strouhal if params.strouhal else 2.0
    ratios = []
    for x in xs:
        worst = 0.0
        for ns in [s, 2 * s, 5 * s]:
            y, p12 = cache.get(("K12", 0), _sym_builder("K12", 0), x, ns)
            _, p13 = cache.get(("K13", 0), _sym_builder("K13", 0), x, ns)
            lhs = (_lp(y, p12, 1)
                   + np.exp(-rate_b(ns) * x / 2.0) * _lp(y, p13, 1))
            env = 1.0 + np.hypot(1.0, ns) / (abs(ns) * x ** 0.25)
            worst = max(worst, lhs / env)
        ratios.append(worst)
    return _finish("k12-k13-l1-combo",
                   "||K12||_1 + e^{-b(nS)x/2}||K13||_1",
                   "C (1 + <nS>/(|nS| x^1/4))", xs, ratios)


def _combo_kr_ki(params, xs, cache) -> list[BoundCheck]:
    """Special L1/Lp bounds for the rotation kernels."""
    s = params.strouhal if params.strouhal else 2.0
    rows = []
    for kid in ("Kr", "Ki"):
        r1, rp = [], []
        p = 2.0
        for x in xs:
            w1 = wp = 0.0
            for ns in [s, 2 * s, 5 * s]:
                y, prof = cache.get((kid, 0), _sym_builder(kid, 0), x, ns)
                eb = np.exp(rate_b(ns) * x / 4.0)
                env1 = eb * (x ** -0.5
                             + (np.hypot(1.0, x) / x) ** 0.125
                             * (1.0 + 1.0 / (abs(ns) * np.sqrt(x))) ** 0.25)
                bx = np.hypot(1.0, x)
                envp = eb * (bx ** (0.5 - 1 / (2 * p)) / x ** (1 - 1 / (2 * p))
                             + bx ** (0.5 - 3 / (8 * p)) / x ** (1 - 7 / (8 * p))
                             + bx ** (0.5 - 3 / (8 * p))
                             / (abs(ns) ** (1 / (4 * p)) * x ** (1 - 3 / (4 * p))))
                w1 = max(w1, _lp(y, prof, 1) / env1)
                wp = max(wp, _lp(y, prof, p) / envp)
            r1.append(w1)
            rp.append(wp)
        rows.append(_finish(f"{kid.lower()}-l1-special", f"||{kid}(x)||_1",
                            "C e^{b x/4} (x^-1/2 + ...)", xs, r1))
        rows.append(_finish(f"{kid.lower()}-l2-special", f"||{kid}(x)||_2",
                            "C e^{b x/4} (three-term)", xs, rp))
    return rows


def _scaled_fg(params, xs, cache) -> list[BoundCheck]:
    """<nSx>-weighted projections of the source kernels."""
    s = params.strouhal if params.strouhal else 2.0
    rows = []
    for kid in ("F", "G"):
        for m, q, s2 in ((0, 2, 0.5), (1, 2, 1.5)):
            ratios = []
            for x in xs:
                worst = 0.0
                for ns in [s, 2 * s, 5 * s]:
                    y, prof = cache.get((kid, m), _sym_builder(kid, m), x, ns)
                    lhs = np.hypot(1.0, ns * x) * _lp(y, prof, q)
                    worst = max(worst, lhs / _env(x, 0.0, s2))
                ratios.append(worst)
            rows.append(_finish(
                f"{kid.lower()}-proj-scaled-m{m}",
                f"<nSx> ||P d_y^{m} {kid}(x)||_{q:g}",
                _env_str(0.0, s2), xs, ratios))
        ratios = []
        for x in xs:
            worst = 0.0
            for ns in [s, 2 * s, 5 * s]:
                y, prof = cache.get((kid, 0), _sym_builder(kid, 0), x, ns)
                lhs = abs(ns) ** 0.25 * x ** 0.25 * _lp(y, prof, 1)
                worst = max(worst, lhs)
            ratios.append(worst)
        rows.append(_finish(f"{kid.lower()}-proj-l1", f"||P {kid}(x)||_1",
                            "C |nS|^-1/4 x^-1/4", xs, ratios))
    return rows


def _k0_mass(xs) -> BoundCheck:
    """The Poisson kernel carries unit mass at every x."""
    errs = []
    for x in xs:
        y, prof = kernel_profile("K0", x, 0.0)
        errs.append(abs(_lp(y, prof, 1) - 1.0))
    err = float(np.max(errs))
    return BoundCheck(check_id="k0-unit-mass", quantity="| ||K0(x)||_1 - 1 |",
                      envelope="= 0 (quadrature tol)", fitted_c=err,
                      margin=1e-8 - err, passed=err < 1e-8,
                      xs=xs, ratios=np.asarray(errs))


# ---------------------------------------------------------------------------
# integral (B-function) envelopes


def _b_integrand_grid(x):
    kcut = 1.2 * max(150.0 / x, 10.0)
    n = min(int(2 ** np.ceil(np.log2(max(kcut * 400, 8192)))), 2 ** 17)
    return np.linspace(1e-9, kcut, n)


def check_B_functions(params: Params, quick: bool = False) -> list[BoundCheck]:
    """Envelopes of the spectral decay integrals.

    B_{mu,phi}(x, nS) = int dk |k|^{2 phi} |k/Lambda_0|^{2 mu} e^{2 Re Lambda_- x}
    B_phi(x, nS)      = int dk |k/Lambda_0|^{2 phi} |Lambda_0|^{-2} e^{2 Re Lambda_- x}
    """
    xs = _QUICK_XS if quick else _DEFAULT_XS
    s = params.strouhal if params.strouhal else 2.0
    modes = [0.0, s, 2 * s, 5 * s]
    out = []

    cases = [("b-mu0-phi1_16", 0.0, params.phi, 0.0),
             ("b-mu0-phi1_4", 0.0, 0.25, 0.0),
             ("b-mu1_2-phi1_16", 0.5, params.phi, 1.0),
             ("b-mu1-phi1_16", 1.0, params.phi, 1.5)]
    for cid, mu, phi, xi1 in cases:
        ratios = []
        for x in xs:
            worst = 0.0
            for ns in modes:
                k = _b_integrand_grid(x)
                disp = Dispersion.build(k, np.array([ns]))
                lam0, lamm = disp.lam0[0], disp.lamm[0]
                f = (np.abs(k) ** (2 * phi)
                     * np.abs(k / lam0) ** (2 * mu)
                     * np.exp(2.0 * lamm.real * x))
                val = 2.0 * np.trapezoid(f, k)
                if mu == 0.0:
                    env = _env(x, (phi + 1) / 2.0, phi + 1.0, 1.0, ns)
                else:
                    env = _env(x, phi / 2.0 + mu, xi1 + phi, 1.0, ns)
                if env == 0.0:  # both sides underflow at this depth
                    ratio = 0.0 if val == 0.0 else np.inf
                else:
                    ratio = val / env
                worst = max(worst, ratio)
            ratios.append(worst)
        if mu == 0.0:
            es = _env_str((phi + 1) / 2, phi + 1, 1.0)
        else:
            es = _env_str(phi / 2 + mu, xi1 + phi, 1.0)
        out.append(_finish(cid, f"B_(mu={mu:g},phi={phi:g})(x)", es, xs, ratios))

    ratios = []
    phi = params.phi
    for x in xs:
        worst = 0.0
        for ns in modes:
            k = _b_integrand_grid(x)
            disp = Dispersion.build(k, np.array([ns]))
            lam0, lamm = disp.lam0[0], disp.lamm[0]
            f = (np.abs(k / lam0) ** (2 * phi) * np.abs(lam0) ** -2.0
                 * np.exp(2.0 * lamm.real * x))
            val = 2.0 * np.trapezoid(f, k)
            env = np.hypot(1.0, x) ** -(0.5 + phi) * np.exp(rate_b(ns) * x)
            if env == 0.0:
                ratio = 0.0 if val == 0.0 else np.inf
            else:
                ratio = val / env
            worst = max(worst, ratio)
        ratios.append(worst)
    out.append(_finish("b-flat-phi1_16", f"B^(phi={phi:g})(x)",
                       f"C <x>^-{0.5 + phi:g} e^{{b x}}", xs, ratios))
    return out


# ---------------------------------------------------------------------------
# heat-kernel limits of the mean-mode kernels


def check_heat_limits(params: Params, quick: bool = False) -> list[BoundCheck]:
    """The n = 0 kernels approach the heat kernel at the stated rates."""
    xs = _QUICK_XS if quick else _DEFAULT_XS
    out = []

    def diff_builder(parts, m):
        def build(x, k, disp):
            sym = 0.0
            for coef, kid in parts:
                sym = sym + coef * symbol(kid, x, disp)
            return sym * (-1j * k) ** m
        return build

    rows = [
        ("heat-k1-m0-sup", [(1.0, "K1"), (-1.0, "Kc")], 0, np.inf, 2.5, 4.0),
        ("heat-k1-m1-sup", [(1.0, "K1"), (-1.0, "Kc")], 1, np.inf, 3.0, 5.0),
        ("heat-k1-m2-sup", [(1.0, "K1"), (-1.0, "Kc")], 2, np.inf, 3.5, 6.0),
        ("heat-k1-m1-l1", [(1.0, "K1"), (-1.0, "Kc")], 1, 1, 3.0, 4.5),
        # K12|n=0 = -(K1 + K8) approaches -Kc at the same rates
        ("heat-k12-m0-sup", [(1.0, "K12"), (1.0, "Kc")], 0, np.inf, 2.5, 4.0),
        ("heat-k12-m1-sup", [(1.0, "K12"), (1.0, "Kc")], 1, np.inf, 3.0, 5.0),
    ]
    cache = _Profiles()
    for cid, parts, m, p, s1, s2 in rows:
        ratios = []
        key = (tuple(kid for _, kid in parts), m)
        for x in xs:
            y, prof = cache.get(key, diff_builder(parts, m), x, 0.0)
            ratios.append(_lp(y, prof, p) / _env(x, s1, s2))
        name = "+".join(k for _, k in parts[:-1])
        d = f"d_y^{m} " if m else ""
        out.append(_finish(cid, f"||{d}({name} - Kc)(x)||_{_pname(p)}",
                           _env_str(s1, s2), xs, ratios))

    # K2 approaches the derivative of the heat kernel
    ratios = []
    for x in xs:
        def build(xx, k, disp):
            return symbol("K2", xx, disp) - (-1j * k) * symbol("Kc", xx, disp)
        y, prof = cache.get(("K2-dKc", 0), build, x, 0.0)
        ratios.append(_lp(y, prof, np.inf) / _env(x, 3.0, 5.0))
    out.append(_finish("heat-k2-sup", "||(K2 - d_y Kc)(x)||_inf",
                       _env_str(3.0, 5.0), xs, ratios))
    out.extend(_moment_expansion(xs))
    return out


def _moment_expansion(xs) -> list[BoundCheck]:
    """Localized data is propagated like its leading moments.

    For f with moments vanishing through order gamma - 1,

        ||K1(x) f||_inf <= C <x>^{(1+gamma)/2} x^{-1-gamma} || |y|^gamma f ||_1

    (gamma = 1 after subtracting M(f) K1(x, .); gamma = 2 for data with
    zero mass and zero first moment).  Checked on shifted Gaussians.
    """
    out = []
    shifts = (0.0, 1.5, -3.0)
    for gamma, cid in ((1.0, "moment-expansion-g1"), (2.0, "moment-expansion-g2")):
        ratios = []
        for x in xs:
            k, y, half = _grid_for(max(x, 1.0))
            disp = Dispersion.build(k, np.array([0.0]))
            prop = symbol("K1", x, disp)[0]
            phase = np.where(np.arange(k.size) % 2 == 0, 1.0, -1.0)
            worst = 0.0
            for y0 in shifts:
                fhat = np.sqrt(np.pi) * np.exp(-k ** 2 / 4.0 + 1j * k * y0)
                if gamma == 1.0:
                    resid_hat = prop * (fhat - np.sqrt(np.pi))
                    wnorm = _lp(y, np.exp(-(y - y0) ** 2), 1, beta=1.0)
                else:
                    # second y-derivative of the Gaussian: both moments vanish
                    fhat = -k ** 2 * fhat
                    resid_hat = prop * fhat
                    f_phys = np.exp(-(y - y0) ** 2) * (4 * (y - y0) ** 2 - 2)
                    wnorm = _lp(y, f_phys, 1, beta=2.0)
                resid = np.fft.fft(resid_hat * phase) / (2.0 * half)
                env = _env(x, (1 + gamma) / 2.0, 1.0 + gamma) * wnorm
                worst = max(worst, float(np.max(np.abs(resid))) / env)
            ratios.append(worst)
        out.append(_finish(cid,
                           f"||K1(x) f||_inf / || |y|^{gamma:g} f ||_1, "
                           f"moments < {gamma:g} removed",
                           _env_str((1 + gamma) / 2.0, 1.0 + gamma),
                           xs, ratios))
    return out


# ---------------------------------------------------------------------------
# multiplier bounds and operator identities


def check_L_operators(params: Params, quick: bool = False) -> list[BoundCheck]:
    """Static multiplier bounds and exact symbol identities."""
    del quick
    out = []
    k = np.concatenate([-np.geomspace(1e-6, 1e3, 800)[::-1], [0.0],
                        np.geomspace(1e-6, 1e3, 800)])
    s = params.strouhal if params.strouhal else 2.0
    ns = np.array([-5 * s, -2 * s, -s, 0.0, s, 2 * s, 5 * s])
    disp = Dispersion.build(k, ns)
    from .kernels import multiplier
    l1 = np.abs(multiplier("L1", disp))
    l2 = np.abs(multiplier("L2", disp))
    lv = np.abs(multiplier("Lv", disp))
    lu = np.abs(multiplier("Lu_reg", disp))
    n0 = list(ns).index(0.0)
    lu_mean = float(lu[n0].max())
    lu_osc = float(np.delete(lu, n0, axis=0).max())
    # the oscillating arm of the velocity multiplier is bounded only on
    # the mode lattice |nS| >= S; the constant grows like 1 + 1/(2S)
    lu_cap = 1.0 + 1.0 / (2.0 * s)
    for cid, val, cap in [("mult-l1-bound", float(l1.max()), 1.0),
                          ("mult-l2-bound", float(l2.max()), 0.5),
                          ("mult-lv-bound", float(lv.max()), 1.0),
                          ("mult-lu-mean-bound", lu_mean, 1.0),
                          ("mult-lu-osc-bound", lu_osc, lu_cap)]:
        out.append(BoundCheck(check_id=cid, quantity=cid.replace("-", " "),
                              envelope=f"<= {cap:g}", fitted_c=val,
                              margin=cap * 1.0000001 - val,
                              passed=val <= cap * 1.0000001))

    # exact identities on a sample lattice
    xs = np.array([0.3, 1.0, 4.0])
    kk = np.linspace(-6.0, 6.0, 241)
    dd = Dispersion.build(kk, ns)
    ident = []
    for x in xs:
        k2 = symbol("K2", x, dd)
        comb = -1j * kk * (symbol("K1", x, dd) + 2 * symbol("K8", x, dd)
                           + 2 * symbol("K10", x, dd))
        ident.append(np.max(np.abs(k2 - comb)))
        ident.append(np.max(np.abs(symbol("K8", x, dd) + symbol("K10", x, dd)
                                   - dd.lamm * np.exp(dd.lamm * x) / dd.lam0)))
        g = symbol("G", x, dd)
        f = symbol("F", x, dd)
        ident.append(np.max(np.abs(g - (-1j * np.sign(kk)) * f)))
    err = float(np.max(ident))
    out.append(BoundCheck(check_id="symbol-identities",
                          quantity="K2 = d_y(K1+2K8+2K10); K8+K10; G = -i sigma F",
                          envelope="= 0 (1e-12)", fitted_c=err,
                          margin=1e-12 - err, passed=err < 1e-12))
    out.extend(_local_operator_rows(params))
    return out


def _local_operator_rows(params: Params) -> list[BoundCheck]:
    """Exactness, parity, and sampled operator norms of the local terms."""
    from .kernels import multiplier
    from .params import Grid
    from .spectral import to_physical, to_spectral
    from .state import parity_defect

    s = params.strouhal if params.strouhal else 2.0
    grid = Grid(x0=1.0, xmax=10.0, nx=4, L=20.0, ny=256, nt=1)
    disp = Dispersion.for_grid(grid, s)
    l1 = multiplier("L1", disp)
    l2 = multiplier("L2", disp)
    i0 = grid.mode_index(0)
    out = []

    exact = max(float(np.abs(l1[i0] - 1.0).max()), float(np.abs(l2[i0]).max()))
    out.append(BoundCheck(check_id="local-mean-mode-exact",
                          quantity="n=0: L1 = 1 and L2 = 0",
                          envelope="= 0 (1e-14)", fitted_c=exact,
                          margin=1e-14 - exact, passed=exact < 1e-14))

    # L1 preserves y-parity; L2 flips it (its symbol is odd in k, which
    # is also what keeps real fields real under n -> -n conjugation)
    f = np.zeros((grid.nmodes, grid.ny))
    f[:] = np.exp(-((grid.y - 0.0) ** 2) / 4.0) * np.cos(grid.y / 3.0)
    fs = to_spectral(f, grid.L)
    d1 = parity_defect(to_physical(l1 * fs, grid.L), grid, "even")
    d2 = parity_defect(to_physical(l2 * fs, grid.L), grid, "odd")
    par = max(d1, d2)
    out.append(BoundCheck(check_id="local-parity",
                          quantity="L1 even->even, L2 even->odd",
                          envelope="= 0 (1e-12)", fitted_c=par,
                          margin=1e-12 - par, passed=par < 1e-12))

    rng = np.random.default_rng(7)
    worst1 = worst2 = 0.0
    for _ in range(20):
        g = (rng.standard_normal((grid.nmodes, grid.ny))
             + 1j * rng.standard_normal((grid.nmodes, grid.ny)))
        g *= np.exp(-np.abs(grid.k) / 2.0)
        nrm = np.sqrt(np.sum(np.abs(g) ** 2, axis=-1))
        r1 = np.sqrt(np.sum(np.abs((l1 - 1.0) * g) ** 2, axis=-1)) / nrm
        r2 = np.sqrt(np.sum(np.abs(l2 * g) ** 2, axis=-1)) / nrm
        worst1 = max(worst1, float(r1.max()))
        worst2 = max(worst2, float(r2.max()))
    out.append(BoundCheck(check_id="local-l1m1-opnorm",
                          quantity="||(L1-1) f||_2 / ||f||_2, random fields",
                          envelope="<= 1", fitted_c=worst1,
                          margin=1.0 - worst1, passed=worst1 <= 1.0 + 1e-12))
    out.append(BoundCheck(check_id="local-l2-opnorm",
                          quantity="||L2 f||_2 / ||f||_2, random fields",
                          envelope="<= 1/2", fitted_c=worst2,
                          margin=0.5 - worst2, passed=worst2 <= 0.5 + 1e-12))
    return out


def run_all(params: Params, quick: bool = False) -> list[BoundCheck]:
    out = []
    out.extend(check_kernel_norms(params, quick=quick))
    out.extend(check_B_functions(params, quick=quick))
    out.extend(check_heat_limits(params, quick=quick))
    out.extend(check_L_operators(params, quick=quick))
    return out

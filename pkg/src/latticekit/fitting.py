"""Deterministic nonlinear least squares for the decay and cooling models.

A damped Gauss-Newton engine with Marquardt scaling binds the closed-form
models to measured series: (gamma, beta) from N(t) data and the
energy-removal coefficient from T(t) data. Everything is double precision
with a fixed iteration order, so identical inputs give bit-identical fits.
"""

import math
from dataclasses import dataclass, field

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Dataset:
    """Timestamped measurement series; sigma defaults to 1 (unweighted)."""

    t: np.ndarray
    value: np.ndarray
    sigma: np.ndarray | None = None
    kind: str = "population"  # or "temperature"

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.value, dtype=float)
        s = (
            np.ones_like(v)
            if self.sigma is None
            else np.asarray(self.sigma, dtype=float)
        )
        if t.ndim != 1 or t.size != v.size or s.size != v.size:
            raise ValueError("t, value and sigma must be 1-d of equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(v <= 0):
            raise ValueError("values must be positive")
        if np.any(s <= 0):
            raise ValueError("sigmas must be positive")
        if self.kind not in ("population", "temperature"):
            raise ValueError(f"unknown dataset kind {self.kind!r}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "sigma", s)

    def __len__(self):
        return self.t.size


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters with 1-sigma uncertainties and diagnostics."""

    params: dict
    uncertainties: dict
    rss: float
    converged: bool
    iterations: int
    message: str
    model: str
    fixed: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# models and analytic Jacobians

def decay_model(t, gamma, xi, n0):
    """N(t) of the two-channel loss model."""
    u = np.exp(-gamma * np.asarray(t, dtype=float))
    return n0 * u / (1.0 + xi * (1.0 - u))


def decay_jacobian(t, gamma, xi, n0):
    """Columns dN/d(gamma), dN/d(xi), dN/d(n0)."""
    t = np.asarray(t, dtype=float)
    u = np.exp(-gamma * t)
    denom = 1.0 + xi * (1.0 - u)
    d_gamma = -t * u * n0 * (1.0 + xi) / denom**2
    d_xi = -n0 * u * (1.0 - u) / denom**2
    d_n0 = u / denom
    return np.column_stack([d_gamma, d_xi, d_n0])


def cooling_model(t, epsilon_value, xi, gamma, t0):
    u = np.exp(-gamma * np.asarray(t, dtype=float))
    return t0 * (1.0 - epsilon_value * xi * (1.0 - u))


# ---------------------------------------------------------------------------
# damped Gauss-Newton engine

_LAMBDA_INIT = 1e-3
_LAMBDA_GROW = 10.0
_LAMBDA_SHRINK = 0.1
_LAMBDA_MAX = 1e12
_RSS_TOL = 1e-12
_GRAD_TOL = 1e-10


def _levenberg_marquardt(eval_fn, p0, max_iterations=200):
    """Minimize |r(p)|^2 given eval_fn(p) -> (r, J).

    Marquardt-scaled damping: increased tenfold when a step grows the
    residual, reduced tenfold on success. Stops when the relative RSS change
    drops below 1e-12 or the gradient infinity-norm below 1e-10.
    """
    p = np.asarray(p0, dtype=float).copy()
    r, jac = eval_fn(p)
    rss = float(r @ r)
    lam = _LAMBDA_INIT
    message = "maximum iterations reached"
    converged = False
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        jtj = jac.T @ jac
        grad = jac.T @ r
        if np.max(np.abs(grad)) < _GRAD_TOL:
            converged = True
            message = "gradient below tolerance"
            break
        stepped = False
        while lam <= _LAMBDA_MAX:
            damped = jtj + lam * np.diag(np.diag(jtj))
            try:
                delta = np.linalg.solve(damped, -grad)
            except np.linalg.LinAlgError:
                lam *= _LAMBDA_GROW
                continue
            if not np.all(np.isfinite(delta)):
                lam *= _LAMBDA_GROW
                continue
            p_try = p + delta
            r_try, jac_try = eval_fn(p_try)
            rss_try = float(r_try @ r_try)
            if np.isfinite(rss_try) and rss_try <= rss:
                rel_change = abs(rss - rss_try) / max(rss, 1e-300)
                p, r, jac, rss = p_try, r_try, jac_try, rss_try
                lam = max(lam * _LAMBDA_SHRINK, 1e-15)
                stepped = True
                if rel_change < _RSS_TOL:
                    converged = True
                    message = "relative RSS change below tolerance"
                break
            lam *= _LAMBDA_GROW
        if not stepped:
            message = "damping exhausted (singular or stalled step)"
            break
        if converged:
            break

    return p, r, jac, rss, converged, iterations, message


def _covariance(jac, rss, n_points, n_free):
    """Linearized covariance at the optimum, scaled by reduced chi^2."""
    dof = max(n_points - n_free, 1)
    chi2_red = rss / dof
    jtj = jac.T @ jac
    try:
        cov = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(jtj)
    return cov * chi2_red


# ---------------------------------------------------------------------------
# decay fit

def fit_decay(dataset: Dataset, rho_peak_per_cm3, initial_guess,
              max_iterations=200) -> FitResult:
    """Fit (gamma, beta) plus the amplitude N0 to a population series.

    initial_guess is (gamma, beta_cm3_per_s); the internal parameters are
    (gamma, xi, N0) with xi = beta rho_peak / (4 gamma) and the amplitude
    seeded from the first sample. beta and its uncertainty are recovered
    through the fixed rho_peak convention.
    """
    if len(dataset) < 4:
        raise ValueError("need at least 4 points to fit the decay model")
    gamma0, beta0 = initial_guess
    if gamma0 <= 0 or beta0 <= 0:
        raise ValueError("initial guess must be positive")
    xi0 = beta0 * rho_peak_per_cm3 / (4.0 * gamma0)
    p0 = np.array([gamma0, xi0, dataset.value[0]])

    t, y, s = dataset.t, dataset.value, dataset.sigma

    def eval_fn(p):
        gamma, xi, n0 = p
        r = (decay_model(t, gamma, xi, n0) - y) / s
        jac = decay_jacobian(t, gamma, xi, n0) / s[:, None]
        return r, jac

    p, _r, jac, rss, converged, iterations, message = _levenberg_marquardt(
        eval_fn, p0, max_iterations
    )
    gamma, xi, n0 = p
    beta = 4.0 * gamma * xi / rho_peak_per_cm3

    cov = _covariance(jac, rss, len(dataset), 3)
    var_gamma, var_xi, var_n0 = np.diag(cov)
    cov_gx = cov[0, 1]
    # beta = 4 gamma xi / rho: first-order propagation incl. the cross term
    var_beta = (4.0 / rho_peak_per_cm3) ** 2 * (
        xi**2 * var_gamma + gamma**2 * var_xi + 2.0 * gamma * xi * cov_gx
    )
    return FitResult(
        params={
            "gamma_per_s": gamma,
            "beta_cm3_per_s": beta,
            "xi": xi,
            "n0": n0,
        },
        uncertainties={
            "gamma_per_s": math.sqrt(max(var_gamma, 0.0)),
            "beta_cm3_per_s": math.sqrt(max(var_beta, 0.0)),
            "xi": math.sqrt(max(var_xi, 0.0)),
            "n0": math.sqrt(max(var_n0, 0.0)),
        },
        rss=rss,
        converged=converged,
        iterations=iterations,
        message=message,
        model="decay",
        fixed={"rho_peak_per_cm3": rho_peak_per_cm3},
    )


# ---------------------------------------------------------------------------
# energy-removal coefficient fit

def fit_epsilon(dataset: Dataset, xi, gamma_per_s, t0,
                boundary_tol=1e-6) -> FitResult:
    """One-dimensional least squares for the energy-removal coefficient.

    (xi, gamma, T0) stay fixed, mirroring the two-stage procedure of fitting
    the decay first. Golden-section search over (0, 1/xi) followed by the
    exact polish that the linearity of the model permits.
    """
    if len(dataset) < 3:
        raise ValueError("need at least 3 points to fit")
    if xi <= 0:
        raise ValueError("xi must be positive")
    t, y, s = dataset.t, dataset.value, dataset.sigma
    u = np.exp(-gamma_per_s * t)
    a = -t0 * xi * (1.0 - u) / s  # d(model)/d(eps), weighted
    z = (y - t0) / s

    def rss_at(e):
        r = a * e - z
        return float(r @ r)

    lo, hi = 0.0, 1.0 / xi
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = rss_at(x1), rss_at(x2)
    iterations = 0
    while (hi - lo) > 1e-12 and iterations < 300:
        iterations += 1
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = rss_at(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = rss_at(x2)
    eps = 0.5 * (lo + hi)

    # the residual is linear in eps, so the normal equation is exact
    denom = float(a @ a)
    if denom > 0:
        eps_exact = float(a @ z) / denom
        if 0.0 < eps_exact < 1.0 / xi and rss_at(eps_exact) <= rss_at(eps):
            eps = eps_exact
    rss = rss_at(eps)

    span = 1.0 / xi
    at_boundary = eps < boundary_tol * span or eps > (1.0 - boundary_tol) * span
    message = "minimum at domain boundary" if at_boundary else "converged"

    dof = max(len(dataset) - 1, 1)
    var_eps = (rss / dof) / denom if denom > 0 else math.inf
    return FitResult(
        params={"epsilon": eps},
        uncertainties={"epsilon": math.sqrt(var_eps)},
        rss=rss,
        converged=not at_boundary,
        iterations=iterations,
        message=message,
        model="temperature",
        fixed={"xi": xi, "gamma_per_s": gamma_per_s, "t0": t0},
    )


def fit_cooling_joint(dataset: Dataset, initial_guess, t0,
                      max_iterations=200) -> FitResult:
    """Joint fit of the cooling law without fixing the decay parameters.

    epsilon and xi enter the model only through their product, so the
    identifiable parameters are (epsilon_xi, gamma). Offered for
    exploration; the standard procedure keeps (xi, gamma) at the decay-fit
    values and uses fit_epsilon.
    """
    if len(dataset) < 4:
        raise ValueError("need at least 4 points for the joint fit")
    t, y, s = dataset.t, dataset.value, dataset.sigma
    p0 = np.asarray(initial_guess, dtype=float)
    if p0.size != 2:
        raise ValueError("initial guess is (epsilon_xi, gamma)")

    def eval_fn(p):
        eps_xi, gamma = p
        u = np.exp(-gamma * t)
        model = t0 * (1.0 - eps_xi * (1.0 - u))
        r = (model - y) / s
        d_eps_xi = -t0 * (1.0 - u) / s
        d_gamma = -t0 * eps_xi * t * u / s
        return r, np.column_stack([d_eps_xi, d_gamma])

    p, _r, jac, rss, converged, iterations, message = _levenberg_marquardt(
        eval_fn, p0, max_iterations
    )
    cov = _covariance(jac, rss, len(dataset), 2)
    names = ("epsilon_xi", "gamma_per_s")
    return FitResult(
        params=dict(zip(names, p)),
        uncertainties={
            k: math.sqrt(max(v, 0.0)) for k, v in zip(names, np.diag(cov))
        },
        rss=rss,
        converged=converged,
        iterations=iterations,
        message=message,
        model="temperature_joint",
        fixed={"t0": t0},
    )


# ---------------------------------------------------------------------------
# residual bookkeeping

@dataclass(frozen=True)
class ResidualReport:
    residuals: np.ndarray  # weighted, (model - data)/sigma
    rss: float
    chi2_reduced: float
    dof: int


def _model_values(result: FitResult, t):
    if result.model == "decay":
        p = result.params
        return decay_model(t, p["gamma_per_s"], p["xi"], p["n0"])
    if result.model == "temperature":
        f = result.fixed
        return cooling_model(
            t, result.params["epsilon"], f["xi"], f["gamma_per_s"], f["t0"]
        )
    if result.model == "temperature_joint":
        p = result.params
        return cooling_model(
            t, p["epsilon_xi"], 1.0, p["gamma_per_s"], result.fixed["t0"]
        )
    raise ValueError(f"unknown model {result.model!r}")


def residual_report(result: FitResult, dataset: Dataset) -> ResidualReport:
    """Per-point weighted residuals and reduced chi^2 for a finished fit."""
    n_free = len(result.params)
    residuals = (_model_values(result, dataset.t) - dataset.value) / dataset.sigma
    rss = float(residuals @ residuals)
    dof = max(len(dataset) - n_free, 1)
    return ResidualReport(
        residuals=residuals,
        rss=rss,
        chi2_reduced=rss / dof,
        dof=dof,
    )

"""
Nonlinear resolvent ``J_λ f = argmin_g E(g) + ‖g - f‖²_m / (2λ)``.

The prox objective is strongly convex with modulus ``1/λ`` in the m-weighted
norm, so the m-norm of any element of its subdifferential bounds the distance
to the true minimizer by ``λ`` times that norm.  Every strategy reports such a
norm as ``optimality_residual``.
"""
import logging
import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import lsq_linear
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from common.exceptions import DomainMismatchError, InvalidFunctionalError, InvalidParameterError
from common.measure import Fn
from common.utility import lab_setting
from criteria.residuals import _json_float
from functionals.edges import IntervalIndicator
from functionals.energies import FShift, MixedDirichletEnergy, QuadraticForm, ZeroFunctional

logger = logging.getLogger(__name__)

EXACT = 'exact'
INDICATORS = 'projected_exact_for_indicators'
PROXIMAL_GRADIENT = 'proximal_gradient_backtracking'
ADMM = 'admm'
SUBGRADIENT = 'subgradient_diminishing'

STRATEGIES = ('auto', EXACT, INDICATORS, PROXIMAL_GRADIENT, ADMM, SUBGRADIENT)

# ADMM: certificate at EARLY_CHECKS and every CHECK_EVERY iterations, penalty balancing during
# the first BALANCE_UNTIL
EARLY_CHECKS = (5, 10)
CHECK_EVERY = 25
BALANCE_EVERY = 10
BALANCE_UNTIL = 2000
BALANCE_GAP = 10.0
BALANCE_FACTOR = 2.0
POLISH_STEPS = 8
MAX_BACKTRACKS = 100


class SolverConfig:
    """
    Settings of one resolvent solve.

    Args:
        tolerance (float, optional): Target for the optimality residual.
            Defaults to ``SOLVER_TOLERANCE``.
        max_iterations (int, optional): Defaults to ``SOLVER_MAX_ITERATIONS``.
        strategy (str): One of ``STRATEGIES``; ``auto`` picks by the structure
            of the functional.
    """

    def __init__(self, tolerance=None, max_iterations=None, strategy='auto'):
        self.tolerance = float(lab_setting('SOLVER_TOLERANCE', tolerance))
        self.max_iterations = int(lab_setting('SOLVER_MAX_ITERATIONS', max_iterations))
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise InvalidParameterError(f'Solver tolerance must be > 0, got {self.tolerance!r}.')
        if self.max_iterations < 1:
            raise InvalidParameterError(
                f'max_iterations must be >= 1, got {self.max_iterations!r}.')
        if strategy not in STRATEGIES:
            raise InvalidParameterError(f'Unknown solver strategy {strategy!r}.')
        self.strategy = strategy

    def to_dict(self):
        return {'tolerance': self.tolerance, 'max_iterations': self.max_iterations,
                'strategy': self.strategy}

    def __repr__(self):
        return (f'SolverConfig(tolerance={self.tolerance!r}, '
                f'max_iterations={self.max_iterations!r}, strategy={self.strategy!r})')


class ResolventResult:
    """Approximate minimizer of the prox objective with its optimality certificate."""

    def __init__(self, minimizer, objective, optimality_residual, iterations, converged,
                 strategy, lam):
        self.minimizer = minimizer
        self.objective = float(objective)
        self.optimality_residual = float(optimality_residual)
        self.iterations = int(iterations)
        self.converged = bool(converged)
        self.strategy = strategy
        self.lam = float(lam)

    @property
    def distance_bound(self):
        """Upper bound on ``‖minimizer - J_λ f‖_m``."""
        return self.lam * self.optimality_residual

    def to_dict(self):
        return {
            'minimizer': self.minimizer.values.tolist(),
            'objective': _json_float(self.objective),
            'optimality_residual': _json_float(self.optimality_residual),
            'iterations': self.iterations,
            'converged': self.converged,
            'strategy': self.strategy,
            'lambda': self.lam,
        }

    def __repr__(self):
        return (f'ResolventResult(strategy={self.strategy!r}, objective={self.objective!r}, '
                f'residual={self.optimality_residual!r}, converged={self.converged})')


class ProxProblem:
    """``Φ(g) = E(g) + ‖g - f‖²_m / (2λ)`` on value vectors."""

    def __init__(self, E, lam, f):
        self.E = E
        self.lam = lam
        self.f = f.values
        self.m = E.space.weights

    def energy(self, g):
        return float(self.E.evaluate_many(g[None, :])[0])

    def objective(self, g):
        d = g - self.f
        return self.energy(g) + float(np.dot(self.m, d * d)) / (2.0 * self.lam)

    def m_norm(self, v):
        return float(np.sqrt(np.dot(self.m, v * v)))

    def fidelity(self, g):
        """Gradient of the fidelity term in the m-metric."""
        return (g - self.f) / self.lam

    def smooth_residual(self, g):
        with np.errstate(invalid='ignore', over='ignore'):
            r = self.m_norm(self.E.gradient(g) / self.m + self.fidelity(g))
        return r if math.isfinite(r) else math.inf


def edge_energy(E):
    """The edge structure of ``E``: itself for a mixed energy, the explicit shift for an f-shift of one."""
    if isinstance(E, MixedDirichletEnergy):
        return E
    if isinstance(E, FShift) and isinstance(E.base, MixedDirichletEnergy):
        return E.base.explicit_shift(E.center)
    return None


def _is_equality_indicator(function):
    return isinstance(function, IntervalIndicator) and function.c == 0


def select_strategy(E):
    if isinstance(E, ZeroFunctional):
        return EXACT
    edges = edge_energy(E)
    if edges is not None and edges.edges and all(
            _is_equality_indicator(e.function) for e in edges.edges):
        return INDICATORS
    if E.smooth:
        return PROXIMAL_GRADIENT
    if edges is not None:
        return ADMM
    return SUBGRADIENT


def edge_matrix(edges, n):
    """Incidence matrix ``D`` with ``(D g)_e = g(source) - g(target)``."""
    D = np.zeros((len(edges.edges), n))
    for i, e in enumerate(edges.edges):
        D[i, e.source] += 1.0
        D[i, e.target] -= 1.0
    return D


def _subgradient_bounds(functions, t):
    lo = np.empty(len(functions))
    hi = np.empty(len(functions))
    for i, b in enumerate(functions):
        lo[i], hi[i] = b.subdifferential(t[i])
    return lo, hi


def optimality_certificate(problem, D, functions, g, candidates=()):
    """
    m-norm of the smallest element found of ``W⁻¹ Dᵀ y + (g - f)/λ`` over edge
    multipliers ``y`` with ``y_e`` in the subdifferential of ``b_e`` at
    ``t_e``, ``t = D g``.  This is a subgradient of the prox objective at
    ``g`` itself, so it bounds the distance of ``g`` to the minimizer.

    ``candidates`` are clipped into the bounds and tried first; the
    bound-constrained least-squares refinement runs when none of them already
    certifies to rounding level.  Infinite when ``g`` is outside the domain.
    """
    t = D @ g
    lo, hi = _subgradient_bounds(functions, t)
    if np.any(lo > hi) or not np.all(np.isfinite(t)):
        return math.inf, None
    target = problem.fidelity(g)
    m = problem.m

    def residual(y):
        return problem.m_norm(D.T @ y / m + target)

    best, best_y = math.inf, None
    for y in candidates:
        if y is None:
            continue
        y = np.clip(y, lo, hi)
        r = residual(y)
        if r < best:
            best, best_y = r, y
    if best <= 1e-14:
        return best, best_y

    fixed = lo == hi
    y = np.where(fixed, lo, 0.0)
    sqrt_m = np.sqrt(m)
    A = D.T / sqrt_m[:, None]
    rhs = -sqrt_m * target - A[:, fixed] @ y[fixed]
    free = ~fixed
    refined = [y]
    if np.any(free):
        unconstrained = y.copy()
        unconstrained[free] = np.linalg.lstsq(A[:, free], rhs, rcond=None)[0]
        bounded = y.copy()
        bounded[free] = lsq_linear(A[:, free], rhs, bounds=(lo[free], hi[free]),
                                   lsq_solver='exact', tol=1e-14).x
        refined = [unconstrained, bounded]
    for y in refined:
        y = np.clip(y, lo, hi)
        r = residual(y)
        if r < best:
            best, best_y = r, y
    return best, best_y


def quadratic_resolvent(E, lam, f):
    """Direct solve of ``(2M + W/λ) g = W f / λ`` for a quadratic form."""
    if not isinstance(E, QuadraticForm):
        raise InvalidFunctionalError('The linear-system resolvent needs a quadratic form.')
    w = E.space.weights
    A = 2.0 * E.matrix + np.diag(w / lam)
    return E.space.function(np.linalg.solve(A, w * f.values / lam))


def _solve_exact(problem, cfg):
    E = problem.E
    if isinstance(E, ZeroFunctional):
        return problem.f.copy(), 0, 0.0
    if isinstance(E, QuadraticForm):
        g = quadratic_resolvent(E, problem.lam, E.space.function(problem.f)).values
        return g, 0, problem.smooth_residual(g)
    raise InvalidParameterError(
        f'The exact strategy handles zero and quadratic functionals, not {E.type!r}.')


def _solve_indicator_projection(problem, cfg):
    """Weighted mean of f over each component of the forced-equality graph."""
    edges = edge_energy(problem.E)
    if edges is None or not all(_is_equality_indicator(e.function) for e in edges.edges):
        raise InvalidParameterError(
            'The projected strategy needs a mixed energy of interval_indicator(0) edges.')
    n = len(problem.f)
    sources = [e.source for e in edges.edges]
    targets = [e.target for e in edges.edges]
    graph = coo_matrix((np.ones(len(sources)), (sources, targets)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    m = problem.m
    means = np.bincount(labels, weights=m * problem.f) / np.bincount(labels, weights=m)
    g = means[labels]
    D = edge_matrix(edges, n)
    residual, _ = optimality_certificate(problem, D, [e.function for e in edges.edges], g)
    return g, 1, residual


def _solve_proximal_gradient(problem, cfg):
    """
    Accelerated proximal gradient in the m-metric: gradient step on ``E``,
    exact prox of the fidelity term, backtracking on the Lipschitz estimate and
    a momentum restart whenever the objective goes up.
    """
    E, f, m, lam = problem.E, problem.f, problem.m, problem.lam
    x = f.copy()
    y = x.copy()
    t = 1.0
    L = 1.0
    phi_x = problem.objective(x)
    residual = problem.smooth_residual(x)
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        if residual <= cfg.tolerance:
            break
        grad = E.gradient(y) / m
        energy_y = problem.energy(y)
        for _ in range(MAX_BACKTRACKS):
            v = y - grad / L
            x_new = (f / lam + L * v) / (1.0 / lam + L)
            d = x_new - y
            model = energy_y + np.dot(m, grad * d) + L / 2.0 * np.dot(m, d * d)
            if problem.energy(x_new) <= model + 1e-14 * max(1.0, abs(energy_y)):
                break
            L *= 2.0
        phi_new = problem.objective(x_new)
        if phi_new > phi_x and t > 1.0:
            y = x.copy()
            t = 1.0
            continue
        t_new = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, t, phi_x = x_new, t_new, phi_new
        L /= 1.25
        residual = problem.smooth_residual(x)
    return x, iterations, residual


def _edge_prox(functions, v, tau):
    return np.array([b.prox(v_i, tau) for b, v_i in zip(functions, v)])


def _kink_targets(functions, t):
    """Edges whose difference sits at a kink of their edge function, with that kink."""
    active, kinks = [], []
    for i, b in enumerate(functions):
        for kappa in b.kinks:
            if abs(t[i] - kappa) <= 1e-9 * max(1.0, abs(kappa)):
                active.append(i)
                kinks.append(kappa)
                break
    return np.array(active, dtype=int), np.array(kinks, dtype=float)


def _curvature(b, t):
    h = 1e-6 * max(1.0, abs(t))
    with np.errstate(invalid='ignore', over='ignore'):
        c = (b.derivative(t + h) - b.derivative(t - h)) / (2.0 * h)
    return c if math.isfinite(c) and c > 0 else 0.0


def _polish(problem, D, functions, g, z):
    """
    Newton steps on the local model: edges at a kink are held there as
    equality constraints, the others use their derivative and a finite
    difference curvature.  Returns the polished point and its multipliers.
    """
    n, k = D.shape[1], D.shape[0]
    m, f, lam = problem.m, problem.f, problem.lam
    active, kinks = _kink_targets(functions, z)
    free = np.setdiff1d(np.arange(k), active)
    D_A, D_N = D[active], D[free]
    y = np.zeros(k)
    for _ in range(POLISH_STEPS):
        t = D @ g
        d1 = np.array([functions[i].derivative(t[i]) for i in free])
        d2 = np.array([_curvature(functions[i], t[i]) for i in free])
        if not np.all(np.isfinite(d1)):
            return None, None
        H = np.diag(m / lam) + D_N.T @ (d2[:, None] * D_N)
        rhs = m * f / lam - D_N.T @ (d1 - d2 * t[free])
        K = np.block([[H, D_A.T], [D_A, np.zeros((len(active), len(active)))]])
        solution = np.linalg.lstsq(K, np.concatenate([rhs, kinks]), rcond=None)[0]
        g_new = solution[:n]
        y[active] = solution[n:]
        step = np.max(np.abs(g_new - g), initial=0.0)
        g = g_new
        if step <= 1e-14 * max(1.0, np.max(np.abs(g), initial=0.0)):
            break
    t = D @ g
    y[free] = [functions[i].derivative(t[i]) for i in free]
    return g, y


def _solve_admm(problem, cfg):
    """
    ADMM on the splitting ``z = D g``: a factored linear solve for ``g``, the
    exact edge proximal maps for ``z``, penalty balancing on the primal and
    dual residuals, and an active-set polish whenever the certificate is checked.
    """
    edges = edge_energy(problem.E)
    if edges is None:
        raise InvalidParameterError('The admm strategy needs an edge-structured functional.')
    m, f, lam = problem.m, problem.f, problem.lam
    n = len(f)
    functions = [e.function for e in edges.edges]
    if not functions:
        return f.copy(), 0, 0.0
    D = edge_matrix(edges, n)
    DtD = D.T @ D
    rho = float(np.mean(m)) / lam

    def factor(rho):
        return cho_factor(np.diag(m / lam) + rho * DtD)

    factored = factor(rho)
    g = f.copy()
    z = D @ g
    u = np.zeros(len(functions))
    has_indicator = any(isinstance(b, IntervalIndicator) for b in functions)
    primal_target = cfg.tolerance
    if has_indicator:
        primal_target = min(primal_target, 0.1 * lab_setting('FEASIBILITY_ATOL'))

    best_g, best_residual = g, math.inf
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        g = cho_solve(factored, m * f / lam + rho * D.T @ (z - u))
        Dg = D @ g
        z_old = z
        z = _edge_prox(functions, Dg + u, 1.0 / rho)
        r = Dg - z
        u = u + r
        primal = float(np.max(np.abs(r)))
        dual = rho * float(np.max(np.abs(D.T @ (z - z_old))))

        if iterations in EARLY_CHECKS or iterations % CHECK_EVERY == 0 \
                or (primal <= primal_target and dual <= cfg.tolerance):
            residual, _ = optimality_certificate(problem, D, functions, g, [rho * u])
            if residual < best_residual and math.isfinite(problem.objective(g)):
                best_g, best_residual = g, residual
            if best_residual > cfg.tolerance:
                polished, y = _polish(problem, D, functions, g, z)
                if polished is not None and math.isfinite(problem.objective(polished)):
                    residual, _ = optimality_certificate(problem, D, functions, polished,
                                                         [y, rho * u])
                    if residual < best_residual:
                        best_g, best_residual = polished, residual
            if best_residual <= cfg.tolerance:
                break

        if iterations < BALANCE_UNTIL and iterations % BALANCE_EVERY == 0:
            if primal > BALANCE_GAP * dual:
                rho *= BALANCE_FACTOR
                u /= BALANCE_FACTOR
                factored = factor(rho)
            elif dual > BALANCE_GAP * primal:
                rho /= BALANCE_FACTOR
                u *= BALANCE_FACTOR
                factored = factor(rho)
    return best_g, iterations, best_residual


def _solve_subgradient(problem, cfg):
    """Subgradient steps ``λ/(k+1)`` on the prox objective, keeping the best iterate."""
    E, m, lam = problem.E, problem.m, problem.lam
    g = problem.f.copy()
    best_g, best_phi = g, problem.objective(g)
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        with np.errstate(invalid='ignore', over='ignore'):
            xi = E.gradient(g) / m + problem.fidelity(g)
        if not np.all(np.isfinite(xi)) or problem.m_norm(xi) <= cfg.tolerance:
            break
        g = g - lam / iterations * xi
        phi = problem.objective(g)
        if phi < best_phi:
            best_g, best_phi = g, phi
    return best_g, iterations, problem.smooth_residual(best_g)


SOLVERS = {
    EXACT: _solve_exact,
    INDICATORS: _solve_indicator_projection,
    PROXIMAL_GRADIENT: _solve_proximal_gradient,
    ADMM: _solve_admm,
    SUBGRADIENT: _solve_subgradient,
}


def resolvent(E, lam, f, cfg=None):
    """
    Approximate ``J_λ f``, starting from ``g = f``.

    Args:
        E (EnergyFunctional): Convex functional.
        lam (float): Step ``λ > 0``.
        f (Fn): Center on ``E``'s space.
        cfg (SolverConfig, optional): Defaults to ``SolverConfig()``.

    Returns:
        ResolventResult: ``converged`` is False (and a warning logged) when the
        residual did not reach the tolerance within ``max_iterations``.

    Raises:
        InvalidFunctionalError: If ``E`` is not convex.
        InvalidParameterError: If ``λ <= 0`` or the strategy does not fit ``E``.
        DomainMismatchError: If ``f`` is not on ``E``'s space.
    """
    cfg = cfg or SolverConfig()
    lam = float(lam)
    if not (lam > 0 and math.isfinite(lam)):
        raise InvalidParameterError(f'The resolvent needs λ > 0, got {lam!r}.')
    if not isinstance(f, Fn) or f.space != E.space:
        raise DomainMismatchError('Function does not live on the functional\'s space.')
    if not E.convex:
        raise InvalidFunctionalError('The resolvent needs a convex functional.', code='not_convex')

    strategy = select_strategy(E) if cfg.strategy == 'auto' else cfg.strategy
    problem = ProxProblem(E, lam, f)
    g, iterations, residual = SOLVERS[strategy](problem, cfg)
    objective = problem.objective(g)
    converged = residual <= cfg.tolerance and math.isfinite(objective)
    if not converged:
        logger.warning('Resolvent (%s, λ=%g) stopped after %d iterations with residual %g.',
                       strategy, lam, iterations, residual)
    else:
        logger.debug('Resolvent (%s, λ=%g) converged in %d iterations, residual %g.',
                     strategy, lam, iterations, residual)
    return ResolventResult(E.space.function(g), objective, residual, iterations, converged,
                           strategy, lam)

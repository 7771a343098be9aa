"""
Discrete probability measures and the Kantorovich metric
Primal (optimal coupling) and dual (optimal short potential) linear programs
solved with HiGHS, plus pushforwards along point maps
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from utils.errors import ArgumentError, LabError, ValidationError
from utils.metric_core import FiniteMetricSpace, PointMap

logger = logging.getLogger(__name__)

# Float dust allowed in the total mass before a measure is rejected
MASS_TOL = 1e-12
DUALITY_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finitely supported probability measure, one weight per point of the space"""
    space: FiniteMetricSpace
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if len(w) != self.space.size:
            raise ValidationError(f"{len(w)} weights for a {self.space.size}-point space")
        if not np.isfinite(w).all():
            raise ValidationError("weights must be finite")
        if (w < -MASS_TOL).any():
            raise ValidationError(f"negative weight {w.min()}")
        w = np.clip(w, 0.0, None)
        total = w.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", w / total)

    @classmethod
    def dirac(cls, space, index):
        w = np.zeros(space.size)
        w[index] = 1.0
        return cls(space, w)

    @property
    def support(self):
        return np.flatnonzero(self.weights > 0)

    def to_dict(self):
        return {"space": self.space.name, "weights": self.weights.tolist()}


def dirac(space, index):
    """The Dirac measure at a point"""
    return DiscreteMeasure.dirac(space, index)


@dataclass(frozen=True)
class TransportPlan:
    coupling: np.ndarray
    cost: float


@dataclass(frozen=True)
class DualPotential:
    phi: np.ndarray
    value: float


@dataclass(frozen=True)
class KantorovichResult:
    value: float
    plan: TransportPlan
    potential: DualPotential

    @property
    def gap(self):
        return abs(self.plan.cost - self.potential.value)

    def __iter__(self):
        return iter((self.value, self.plan, self.potential))

    def to_dict(self):
        return {
            "value": self.value,
            "cost": self.plan.cost,
            "dual_value": self.potential.value,
            "coupling": self.plan.coupling.tolist(),
            "phi": self.potential.phi.tolist(),
        }


def _check_same_space(mu, nu):
    if not mu.space.same_as(nu.space):
        raise ArgumentError("measures live on different spaces")


def solve_lp(c, **kwargs):
    res = linprog(c, method="highs", **kwargs)
    if res.status != 0:
        raise LabError(f"linear program failed: {res.message}")
    return res


def _primal(dist, mu, nu):
    rows = mu.support
    cols = nu.support
    cost = dist[np.ix_(rows, cols)]
    s, t = cost.shape
    # row sums then column sums; the last column constraint is implied by the others
    a_rows = sparse.kron(sparse.identity(s), np.ones((1, t)))
    a_cols = sparse.kron(np.ones((1, s)), sparse.identity(t))
    a_eq = sparse.vstack([a_rows, a_cols]).tocsr()[: s + t - 1]
    b_eq = np.concatenate([mu.weights[rows], nu.weights[cols]])[: s + t - 1]
    res = solve_lp(cost.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None))

    coupling = np.zeros((mu.space.size, mu.space.size))
    coupling[np.ix_(rows, cols)] = np.clip(res.x.reshape(s, t), 0.0, None)
    return TransportPlan(coupling=coupling, cost=float((coupling * dist).sum()))


def _dual(dist, mu, nu):
    support = np.union1d(mu.support, nu.support)
    u = len(support)
    signed = (mu.weights - nu.weights)[support]
    if u == 1:
        phi_u = np.zeros(1)
    else:
        # phi_a - phi_b <= d(a, b) over ordered pairs a != b
        a_idx, b_idx = np.nonzero(~np.eye(u, dtype=bool))
        m = len(a_idx)
        a_ub = sparse.csr_matrix(
            (np.concatenate([np.ones(m), -np.ones(m)]),
             (np.concatenate([np.arange(m), np.arange(m)]), np.concatenate([a_idx, b_idx]))),
            shape=(m, u),
        )
        b_ub = dist[np.ix_(support, support)][a_idx, b_idx]
        bounds = [(0.0, 0.0)] + [(None, None)] * (u - 1)
        res = solve_lp(-signed, A_ub=a_ub, b_ub=b_ub, bounds=bounds)
        phi_u = res.x

    # McShane extension keeps phi short on the whole space
    phi = (phi_u[:, None] + dist[support, :]).min(axis=0)
    phi[support] = phi_u
    value = abs(float(phi @ (mu.weights - nu.weights)))
    return DualPotential(phi=phi, value=value)


def kantorovich(mu, nu):
    """
    Kantorovich distance between two measures on the same space

    Returns:
        KantorovichResult with the primal value, the optimal coupling and an
        optimal short potential; the two values agree within DUALITY_TOL
    """
    _check_same_space(mu, nu)
    dist = mu.space.dist
    plan = _primal(dist, mu, nu)
    potential = _dual(dist, mu, nu)
    if abs(plan.cost - potential.value) > DUALITY_TOL:
        logger.warning(
            "duality gap %.3e between primal %.12g and dual %.12g",
            abs(plan.cost - potential.value), plan.cost, potential.value,
        )
    return KantorovichResult(value=plan.cost, plan=plan, potential=potential)


def pushforward(f: PointMap, mu: DiscreteMeasure):
    """Image measure: each target point collects the mass of its fiber"""
    if not mu.space.same_as(f.source):
        raise ArgumentError("measure does not live on the source of the map")
    weights = np.bincount(
        np.asarray(f.assignment, dtype=int), weights=mu.weights, minlength=f.target.size
    )
    return DiscreteMeasure(f.target, weights)

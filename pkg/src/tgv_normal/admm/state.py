"""Solver configuration and iterate state."""

from dataclasses import dataclass, field, replace

import numpy as np

from ..mesh import mean_edge_length
from ..trt import TrtField


@dataclass(frozen=True)
class SolverConfig:
    """Weights, penalties and budgets of the ADMM denoiser.

    In TV mode the field ``W`` stays zero, only the edge split ``d0`` is
    used and ``beta`` takes the place of ``alpha1``.
    """

    alpha0: float = 3e-5
    alpha1: float = 3.5e-3
    beta: float = 0.0
    tv_mode: bool = False
    rho0: float = 1.0
    rho1: float = 1.0
    rho2: float = 1.0
    tau: float = 1e-12
    max_outer_iters: int = 300
    newton_steps_per_outer: int = 3
    cg_tol: float = 1e-10
    cg_max_iters: int | None = None  # default 10 * (2 * edge count)
    primal_tol: float | None = None  # default 1e-6 * mean edge length
    reject_antipodal: bool = True
    newton_cg_max_iters: int = 30
    armijo_c: float = 1e-4
    max_halvings: int = 30

    def __post_init__(self):
        if min(self.rho0, self.rho1, self.rho2) <= 0:
            raise ValueError("penalty parameters must be positive")
        if min(self.alpha0, self.alpha1, self.beta, self.tau) < 0:
            raise ValueError("weights must be nonnegative")
        if self.max_outer_iters < 0 or self.newton_steps_per_outer < 0:
            raise ValueError("iteration budgets must be nonnegative")
        if self.cg_tol <= 0:
            raise ValueError("cg_tol must be positive")

    @property
    def edge_weight(self):
        """Weight of the first-order edge term: ``beta`` in TV mode."""
        return self.beta if self.tv_mode else self.alpha1

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(eq=False)
class AdmmState:
    """Split variables, multipliers, ``W`` and the current mesh.

    ``D1``/``Lambda1`` live in the tangent spaces of the triangle normals,
    ``d2``/``lambda2`` (endpoint values ``X_{E,1}, X_{E,2}``) in those of
    ``n+``.
    """

    mesh: object
    W: TrtField
    d0: np.ndarray
    D1: np.ndarray
    d2: np.ndarray
    lambda0: np.ndarray
    Lambda1: np.ndarray
    lambda2: np.ndarray
    iteration: int = 0
    extra: dict = field(default_factory=dict)

    @classmethod
    def initial(cls, mesh):
        E, F = mesh.n_edges, mesh.n_triangles
        return cls(
            mesh=mesh,
            W=TrtField.zeros(mesh),
            d0=np.zeros(E),
            D1=np.zeros((F, 3, 3, 3)),
            d2=np.zeros((E, 2, 3)),
            lambda0=np.zeros(E),
            Lambda1=np.zeros((F, 3, 3, 3)),
            lambda2=np.zeros((E, 2, 3)),
        )

    def copy(self, **changes):
        return replace(self, **changes)


# Multipliers of the mean edge length h in ``scaled_penalties``; picked on
# the synthetic hemisphere/cylinder benchmarks.
DEFAULT_PENALTY_KAPPA = (3.0, 30.0, 30.0)


def scaled_penalties(mesh_or_h, kappa=DEFAULT_PENALTY_KAPPA):
    """Penalties ``rho0 = k0 h, rho1 = k1 h^4, rho2 = k2 h^3``.

    The powers balance each penalty Hessian against the fidelity Hessian
    (one per vertex) under uniform scaling of the mesh.  ``mesh_or_h`` is a
    mesh or a mean edge length.
    """
    h = float(mesh_or_h) if np.isscalar(mesh_or_h) else mean_edge_length(mesh_or_h)
    if h <= 0:
        raise ValueError("edge length scale must be positive")
    k0, k1, k2 = kappa
    return {"rho0": k0 * h, "rho1": k1 * h**4, "rho2": k2 * h**3}

"""Transfer operators, dynamical zeta functions and resonances of
infinite-covolume Hecke triangle surfaces.

The package computes the slow and fast transfer operators of the group
generated by z -> z + lam (lam > 2) and z -> -1/z, represents the
Selberg zeta function as the Fredholm determinant of the truncated fast
operator, locates its zeros (the resonances), reconstructs and
classifies period functions from operator eigenvectors, and verifies
the cocycle and boundary-pairing identities numerically at desk scale.
"""

from .errors import (
    BoundaryPointError,
    BranchCutError,
    ConvergenceError,
    DomainError,
    ExceptionalPointError,
    OrdinaryPointError,
    PoleError,
    ResonanceLabError,
    ResourceGuardError,
)
from .moebius import (
    GroupElement,
    HyperbolicClass,
    classify,
    element_from_word,
    enumerate_classes,
    fixed_points_ts,
    geodesic_length,
    hecke_generators,
    moebius_apply,
)
from .spaces import CyclicInterval, PairFunction, ScalarFunc, tau_action, taylor_eval
from .specfun import ZetaEngine, branched_power_eval, hurwitz_zeta, pochhammer_binomial, riemann_zeta
from .slowop import (
    AverageRequest,
    extend_period_function,
    one_sided_average,
    slow_apply,
    slow_parity_apply,
)
from .fastop import OperatorMatrix, assemble_matrix, fast_apply, reduced_apply
from .flow import (
    DiscreteState,
    periodic_points,
    pressure_delta,
    step,
    transfer_consistency,
)
from .zeta import (
    Resonance,
    delta_bisection,
    euler_product,
    find_resonances,
    fredholm_det,
    trace_identity_check,
)
from .periods import (
    PeriodFunction,
    boundary_pair,
    classify_period,
    perron_eigenvector,
    reconstruct_period,
    unit_eigenvector,
)
from .cocycles import Cocycle, PiecewiseSection, XiPoint, build_cocycle, verify_cocycle
from .eisenstein import (
    ContourPath,
    EisensteinModel,
    cocycle_cu,
    cusp_fourier_classify,
    funnel_core_identity,
    greens_form_integral,
)

__version__ = "0.1.0"

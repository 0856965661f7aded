"""Timelike minimal surfaces in Lorentz-Minkowski space from bicomplex Weierstrass data."""

from .algebra import (
    BicomplexNumber,
    GaussianRational,
    IdempotentPair,
    NotInSplitPlane,
    SplitComplexNumber,
    from_idempotent,
    is_zero_divisor,
    split_norm_sq,
    split_restrict,
    star,
    to_idempotent,
)
from .analysis import (
    EndDescriptor,
    NotSimpleEnd,
    SingularCurve,
    UnclassifiableEnd,
    asymptotic_residual,
    branch_points,
    check_compactness,
    classify_end,
    extract_singular_set,
)
from .period import (
    BicomplexWeierstrass,
    EmptyNullspace,
    NotConjugateSymmetric,
    OrderMismatch,
    PeriodSystem,
    PeriodViolation,
    WeierstrassPair,
    assemble_bicomplex,
    augment_weak_complete,
    build_alpha,
    check_period,
    choose_solution,
    solve_factor,
    solve_period_system,
)
from .ratfunc import (
    DivisionByZeroFunction,
    IrrationalPole,
    PartialFractions,
    Polynomial,
    RationalFunction,
    is_conjugate_symmetric,
    partial_fractions,
    poles_with_orders,
    rat_arith,
    residue_at,
    residue_at_infinity,
)
from .surface import (
    ClosedFormIntegral,
    ComplexResidue,
    LightConeHit,
    MetricSample,
    PoleHit,
    SurfaceModel,
    antiderivative,
    build_surface,
    eval_maximal,
    eval_real_part,
    eval_timelike,
    metrics_at,
)

__version__ = "0.1.0"

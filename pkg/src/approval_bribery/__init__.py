"""Bribery in multiwinner approval elections with candidate- or voter-interval structure."""

from .core import (
    FORBIDDEN,
    BriberyInstance,
    BriberyPlan,
    CostModel,
    DomainKind,
    DomainWitness,
    Election,
    Mode,
    OpKind,
    SolveOutcome,
    UnitOperation,
    VerificationReport,
    apply_plan,
    approval_score,
    can_join_winning_committee,
    plan_cost,
    verify_solution,
)
from .errors import (
    BriberyError,
    FormatError,
    FormatSemanticError,
    FormatSyntaxError,
    InputError,
    PlanError,
    ResourceError,
)
from .poly_solvers import (
    solve_add_ci,
    solve_add_vi,
    solve_del_vi,
    solve_swap_to_p_ci,
    solve_swap_to_p_vi,
)
from .structure import recognize_ci, recognize_vi, validate, validate_ci, validate_vi

__version__ = "0.1.0"

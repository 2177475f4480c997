"""Exact tightest constants for A-infinity type conditions on finite atomic spaces."""
from .conditions import (
    CONDITIONS,
    ConditionParams,
    ConstantReport,
    Witness,
    eval_p1,
    eval_p1_prime,
    eval_p2,
    eval_p2_prime,
    eval_p3,
    eval_p3_prime,
    eval_p4,
    eval_p4_prime,
    eval_p5,
    eval_p6,
    eval_p7,
    eval_p8,
    evaluate,
    make_params,
    witness_value,
)
from .documents import parse_instance, serialize_instance
from .errors import (
    AinftyError,
    InvalidSet,
    ParameterError,
    ProfileError,
    StrategyInfeasible,
    UncoveredAtom,
    ValidationError,
    ZeroWeightBase,
)
from .families import FamilySpec, LiftedInstance, lift, make_family, tau, tau_inverse, tau_layout
from .measure import Atom, BaseRef, Instance, as_rational, average, integral, maximal_function, measure_of, median
from .relations import (
    FamilyProfile,
    GrowthVerdict,
    RelationEntry,
    check_table,
    classify_growth,
    family_profile,
    lookup,
    registry,
)
from .subsets import Objective, extremal_subset

__version__ = "0.1.0"

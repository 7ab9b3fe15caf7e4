"""Exact joint survival signatures for coherent systems with shared components."""

from .errors import *  # noqa: F401,F403
from .lifetimes import (
    EmpiricalCdf,
    Exponential,
    Weibull,
    cdf,
    count_kernel_single,
    count_kernel_three,
    count_kernel_two,
    count_kernel_two_multitype,
)
from .model import GroupCounts, SharedModel, build_model, group_counts
from .oracle import (
    estimate_joint_survival,
    exhaustive_signature,
    simulate_failure_times,
)
from .reliability import (
    conditional_joint_survival,
    conditional_survival_given_failed,
    conditional_survival_given_functioning,
    joint_survival_three,
    joint_survival_two,
    marginal_survival,
    marginal_survival_via_single,
)
from .signature import (
    EARLIER,
    LATER,
    SAME,
    Event,
    Order,
    SignatureTable,
    joint_signature,
    joint_signature_three,
    joint_signature_two,
    joint_signature_two_multitype,
    signature_bounds,
    survival_signature_single,
    system_signature,
    variant_signature,
)
from .structure import (
    And,
    Atom,
    KofN,
    Or,
    TruthTable,
    evaluate,
    minimal_path_sets,
    verify_coherent,
)

__version__ = "0.1.0"

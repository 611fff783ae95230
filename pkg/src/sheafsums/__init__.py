"""Trace functions, exponential sums and effective complexity bounds for
sheaf expressions over finite fields.

The public surface, by area:

* `ffield`     -- F_p / F_{p^k} arithmetic, trace, norm, discrete logs
* `characters` -- additive and multiplicative characters with complex values
* `expr` / `grammar` -- the sheaf-expression DSL and its text syntax
* `sums`       -- complete sums, power sums, L-recurrence fits, Gowers norms
* `curves`     -- rank/drop/Swan invariants, Euler characteristics, conductors
* `bounds`     -- the effective complexity-bound calculus with trails
* `equidist`   -- polynomial families, moment reports, Haar-measure oracles
"""

from .bounds import ComplexityBound, katz_bound, morphism_bound, propagate, tensor_constant
from .characters import AdditiveCharacter, MultiplicativeCharacter, eval_additive, eval_multiplicative
from .config import RunConfig, load_config
from .curves import (
    Curve,
    CurveSheafInvariants,
    as_invariants,
    curve_complexity,
    fkm_conductor,
    gos_chi,
    kummer_invariants,
)
from .errors import (
    AmbientMismatch,
    BadOrder,
    BadParams,
    BudgetExceeded,
    MissingData,
    NegativityViolation,
    NotPrime,
    ParseError,
    SheafsumsError,
    Unstable,
    UnsupportedDimension,
    WeightError,
    WrongAmbient,
    ZeroArgument,
)
from .expr import AS, Conj, Const, Dual, ExternalProduct, Fourier, Kummer, PushCompact, Shift, Tensor, Twist
from .expr import eval_trace, eval_trace_extension
from .ffield import ExtField, FieldElement, FieldTower, PrimeField, discrete_log, make_extension, make_prime_field, trace_to_prime
from .grammar import parse_expr
from .rational import MPoly, RationalMap
from .sums import (
    LPolynomialEstimate,
    SumResult,
    complete_sum,
    fit_l_polynomial,
    fourier_table,
    gowers_norm,
    inner_product,
    power_sums,
    trace_table,
)

__version__ = "0.1.0"

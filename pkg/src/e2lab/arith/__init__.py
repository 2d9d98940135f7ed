"""Exact integer arithmetic: primes, factorizations, continued fractions."""
from .cf import (
    E,
    NAMED,
    PHI,
    SQRT2,
    ContinuedFraction,
    Convergent,
    IntervalReal,
    Irrational,
    QuadraticSurd,
    certify_distance_bound,
    convergents,
    convergents_in_range,
    distance_interval,
    nearest_int_distance,
)
from .factor import (
    Factorization,
    big_omega,
    divisor_count,
    factorize,
    is_e2,
    mod_inverse,
    mod_inverse_array,
)
from .primes import (
    is_prime,
    is_prime_array,
    omega2_mask,
    prime_mask_range,
    primes_in_range,
    sieve_segment,
    simple_sieve,
    varpi,
    varpi_range,
)

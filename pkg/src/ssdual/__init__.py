"""Strong stationary duality on partially ordered state spaces."""

from .analysis import (
    cutoff_experiment,
    gumbel_cdf,
    sep_profile,
    simulate_coupon_T,
    tv_profile,
    verify_sharp_pair,
)
from .coupon import CouponParams, antidual_product, antidual_uniform, coupon_chain, cube_walk
from .duality import antidual, build_link, mobius_monotone, ssd, verify_duality
from .fsst import GeometricMixture, fsst_chain, hypercube_pair, mixture_tail, pure_chain
from .markov import Chain, absorption_tail, classify, stationary
from .numerics import RatMatrix
from .poset import Poset, product_lattice, total_order, validate

__version__ = "0.1.0"

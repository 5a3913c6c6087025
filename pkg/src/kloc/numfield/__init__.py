from .field import NumberField, Order, new_field, rational_field
from .poly import format_poly, parse_poly
from .ideals import (IdealHNF, PrimeIdealFactor, apply_map, element_valuation, factor_rational_prime,
                     ideal_add, ideal_from_generators, ideal_inverse, ideal_mul, ideal_norm, ideal_pow,
                     ideal_scale, ideal_valuation, p_times_inverse, principal_ideal, unit_ideal)
from .principal import UnitLattice, is_principal, log_vector, unit_lattice
from .autom import FieldAutomorphism, automorphisms, compose_mod, roots_in_field

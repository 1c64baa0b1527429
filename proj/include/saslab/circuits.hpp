#pragma once

#include "saslab/netlist.hpp"

namespace saslab {

/**
 * Unsigned array multiplier built from AND partial products and ripple-carry
 * adders. Inputs a<i> (i = a_bits-1 .. 0) then b<j>, most significant first;
 * outputs p<k> from the most significant down to p0.
 */
Circuit array_multiplier(unsigned a_bits, unsigned b_bits);

} // namespace saslab

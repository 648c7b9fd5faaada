#pragma once

// Umbrella header: the full toolkit.

#include "nlrs/algebraic.hpp"
#include "nlrs/binet.hpp"
#include "nlrs/common_terms.hpp"
#include "nlrs/complexe.hpp"
#include "nlrs/contfrac.hpp"
#include "nlrs/diophantine.hpp"
#include "nlrs/errors.hpp"
#include "nlrs/expr.hpp"
#include "nlrs/json_io.hpp"
#include "nlrs/policy.hpp"
#include "nlrs/polynomial.hpp"
#include "nlrs/rational.hpp"
#include "nlrs/real.hpp"
#include "nlrs/refine.hpp"
#include "nlrs/roots.hpp"
#include "nlrs/sequences.hpp"

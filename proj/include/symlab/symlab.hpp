#pragma once

#include "symlab/banach_limit.hpp"
#include "symlab/error.hpp"
#include "symlab/flows.hpp"
#include "symlab/geometry2d.hpp"
#include "symlab/hyperbolic_measure.hpp"
#include "symlab/interval_set.hpp"
#include "symlab/koopman.hpp"
#include "symlab/number.hpp"
#include "symlab/ring.hpp"
#include "symlab/serialization.hpp"
#include "symlab/symplectic_measure.hpp"

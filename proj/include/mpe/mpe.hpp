#pragma once

// =============================================================================
// Umbrella header for the multi-product extrapolation library.
// =============================================================================

#include "mpe/errors.hpp"
#include "mpe/harness.hpp"
#include "mpe/kernels.hpp"
#include "mpe/matrix.hpp"
#include "mpe/nystrom.hpp"
#include "mpe/problems.hpp"
#include "mpe/rational.hpp"
#include "mpe/real.hpp"
#include "mpe/scheme.hpp"
#include "mpe/system.hpp"
#include "mpe/version.hpp"
#include "mpe/weights.hpp"

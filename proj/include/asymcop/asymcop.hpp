// Umbrella header for the copula library: constructions, tail analysis,
// sampling, margins, and inference.  The io/cli layers are not included here
// because they depend on vendored third-party headers (json.hpp, CLI11.hpp);
// include asymcop/io.hpp or asymcop/cli.hpp directly when building tools.
#pragma once

#include "asymcop/common.hpp"
#include "asymcop/construct.hpp"
#include "asymcop/copula.hpp"
#include "asymcop/generators.hpp"
#include "asymcop/inference.hpp"
#include "asymcop/margins.hpp"
#include "asymcop/optim.hpp"
#include "asymcop/rng.hpp"
#include "asymcop/sample.hpp"
#include "asymcop/stats.hpp"
#include "asymcop/tails.hpp"

#pragma once

// Umbrella header for the dem core library.

#include "dem/csv.hpp"
#include "dem/domain.hpp"
#include "dem/drift.hpp"
#include "dem/error.hpp"
#include "dem/inequalities.hpp"
#include "dem/ode.hpp"
#include "dem/plugins.hpp"
#include "dem/process.hpp"
#include "dem/process_spec.hpp"
#include "dem/registry.hpp"
#include "dem/rng.hpp"
#include "dem/simulate.hpp"
#include "dem/spec_json.hpp"
#include "dem/verify.hpp"

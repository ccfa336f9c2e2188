#pragma once

// Umbrella header.

#include "becor/copula/kernel.hpp"
#include "becor/core/copula.hpp"
#include "becor/core/dynamics.hpp"
#include "becor/core/market.hpp"
#include "becor/core/payoff.hpp"
#include "becor/drift/breakeven.hpp"
#include "becor/drift/drift.hpp"
#include "becor/errors.hpp"
#include "becor/hedge/ledger.hpp"
#include "becor/hedge/scenario.hpp"
#include "becor/io/config.hpp"
#include "becor/io/csv.hpp"
#include "becor/io/paths_io.hpp"
#include "becor/io/quotes.hpp"
#include "becor/math/integrate1d.hpp"
#include "becor/math/linalg.hpp"
#include "becor/math/normal.hpp"
#include "becor/math/quadrature.hpp"
#include "becor/math/rootfind.hpp"
#include "becor/pricing/pricer.hpp"
#include "becor/sim/merton.hpp"
#include "becor/sim/paths.hpp"
#include "becor/sim/rng.hpp"
#include "becor/sim/simulate.hpp"

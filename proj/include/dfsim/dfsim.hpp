#pragma once

// Convenience umbrella for the whole library.

#include "dfsim/types.hpp"
#include "dfsim/gates.hpp"
#include "dfsim/state.hpp"
#include "dfsim/outcomes.hpp"
#include "dfsim/logical.hpp"
#include "dfsim/blocks.hpp"
#include "dfsim/noise.hpp"
#include "dfsim/protocols.hpp"
#include "dfsim/branch.hpp"
#include "dfsim/density.hpp"
#include "dfsim/choi.hpp"
#include "dfsim/oracle.hpp"
#include "dfsim/verify.hpp"
#include "dfsim/report.hpp"

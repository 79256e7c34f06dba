#pragma once

/// Everything: operators, Mittag-Leffler, norms, mode and Galerkin solvers, and the harness.

#include "fracwave/error.hpp"
#include "fracwave/frac_calculus.hpp"
#include "fracwave/galerkin.hpp"
#include "fracwave/grid.hpp"
#include "fracwave/harness/cases.hpp"
#include "fracwave/harness/config.hpp"
#include "fracwave/harness/emit.hpp"
#include "fracwave/harness/experiments.hpp"
#include "fracwave/mittag_leffler.hpp"
#include "fracwave/mode_solver.hpp"
#include "fracwave/parallel.hpp"
#include "fracwave/report.hpp"
#include "fracwave/sobolev.hpp"
#include "fracwave/special.hpp"

#pragma once

#include "flexbench/core/calendar.hpp"
#include "flexbench/core/market.hpp"
#include "flexbench/core/market_history.hpp"
#include "flexbench/core/time_grid.hpp"
#include "flexbench/errors.hpp"
#include "flexbench/evaluator/batch.hpp"
#include "flexbench/evaluator/cases.hpp"
#include "flexbench/evaluator/oracle.hpp"
#include "flexbench/evaluator/settlement.hpp"
#include "flexbench/evaluator/simulator.hpp"
#include "flexbench/io/config.hpp"
#include "flexbench/io/experiment.hpp"
#include "flexbench/io/history_csv.hpp"
#include "flexbench/io/plots.hpp"
#include "flexbench/io/results.hpp"
#include "flexbench/io/stats.hpp"
#include "flexbench/io/synth.hpp"
#include "flexbench/load/ev_session.hpp"
#include "flexbench/mathprog/branch_and_bound.hpp"
#include "flexbench/mathprog/external.hpp"
#include "flexbench/mathprog/linear_program.hpp"
#include "flexbench/mathprog/lp_format.hpp"
#include "flexbench/mathprog/simplex.hpp"
#include "flexbench/planners/planner.hpp"
#include "flexbench/rng.hpp"
#include "flexbench/scenario/generator.hpp"
#include "flexbench/scenario/model_io.hpp"

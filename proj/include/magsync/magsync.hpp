#pragma once

// Convenience umbrella for the whole library.

#include "magsync/alignment.hpp"
#include "magsync/clock_model.hpp"
#include "magsync/errors.hpp"
#include "magsync/estimator.hpp"
#include "magsync/experiments.hpp"
#include "magsync/physics.hpp"
#include "magsync/report_json.hpp"
#include "magsync/rng.hpp"
#include "magsync/sample_series.hpp"
#include "magsync/scenario_json.hpp"
#include "magsync/series_csv.hpp"
#include "magsync/simulator.hpp"
#include "magsync/statistics.hpp"

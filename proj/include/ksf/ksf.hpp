#pragma once

#include "ksf/error.hpp"
#include "ksf/experiment/config.hpp"
#include "ksf/experiment/run.hpp"
#include "ksf/experiment/statistics.hpp"
#include "ksf/geometry.hpp"
#include "ksf/ghz.hpp"
#include "ksf/io/canonical_json.hpp"
#include "ksf/io/config_json.hpp"
#include "ksf/io/ks_json.hpp"
#include "ksf/io/report_json.hpp"
#include "ksf/io/trial_csv.hpp"
#include "ksf/kscore/clauses.hpp"
#include "ksf/kscore/hidden_variables.hpp"
#include "ksf/kscore/ksset.hpp"
#include "ksf/kscore/solver.hpp"
#include "ksf/quantum.hpp"
#include "ksf/rng.hpp"

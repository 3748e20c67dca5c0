#pragma once

#include "epiwatch/core/date.hpp"
#include "epiwatch/core/error.hpp"
#include "epiwatch/core/format.hpp"
#include "epiwatch/core/random.hpp"
#include "epiwatch/core/series.hpp"
#include "epiwatch/estimators/growth.hpp"
#include "epiwatch/estimators/indicators.hpp"
#include "epiwatch/estimators/rt.hpp"
#include "epiwatch/estimators/waves.hpp"
#include "epiwatch/ingest/csv.hpp"
#include "epiwatch/ingest/match.hpp"
#include "epiwatch/ingest/snapshot.hpp"
#include "epiwatch/projector/backtest.hpp"
#include "epiwatch/projector/projection.hpp"
#include "epiwatch/projector/serial_interval.hpp"
#include "epiwatch/synthgen/scenario.hpp"

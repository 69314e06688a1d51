#pragma once

// Umbrella header.

#include "tsleak/audit.hpp"
#include "tsleak/baselines.hpp"
#include "tsleak/config.hpp"
#include "tsleak/decomposition.hpp"
#include "tsleak/error.hpp"
#include "tsleak/lstm.hpp"
#include "tsleak/metrics.hpp"
#include "tsleak/report_io.hpp"
#include "tsleak/runner.hpp"
#include "tsleak/scaler.hpp"
#include "tsleak/series.hpp"
#include "tsleak/splitting.hpp"
#include "tsleak/trainer.hpp"
#include "tsleak/windowing.hpp"

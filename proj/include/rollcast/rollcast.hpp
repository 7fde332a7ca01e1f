#pragma once

#include "rollcast/calendar.hpp"
#include "rollcast/datetime.hpp"
#include "rollcast/diagnostics.hpp"
#include "rollcast/evaluation.hpp"
#include "rollcast/holt_winters.hpp"
#include "rollcast/lag_polynomial.hpp"
#include "rollcast/model_io.hpp"
#include "rollcast/nelder_mead.hpp"
#include "rollcast/order_selection.hpp"
#include "rollcast/random.hpp"
#include "rollcast/sarimax.hpp"
#include "rollcast/series.hpp"
#include "rollcast/series_io.hpp"
#include "rollcast/statespace.hpp"
#include "rollcast/synth.hpp"
#include "rollcast/version.hpp"

#pragma once

#include "qphase/config.hpp"
#include "qphase/estimators.hpp"
#include "qphase/gaussian_model.hpp"
#include "qphase/harness.hpp"
#include "qphase/presets.hpp"
#include "qphase/robustness.hpp"
#include "qphase/sampling.hpp"

#pragma once

// Umbrella header for the tensor completion toolkit.

#include "rmtc/datagen.hpp"
#include "rmtc/errors.hpp"
#include "rmtc/io.hpp"
#include "rmtc/problems.hpp"
#include "rmtc/prox.hpp"
#include "rmtc/rbf.hpp"
#include "rmtc/rng.hpp"
#include "rmtc/samples.hpp"
#include "rmtc/solver.hpp"
#include "rmtc/sweep.hpp"
#include "rmtc/tensor.hpp"
#include "rmtc/tuning.hpp"

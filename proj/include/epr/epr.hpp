#pragma once

#include "epr/continuum.hpp"
#include "epr/epr_analysis.hpp"
#include "epr/error.hpp"
#include "epr/finite_systems.hpp"
#include "epr/measurement.hpp"
#include "epr/numerics.hpp"
#include "epr/random.hpp"
#include "epr/tensor.hpp"

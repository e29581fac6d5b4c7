#pragma once

#include "fdasim/arrays.hpp"
#include "fdasim/covariance.hpp"
#include "fdasim/experiments.hpp"
#include "fdasim/geometry.hpp"
#include "fdasim/jammer.hpp"
#include "fdasim/manifest.hpp"
#include "fdasim/quadrature.hpp"
#include "fdasim/scenario.hpp"
#include "fdasim/stap.hpp"

// adlab.hpp - umbrella header for the numerical core

#pragma once

#include "adlab/diagnostics.hpp"
#include "adlab/errors.hpp"
#include "adlab/models.hpp"
#include "adlab/phases.hpp"
#include "adlab/propagation.hpp"
#include "adlab/quadrature.hpp"
#include "adlab/spectral.hpp"
#include "adlab/types.hpp"

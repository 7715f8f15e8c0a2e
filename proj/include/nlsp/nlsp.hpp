#pragma once

// Single include for the whole laboratory: spectral grid machinery, exact
// propagation for second-order polynomial potentials, the split-step nonlinear
// integrator, transported-observable diagnostics, exact gauge and lens
// transforms, and the scenario/driver layer.

#include "nlsp/errors.hpp"
#include "nlsp/fft.hpp"
#include "nlsp/grid.hpp"
#include "nlsp/nonlinearity.hpp"
#include "nlsp/potential.hpp"
#include "nlsp/propagator.hpp"
#include "nlsp/observables.hpp"
#include "nlsp/solver.hpp"
#include "nlsp/transforms.hpp"
#include "nlsp/scenario.hpp"
#include "nlsp/drivers.hpp"

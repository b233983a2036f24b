#pragma once

#include "sqnr/analytic.hpp"
#include "sqnr/cascade.hpp"
#include "sqnr/device.hpp"
#include "sqnr/errors.hpp"
#include "sqnr/fock.hpp"
#include "sqnr/fock_transmission.hpp"
#include "sqnr/metrics.hpp"
#include "sqnr/moments.hpp"
#include "sqnr/ode.hpp"
#include "sqnr/parallel.hpp"
#include "sqnr/solvers.hpp"

#pragma once

#include "zerodisc/errors.hpp"
#include "zerodisc/geometry.hpp"
#include "zerodisc/quadrature.hpp"
#include "zerodisc/analytic.hpp"
#include "zerodisc/sequences.hpp"
#include "zerodisc/sequence_io.hpp"
#include "zerodisc/blaschke.hpp"
#include "zerodisc/carleson.hpp"
#include "zerodisc/builder.hpp"
#include "zerodisc/oscillation.hpp"
#include "zerodisc/report.hpp"
#include "zerodisc/commands.hpp"

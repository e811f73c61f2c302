#pragma once

#include "holodisc/acs.hpp"
#include "holodisc/convergence.hpp"
#include "holodisc/fourier.hpp"
#include "holodisc/grid.hpp"
#include "holodisc/io.hpp"
#include "holodisc/lift.hpp"
#include "holodisc/norms.hpp"
#include "holodisc/poly.hpp"
#include "holodisc/reflection.hpp"
#include "holodisc/rh_solver.hpp"
#include "holodisc/transforms.hpp"

#pragma once

#include "nctorus/errors.hpp"
#include "nctorus/theta.hpp"
#include "nctorus/lattice_algebra.hpp"
#include "nctorus/graded.hpp"
#include "nctorus/element_io.hpp"
#include "nctorus/clock_shift.hpp"
#include "nctorus/spectral.hpp"
#include "nctorus/lsi_combinatorics.hpp"
#include "nctorus/verify.hpp"

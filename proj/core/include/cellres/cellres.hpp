#pragma once

#include "cellres/cell2d.hpp"
#include "cellres/coefficients.hpp"
#include "cellres/csv.hpp"
#include "cellres/error.hpp"
#include "cellres/kernels.hpp"
#include "cellres/parallel.hpp"
#include "cellres/quadrature.hpp"
#include "cellres/resonance1d.hpp"
#include "cellres/sweep.hpp"

#pragma once

#include "wdim/critical.hpp"
#include "wdim/dimension.hpp"
#include "wdim/dynamics.hpp"
#include "wdim/fibers.hpp"
#include "wdim/fit.hpp"
#include "wdim/measures.hpp"
#include "wdim/numeric.hpp"
#include "wdim/parallel.hpp"
#include "wdim/params.hpp"
#include "wdim/quadrature.hpp"
#include "wdim/rng.hpp"
#include "wdim/weierstrass.hpp"

#pragma once

// Everything in one include.

#include "qes/error.hpp"
#include "qes/matrix.hpp"
#include "qes/qes_core.hpp"
#include "qes/polynomial.hpp"
#include "qes/eigensolver.hpp"
#include "qes/parallel.hpp"
#include "qes/critical.hpp"
#include "qes/mathieu.hpp"
#include "qes/wavefunction.hpp"

#pragma once

// Umbrella header: exact R-matrices for quantized enveloping algebras of
// symmetrizable Kac-Moody data, built through the half-twist factorization
// and cross-checked against an intertwining-equation solver.

#include "qkm/bar.hpp"
#include "qkm/cartan.hpp"
#include "qkm/error.hpp"
#include "qkm/harness.hpp"
#include "qkm/irrep.hpp"
#include "qkm/json_io.hpp"
#include "qkm/laurent.hpp"
#include "qkm/matrix.hpp"
#include "qkm/module.hpp"
#include "qkm/qscalar.hpp"
#include "qkm/rational.hpp"
#include "qkm/rmatrix.hpp"
#include "qkm/tensor.hpp"
#include "qkm/theta.hpp"
#include "qkm/verify.hpp"

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace nrq {

using Real = double;

// A Field is a real-valued function sampled on a Grid, one value per grid
// point in row-major order.
using Field = Eigen::ArrayXd;
using ComplexField = Eigen::ArrayXcd;
using Complex = std::complex<Real>;

} // namespace nrq

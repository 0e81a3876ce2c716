#pragma once

#include <Eigen/Dense>

namespace cklab {

/// Grid values of a scalar function on the cross-section, one entry per cell.
using Field = Eigen::VectorXd;

}  // namespace cklab

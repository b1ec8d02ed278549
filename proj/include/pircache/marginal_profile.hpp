#pragma once

#include <Eigen/Core>

namespace pircache {

/// Per-bit caching probabilities p(file, position) induced by a placement
/// distribution, with the storage ratio whose budget they must respect
/// (sum of p <= mu * K * L).
template <typename Scalar>
struct MarginalProfile {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Array p;  // K rows, L columns
  Scalar mu;

  Eigen::Index files() const { return p.rows(); }
  Eigen::Index file_bits() const { return p.cols(); }

  static MarginalProfile uniform(Eigen::Index files, Eigen::Index file_bits, const Scalar& mu) {
    return {Array::Constant(files, file_bits, mu), mu};
  }
};

}  // namespace pircache

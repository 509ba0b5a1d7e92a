#include "npn/common.hpp"

namespace npn {

SampleMatrix::SampleMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1) throw InvalidArgument("sample matrix needs at least one row");
  if (data_.cols() < 2) throw InvalidArgument("sample matrix needs at least two columns");
  if (!data_.allFinite()) throw DataError("sample matrix contains NaN or Inf");
}

SampleMatrix SampleMatrix::rows(const std::vector<int>& idx) const {
  Matrix out(static_cast<Eigen::Index>(idx.size()), data_.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = data_.row(idx[r]);
  return SampleMatrix(std::move(out));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace npn

#include "tsal/sobol.hpp"

#include "tsal/errors.hpp"

#include <bit>

namespace tsal {

namespace {

struct DirectionInit {
  std::uint32_t poly;
  int degree;
  std::array<std::uint32_t, 6> m;
};

// Joe & Kuo (new-joe-kuo-6.21201), dimensions 2..16.
constexpr std::array<DirectionInit, SobolSequence::kMaxDim - 1> kInit = {{
    {3, 1, {1}},
    {7, 2, {1, 3}},
    {11, 3, {1, 3, 1}},
    {13, 3, {1, 1, 1}},
    {19, 4, {1, 1, 3, 3}},
    {25, 4, {1, 3, 5, 13}},
    {37, 5, {1, 1, 5, 5, 17}},
    {41, 5, {1, 1, 5, 5, 5}},
    {47, 5, {1, 1, 7, 11, 19}},
    {55, 5, {1, 1, 5, 1, 1}},
    {59, 5, {1, 1, 1, 3, 11}},
    {61, 5, {1, 3, 5, 5, 31}},
    {67, 6, {1, 3, 3, 9, 7, 49}},
    {91, 6, {1, 1, 1, 15, 21, 21}},
    {97, 6, {1, 3, 1, 13, 27, 49}},
}};

}  // namespace

SobolSequence::SobolSequence(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("SobolSequence: dimension must be in [1, 16]");
  for (int k = 0; k < 32; ++k) v_[0][static_cast<std::size_t>(k)] = 1u << (31 - k);
  for (int j = 1; j < dim; ++j) {
    const auto& init = kInit[static_cast<std::size_t>(j - 1)];
    const int s = init.degree;
    std::array<std::uint32_t, 32> m{};
    for (int k = 0; k < s; ++k) m[static_cast<std::size_t>(k)] = init.m[static_cast<std::size_t>(k)];
    const std::uint32_t a = (init.poly >> 1) & ((1u << (s - 1)) - 1u);
    for (int k = s; k < 32; ++k) {
      std::uint32_t mk = m[static_cast<std::size_t>(k - s)] ^ (m[static_cast<std::size_t>(k - s)] << s);
      for (int i = 1; i < s; ++i) {
        if ((a >> (s - 1 - i)) & 1u) mk ^= m[static_cast<std::size_t>(k - i)] << i;
      }
      m[static_cast<std::size_t>(k)] = mk;
    }
    for (int k = 0; k < 32; ++k)
      v_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(k)] << (31 - k);
  }
}

Eigen::VectorXd SobolSequence::next() {
  Eigen::VectorXd out(dim_);
  for (int j = 0; j < dim_; ++j) out[j] = static_cast<double>(x_[static_cast<std::size_t>(j)]) * 0x1p-32;
  const int c = std::countr_one(index_);
  if (c >= 32) throw ResourceError("SobolSequence: sequence exhausted");
  for (int j = 0; j < dim_; ++j)
    x_[static_cast<std::size_t>(j)] ^= v_[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
  ++index_;
  return out;
}

void SobolSequence::skip(std::uint64_t count) {
  for (std::uint64_t i = 0; i < count; ++i) next();
}

Eigen::MatrixXd sobol_points(int n, int dim) {
  if (n < 0) throw InvalidArgument("sobol_points: negative count");
  SobolSequence seq(dim);
  Eigen::MatrixXd out(n, dim);
  for (int i = 0; i < n; ++i) out.row(i) = seq.next().transpose();
  return out;
}

}  // namespace tsal

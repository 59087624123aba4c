#pragma once

#include <cstdint>
#include <vector>

namespace vsec {

// Dense row-major matrix, just enough for count tables and point estimates.
template <typename T>
struct Mat {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<T> data;

  Mat() = default;
  Mat(std::int64_t r, std::int64_t c, T fill = T{}) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), fill) {}

  T& operator()(std::int64_t r, std::int64_t c) { return data[static_cast<std::size_t>(r * cols + c)]; }
  const T& operator()(std::int64_t r, std::int64_t c) const { return data[static_cast<std::size_t>(r * cols + c)]; }

  T* row(std::int64_t r) { return data.data() + r * cols; }
  const T* row(std::int64_t r) const { return data.data() + r * cols; }

  bool operator==(const Mat&) const = default;
};

using MatD = Mat<double>;
using MatI = Mat<std::int64_t>;

}  // namespace vsec

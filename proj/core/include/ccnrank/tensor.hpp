#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ccnrank {

using Shape = std::vector<std::size_t>;

/// Dense row-major array of doubles with rank at most 3.
///
/// A default-constructed Tensor has rank 0 and holds one element (a scalar
/// zero). Vectors are rank 1, matrices rank 2 with shape {rows, cols}.
class Tensor {
 public:
  Tensor();
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);
  static Tensor zeros_like(const Tensor& other);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t dim(std::size_t axis) const;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  const double& operator[](std::size_t i) const noexcept { return data_[i]; }

  // Rank-2 element access.
  double& at(std::size_t row, std::size_t col);
  double at(std::size_t row, std::size_t col) const;

  double item() const;  // value of a one-element tensor
  bool is_scalar() const noexcept { return data_.size() == 1 && rank() <= 1; }
  bool all_finite() const noexcept;
  void fill(double value) noexcept;

  std::string shape_string() const;

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

std::string shape_string(const Shape& shape);

}  // namespace ccnrank

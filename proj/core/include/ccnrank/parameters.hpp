#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ccnrank/tensor.hpp"

namespace ccnrank {

/// Named trainable tensors with a parallel gradient slot for each.
///
/// Entries keep stable addresses once added, so recorded computations can
/// refer to values and gradient slots by pointer. Iteration order is
/// insertion order, which is also the checkpoint manifest order.
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet& other);
  ParameterSet& operator=(const ParameterSet& other);
  ParameterSet(ParameterSet&&) noexcept = default;
  ParameterSet& operator=(ParameterSet&&) noexcept = default;

  Tensor& add(std::string name, Tensor init, bool trainable = true);

  bool contains(std::string_view name) const;
  Tensor& value(std::string_view name);
  const Tensor& value(std::string_view name) const;
  Tensor& grad(std::string_view name);
  const Tensor& grad(std::string_view name) const;
  bool trainable(std::string_view name) const;
  void set_trainable(std::string_view name, bool trainable);

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();
  // Copies values (not gradients) from a set with an identical manifest.
  void assign_values(const ParameterSet& other);
  bool values_equal(const ParameterSet& other) const;

 private:
  struct Entry {
    Tensor value;
    Tensor grad;
    bool trainable = true;
  };

  Entry& entry(std::string_view name);
  const Entry& entry(std::string_view name) const;

  std::deque<Entry> entries_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace ccnrank

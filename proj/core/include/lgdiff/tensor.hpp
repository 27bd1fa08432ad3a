//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lgdiff/errors.hpp"

namespace lgdiff {

// Thread-local accounting of live tensor storage. The attention benchmarks
// read the peak to compare kernel footprints.
namespace memstat {

std::int64_t current_bytes();
std::int64_t peak_bytes();
void reset_peak();

namespace detail {
void on_alloc(std::int64_t bytes);
void on_free(std::int64_t bytes);
}  // namespace detail

template <class T>
struct TrackingAllocator {
  using value_type = T;
  TrackingAllocator() noexcept = default;
  template <class U>
  TrackingAllocator(const TrackingAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    detail::on_alloc(static_cast<std::int64_t>(n * sizeof(T)));
    return static_cast<T*>(::operator new(n * sizeof(T)));
  }
  void deallocate(T* p, std::size_t n) noexcept {
    detail::on_free(static_cast<std::int64_t>(n * sizeof(T)));
    ::operator delete(p);
  }
  template <class U>
  bool operator==(const TrackingAllocator<U>&) const noexcept {
    return true;
  }
};

}  // namespace memstat

// Dense row-major double-precision tensor, rank 0..3.
class Tensor {
 public:
  using Storage = std::vector<double, memstat::TrackingAllocator<double>>;

  Tensor() = default;
  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<std::size_t>(count(shape_)), 0.0);
  }
  Tensor(std::vector<int> shape, const std::vector<double>& values)
      : shape_(std::move(shape)) {
    if (static_cast<std::int64_t>(values.size()) != count(shape_))
      throw ShapeError("tensor: value count does not match shape");
    data_.assign(values.begin(), values.end());
  }

  static Tensor scalar(double v) {
    Tensor t({1, 1});
    t.data_[0] = v;
    return t;
  }
  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int> shape, double v) {
    Tensor t(std::move(shape));
    t.fill(v);
    return t;
  }

  bool empty() const { return shape_.empty(); }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& shape() const { return shape_; }
  std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }

  // 2-D conveniences.
  int rows() const { return shape_[0]; }
  int cols() const { return shape_[1]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  double& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * shape_[1] + j];
  }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * shape_[1] + j];
  }
  double& operator()(int i, int j, int k) {
    return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  double operator()(int i, int j, int k) const {
    return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }

  void fill(double v) {
    for (auto& x : data_) x = v;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  static std::int64_t count(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) {
      if (d < 0) throw ShapeError("tensor: negative dimension");
      n *= d;
    }
    return n;
  }

 private:
  std::vector<int> shape_;
  Storage data_;
};

std::string shape_string(const Tensor& t);

// Plain (non-recorded) linear algebra used by the diffusion process, the
// sampler and the attention kernels.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a * b^T
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a^T * b
Tensor transpose(const Tensor& a);
void add_inplace(Tensor& a, const Tensor& b);
void scale_inplace(Tensor& a, double c);

double log_sum_exp(const double* x, int n);
void softmax_inplace(double* x, int n);
int argmax(const double* x, int n);

}  // namespace lgdiff

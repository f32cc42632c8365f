#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "latent_painter/errors.hpp"

namespace latent_painter {

/// Channel-major latent shape (C×H×W).
struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  [[nodiscard]] std::size_t plane() const { return std::size_t(height) * std::size_t(width); }
  [[nodiscard]] std::size_t size() const { return std::size_t(channels) * plane(); }
  [[nodiscard]] bool contains(int c, int x, int y) const {
    return c >= 0 && c < channels && x >= 0 && x < width && y >= 0 && y < height;
  }
  [[nodiscard]] bool contains_pixel(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(const Shape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

/// Dense C×H×W float32 tensor. Element (c, x, y) lives at c*H*W + y*W + x.
class Latent {
 public:
  Latent() = default;
  explicit Latent(Shape shape, float fill = 0.0F) : shape_(shape), data_(shape.size(), fill) {
    if (shape.channels < 1 || shape.height < 1 || shape.width < 1) {
      throw InvalidArgument("latent dimensions must be positive, got " + to_string(shape));
    }
  }
  Latent(Shape shape, std::vector<float> values) : Latent(shape) {
    if (values.size() != shape.size()) {
      throw InvalidArgument("latent value count does not match shape " + to_string(shape));
    }
    data_ = std::move(values);
  }

  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] int channels() const { return shape_.channels; }
  [[nodiscard]] int height() const { return shape_.height; }
  [[nodiscard]] int width() const { return shape_.width; }

  [[nodiscard]] std::size_t index(int c, int x, int y) const {
    return std::size_t(c) * shape_.plane() + std::size_t(y) * std::size_t(shape_.width) + std::size_t(x);
  }
  float& at(int c, int x, int y) { return data_[index(c, x, y)]; }
  [[nodiscard]] float at(int c, int x, int y) const { return data_[index(c, x, y)]; }

  [[nodiscard]] std::span<float> channel(int c) {
    return {data_.data() + std::size_t(c) * shape_.plane(), shape_.plane()};
  }
  [[nodiscard]] std::span<const float> channel(int c) const {
    return {data_.data() + std::size_t(c) * shape_.plane(), shape_.plane()};
  }

  [[nodiscard]] std::span<float> values() { return data_; }
  [[nodiscard]] std::span<const float> values() const { return data_; }

  friend bool operator==(const Latent&, const Latent&) = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

/// Single-plane H×W field, indexed (x, y).
template <typename T>
class Field {
 public:
  Field() = default;
  Field(int height, int width, T fill = T{})
      : height_(height), width_(width), data_(std::size_t(height) * std::size_t(width), fill) {}

  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  T& operator()(int x, int y) { return data_[std::size_t(y) * std::size_t(width_) + std::size_t(x)]; }
  const T& operator()(int x, int y) const {
    return data_[std::size_t(y) * std::size_t(width_) + std::size_t(x)];
  }

  [[nodiscard]] std::span<T> values() { return data_; }
  [[nodiscard]] std::span<const T> values() const { return data_; }

  template <typename U>
  [[nodiscard]] bool same_shape(const Field<U>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  friend bool operator==(const Field&, const Field&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

// std::vector<bool> would hand out proxies; masks store one byte per cell.
using Mask = Field<unsigned char>;
using RealField = Field<float>;

}  // namespace latent_painter

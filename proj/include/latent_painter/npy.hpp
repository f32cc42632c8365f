#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "latent_painter/core.hpp"
#include "latent_painter/errors.hpp"

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace latent_painter::npy {

inline constexpr std::array<char, 6> kMagic = {'\x93', 'N', 'U', 'M', 'P', 'Y'};
inline constexpr std::size_t kAlign = 64;
// Spare spaces numpy leaves after the dict so the leading dimension can grow in place.
inline constexpr std::size_t kGrowthDigits = 21;

/// Version 1.0 header for a C-contiguous little-endian float32 array, byte-identical
/// to numpy's own writer.
inline std::string make_header(std::span<const std::size_t> shape) {
  std::string dims;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) dims += ", ";
    dims += std::to_string(shape[i]);
  }
  if (shape.size() == 1) dims += ",";
  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (" + dims + "), }";
  if (!shape.empty()) dict.append(kGrowthDigits - std::to_string(shape[0]).size(), ' ');
  const std::size_t hlen = dict.size() + 1;
  const std::size_t pad = kAlign - ((kMagic.size() + 2 + 2 + hlen) % kAlign);
  dict.append(pad, ' ');
  dict += '\n';
  if (dict.size() > 0xFFFF) throw InvalidArgument("NPY header too long for version 1.0");

  std::string out(kMagic.begin(), kMagic.end());
  out += '\x01';
  out += '\x00';
  const auto len = std::uint16_t(dict.size());
  out += char(len & 0xFF);
  out += char(len >> 8);
  out += dict;
  return out;
}

struct Header {
  std::vector<std::size_t> shape;
  std::size_t data_offset = 0;

  [[nodiscard]] std::size_t count() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  }
};

namespace detail {

inline std::string dict_value(const std::string& dict, const std::string& key) {
  const auto k = dict.find("'" + key + "'");
  if (k == std::string::npos) throw FormatError("NPY header lacks key '" + key + "'");
  auto p = dict.find(':', k);
  if (p == std::string::npos) throw FormatError("NPY header malformed near '" + key + "'");
  ++p;
  while (p < dict.size() && dict[p] == ' ') ++p;
  std::size_t end = p;
  if (p < dict.size() && dict[p] == '(') {
    end = dict.find(')', p);
    if (end == std::string::npos) throw FormatError("NPY shape tuple not terminated");
    return dict.substr(p, end - p + 1);
  }
  if (p < dict.size() && (dict[p] == '\'' || dict[p] == '"')) {
    end = dict.find(dict[p], p + 1);
    if (end == std::string::npos) throw FormatError("NPY string value not terminated");
    return dict.substr(p + 1, end - p - 1);
  }
  while (end < dict.size() && dict[end] != ',' && dict[end] != '}') ++end;
  auto v = dict.substr(p, end - p);
  while (!v.empty() && v.back() == ' ') v.pop_back();
  return v;
}

inline std::vector<std::size_t> parse_shape(const std::string& tuple) {
  std::vector<std::size_t> shape;
  std::string body = tuple.substr(1, tuple.size() - 2);
  std::size_t pos = 0;
  while (pos < body.size()) {
    while (pos < body.size() && (body[pos] == ' ' || body[pos] == ',')) ++pos;
    if (pos >= body.size()) break;
    std::size_t end = pos;
    while (end < body.size() && body[end] != ',') ++end;
    std::string tok = body.substr(pos, end - pos);
    while (!tok.empty() && tok.back() == ' ') tok.pop_back();
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      throw FormatError("NPY shape entry '" + tok + "' is not a non-negative integer");
    }
    shape.push_back(std::stoull(tok));
    pos = end;
  }
  return shape;
}

}  // namespace detail

inline Header read_header(std::istream& in) {
  std::array<char, 8> pre{};
  if (!in.read(pre.data(), 8) || !std::equal(kMagic.begin(), kMagic.end(), pre.begin())) {
    throw FormatError("not an NPY file (bad magic)");
  }
  const auto major = std::uint8_t(pre[6]);
  std::size_t hlen = 0;
  std::size_t prefix = 10;
  if (major == 1) {
    std::array<unsigned char, 2> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 2)) throw FormatError("truncated NPY header");
    hlen = std::size_t(b[0]) | (std::size_t(b[1]) << 8);
  } else if (major == 2 || major == 3) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw FormatError("truncated NPY header");
    hlen = std::size_t(b[0]) | (std::size_t(b[1]) << 8) | (std::size_t(b[2]) << 16) | (std::size_t(b[3]) << 24);
    prefix = 12;
  } else {
    throw FormatError("unsupported NPY version " + std::to_string(major));
  }
  std::string dict(hlen, '\0');
  if (!in.read(dict.data(), std::streamsize(hlen))) throw FormatError("truncated NPY header");

  const auto descr = detail::dict_value(dict, "descr");
  if (descr != "<f4") throw FormatError("NPY dtype '" + descr + "' unsupported; expected '<f4'");
  if (detail::dict_value(dict, "fortran_order") != "False") {
    throw FormatError("Fortran-ordered NPY arrays are unsupported");
  }
  Header h;
  h.shape = detail::parse_shape(detail::dict_value(dict, "shape"));
  h.data_offset = prefix + hlen;
  return h;
}

struct Array {
  std::vector<std::size_t> shape;
  std::vector<float> data;
};

inline Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  Array arr;
  const Header h = read_header(in);
  arr.shape = h.shape;
  arr.data.resize(h.count());
  if (!in.read(reinterpret_cast<char*>(arr.data.data()), std::streamsize(arr.data.size() * sizeof(float)))) {
    throw FormatError("NPY payload shorter than its shape implies");
  }
  return arr;
}

inline void write(const std::filesystem::path& path, std::span<const std::size_t> shape, std::span<const float> data) {
  const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  if (n != data.size()) throw InvalidArgument("NPY data size does not match shape");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::string header = make_header(shape);
  out.write(header.data(), std::streamsize(header.size()));
  out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size() * sizeof(float)));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

/// Appends slices along the leading axis and patches the header on close. The header
/// length does not depend on the leading dimension, so the patch is in place.
class StreamWriter {
 public:
  StreamWriter(const std::filesystem::path& path, std::vector<std::size_t> slice_shape)
      : path_(path), slice_shape_(std::move(slice_shape)), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    slice_size_ = std::accumulate(slice_shape_.begin(), slice_shape_.end(), std::size_t{1}, std::multiplies<>());
    const std::string header = make_header(full_shape());
    out_.write(header.data(), std::streamsize(header.size()));
  }
  StreamWriter(const StreamWriter&) = delete;
  StreamWriter& operator=(const StreamWriter&) = delete;
  ~StreamWriter() {
    try {
      close();
    } catch (...) {
    }
  }

  void append(std::span<const float> slice) {
    if (slice.size() != slice_size_) throw InvalidArgument("NPY slice size does not match stream shape");
    out_.write(reinterpret_cast<const char*>(slice.data()), std::streamsize(slice.size() * sizeof(float)));
    if (!out_) throw IoError("failed writing '" + path_.string() + "'");
    ++count_;
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    const std::string header = make_header(full_shape());
    out_.seekp(0);
    out_.write(header.data(), std::streamsize(header.size()));
    out_.close();
    if (!out_) throw IoError("failed finalizing '" + path_.string() + "'");
  }

  [[nodiscard]] std::size_t count() const { return count_; }

 private:
  [[nodiscard]] std::vector<std::size_t> full_shape() const {
    std::vector<std::size_t> s{count_};
    s.insert(s.end(), slice_shape_.begin(), slice_shape_.end());
    return s;
  }

  std::filesystem::path path_;
  std::vector<std::size_t> slice_shape_;
  std::size_t slice_size_ = 0;
  std::size_t count_ = 0;
  bool closed_ = false;
  std::ofstream out_;
};

}  // namespace latent_painter::npy

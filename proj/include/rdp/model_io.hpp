// Copyright 2026 The rdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Binary model files.
//
//   magic "RDPM" | u16 major | u16 minor | record | u32 crc32
//
// All integers and floats are little-endian; floats are IEEE-754 binary64.
// The record carries the full weight matrices of both the network and its
// random map, so loading never re-derives anything from a seed.
// Ensemble files use magic "RDPE" and hold a count followed by
// length-prefixed model files.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "rdp/anomaly.hpp"
#include "rdp/dataset.hpp"

namespace rdp {

inline constexpr std::uint16_t kModelFormatMajor = 1;
inline constexpr std::uint16_t kModelFormatMinor = 0;

namespace io {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  template <typename T>
  void uint(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void size(std::size_t v) { uint(static_cast<std::uint64_t>(v)); }
  void doubles(const double* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) f64(p[i]);
  }
  void matrix(const Matrix& m) {
    size(rows(m));
    size(cols(m));
    doubles(m.data(), static_cast<std::size_t>(m.size()));
  }
  void vector(const Vector& v) {
    size(static_cast<std::size_t>(v.size()));
    doubles(v.data(), static_cast<std::size_t>(v.size()));
  }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  void need(std::size_t n) const {
    if (n > data_.size() - pos_) fail(ErrorKind::kFormat, "truncated model file");
  }
  template <typename T>
  T uint() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  std::size_t size() { return static_cast<std::size_t>(uint<std::uint64_t>()); }
  Matrix matrix() {
    const auto r = size();
    const auto c = size();
    if (c != 0 && r > (data_.size() - pos_) / 8 / c) fail(ErrorKind::kFormat, "truncated model file");
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = f64();
    return m;
  }
  Vector vector() {
    const auto n = size();
    need(n * 8);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f64();
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

inline void write_map(Writer& w, const RandomMap& map) {
  w.uint(static_cast<std::uint8_t>(map.kind));
  w.size(map.in_dim);
  w.size(map.out_dim);
  w.uint(map.seed);
  w.f64(map.bandwidth);
  w.f64(map.density);
  w.matrix(map.weights);
  w.vector(map.offsets);
}

inline RandomMap read_map(Reader& r) {
  RandomMap m;
  const auto kind = r.uint<std::uint8_t>();
  if (kind > static_cast<std::uint8_t>(MapKind::kIdentity)) fail(ErrorKind::kFormat, "unknown random map kind");
  m.kind = static_cast<MapKind>(kind);
  m.in_dim = r.size();
  m.out_dim = r.size();
  m.seed = r.uint<std::uint64_t>();
  m.bandwidth = r.f64();
  m.density = r.f64();
  m.weights = r.matrix();
  m.offsets = r.vector();
  return m;
}

inline void write_header(Writer& w, const char* magic) {
  w.bytes(magic, 4);
  w.uint(kModelFormatMajor);
  w.uint(kModelFormatMinor);
}

inline void read_header(Reader& r, const char* magic, const std::string& what) {
  auto m = r.take(4);
  if (std::memcmp(m.data(), magic, 4) != 0) fail(ErrorKind::kFormat, "not " + what + " (bad magic bytes)");
  const auto major = r.uint<std::uint16_t>();
  r.uint<std::uint16_t>();
  if (major != kModelFormatMajor) {
    fail(ErrorKind::kFormat, what + " has format version " + std::to_string(major) + ", this build reads version " +
                                 std::to_string(kModelFormatMajor));
  }
}

// Splits off and checks the crc trailer. A failing crc is reported as
// truncation when the body cannot be parsed at all.
template <typename ParseFn>
auto checked_parse(std::span<const std::uint8_t> bytes, const char* magic, const std::string& what, ParseFn parse) {
  if (bytes.size() < 12) fail(ErrorKind::kFormat, "truncated " + what);
  {
    Reader header(bytes);
    read_header(header, magic, what);
  }
  const auto body = bytes.first(bytes.size() - 4);
  Reader trailer(bytes.subspan(bytes.size() - 4));
  const bool crc_ok = trailer.uint<std::uint32_t>() == crc32(body);
  Reader r(body);
  read_header(r, magic, what);
  if (!crc_ok) {
    try {
      parse(r);
    } catch (const Error&) {
      fail(ErrorKind::kFormat, "truncated " + what);
    }
    fail(ErrorKind::kFormat, what + " checksum mismatch");
  }
  auto out = parse(r);
  if (r.remaining() != 0) fail(ErrorKind::kFormat, what + " has trailing bytes");
  return out;
}

inline std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace io

inline std::vector<std::uint8_t> serialize_model(const RdpModel& model) {
  require(model.map != nullptr, "serialize_model: model has no random map");
  io::Writer w;
  io::write_header(w, "RDPM");
  w.uint(static_cast<std::uint8_t>(model.task));
  std::uint8_t flags = 0;
  if (model.use_rdp_loss) flags |= 1;
  if (model.use_aux_loss) flags |= 2;
  if (model.has_decoder()) flags |= 4;
  w.uint(flags);
  w.f64(model.leaky_slope);
  w.f64(model.aux_weight);
  w.matrix(model.weights);
  w.vector(model.bias);
  if (model.has_decoder()) {
    w.matrix(*model.decoder_weights);
    w.vector(*model.decoder_bias);
  }
  io::write_map(w, *model.map);
  w.uint(io::crc32(w.buffer()));
  return std::move(w.buffer());
}

inline RdpModel deserialize_model(std::span<const std::uint8_t> bytes) {
  return io::checked_parse(bytes, "RDPM", "model file", [](io::Reader& r) {
    RdpModel m;
    const auto task = r.uint<std::uint8_t>();
    if (task > 1) fail(ErrorKind::kFormat, "unknown task tag");
    m.task = static_cast<Task>(task);
    const auto flags = r.uint<std::uint8_t>();
    m.use_rdp_loss = flags & 1;
    m.use_aux_loss = flags & 2;
    m.leaky_slope = r.f64();
    m.aux_weight = r.f64();
    m.weights = r.matrix();
    m.bias = r.vector();
    if (flags & 4) {
      m.decoder_weights = r.matrix();
      m.decoder_bias = r.vector();
    }
    m.map = std::make_shared<const RandomMap>(io::read_map(r));
    return m;
  });
}

inline void save_model(const std::filesystem::path& path, const RdpModel& model) {
  const auto bytes = serialize_model(model);
  write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

inline RdpModel load_model(const std::filesystem::path& path) {
  const auto bytes = io::read_all(path);
  return deserialize_model(bytes);
}

inline std::vector<std::uint8_t> serialize_ensemble(const Ensemble& ens) {
  io::Writer w;
  io::write_header(w, "RDPE");
  w.size(ens.members.size());
  for (const auto& member : ens.members) {
    const auto rec = serialize_model(member.model);
    w.uint(member.seed);
    w.size(rec.size());
    w.bytes(rec.data(), rec.size());
  }
  w.uint(io::crc32(w.buffer()));
  return std::move(w.buffer());
}

inline Ensemble deserialize_ensemble(std::span<const std::uint8_t> bytes) {
  return io::checked_parse(bytes, "RDPE", "ensemble file", [](io::Reader& r) {
    Ensemble ens;
    const auto count = r.size();
    for (std::size_t i = 0; i < count; ++i) {
      MemberResult m;
      m.seed = r.uint<std::uint64_t>();
      const auto len = r.size();
      m.model = deserialize_model(r.take(len));
      ens.members.push_back(std::move(m));
    }
    return ens;
  });
}

inline void save_ensemble(const std::filesystem::path& path, const Ensemble& ens) {
  const auto bytes = serialize_ensemble(ens);
  write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

inline Ensemble load_ensemble(const std::filesystem::path& path) {
  const auto bytes = io::read_all(path);
  return deserialize_ensemble(bytes);
}

}  // namespace rdp

// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "atm/error.hpp"
#include "atm/io.hpp"
#include "atm/model.hpp"

namespace atm {

// Model file layout (all integers little-endian):
//
//   magic       8 bytes  "ATMMODEL"
//   version     u32      kModelFormatVersion
//   reserved    u32      0
//   K, V, A     u64 x 3
//   alpha, eta  f64 x 2  (IEEE-754 bit patterns)
//   iterations, burn_in, thinning, seed, retained_sweeps   u64 x 5
//   terms       V x (u32 length + bytes)
//   authors     A x (u32 length + bytes)
//   theta       A*K f64, row-major
//   beta        K*V f64, row-major
//   checksum    u64 FNV-1a over every preceding byte
inline constexpr char kModelMagic[8] = {'A', 'T', 'M', 'M', 'O', 'D', 'E', 'L'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const char*>(p);
    out_.append(b, n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_ += static_cast<char>((v >> (8 * i)) & 0xff);
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_ += static_cast<char>((v >> (8 * i)) & 0xff);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view in) : in_(in) {}

  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(in_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(in_[pos_++])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorKind::format, "model file is truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

inline std::string serialize_model(const AtmModel& model) {
  detail::ByteWriter w;
  w.raw(kModelMagic, sizeof kModelMagic);
  w.u32(kModelFormatVersion);
  w.u32(0);
  w.u64(model.num_topics());
  w.u64(model.vocab_size());
  w.u64(model.num_authors());
  w.f64(model.hyper.alpha);
  w.f64(model.hyper.eta);
  w.u64(model.hyper.iterations);
  w.u64(model.hyper.burn_in);
  w.u64(model.hyper.thinning);
  w.u64(model.hyper.seed);
  w.u64(model.retained_sweeps);
  for (const auto& t : model.terms) w.str(t);
  for (const auto& a : model.authors) w.str(a);
  for (double v : model.theta.data()) w.f64(v);
  for (double v : model.beta.data()) w.f64(v);
  w.u64(detail::fnv1a(w.bytes()));
  return std::move(w.bytes());
}

inline AtmModel deserialize_model(std::string_view bytes) {
  detail::ByteReader r(bytes);
  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0)
    throw Error(ErrorKind::format, "not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion)
    throw Error(ErrorKind::format, "unsupported model format version " + std::to_string(version));
  r.u32();

  AtmModel m;
  const std::uint64_t K = r.u64(), V = r.u64(), A = r.u64();
  // Guard against absurd sizes before allocating.
  if (K == 0 || (K * (V + A)) * 8 > r.remaining())
    throw Error(ErrorKind::format, "model header sizes are inconsistent with the file length");
  m.hyper.num_topics = K;
  m.hyper.alpha = r.f64();
  m.hyper.eta = r.f64();
  m.hyper.iterations = r.u64();
  m.hyper.burn_in = r.u64();
  m.hyper.thinning = r.u64();
  m.hyper.seed = r.u64();
  m.retained_sweeps = r.u64();
  m.terms.reserve(V);
  for (std::uint64_t v = 0; v < V; ++v) m.terms.push_back(r.str());
  m.authors.reserve(A);
  for (std::uint64_t a = 0; a < A; ++a) m.authors.push_back(r.str());
  m.theta = Matrix(A, K);
  for (auto& v : m.theta.data()) v = r.f64();
  m.beta = Matrix(K, V);
  for (auto& v : m.beta.data()) v = r.f64();
  const std::size_t body = r.pos();
  const std::uint64_t checksum = r.u64();
  if (r.remaining() != 0) throw Error(ErrorKind::format, "trailing bytes after model checksum");
  if (checksum != detail::fnv1a(bytes.substr(0, body)))
    throw Error(ErrorKind::format, "model checksum mismatch (file corrupt)");
  validate_model(m);
  return m;
}

inline void save_model(const AtmModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

inline AtmModel load_model(const std::filesystem::path& path) {
  return deserialize_model(read_file(path));
}

}  // namespace atm

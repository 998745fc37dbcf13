#pragma once

// Binary checkpoint, all integers and floats little-endian:
//
//   "SSDC" u32 version u8 kind
//   u32 n_arch  { str }            architecture strings
//   u32 n_label { str }            alphabet
//   f64 max_gap u8 method i32 stack_depth i32 map_size
//   i32 grid i32 samples f64 sigma f64 truncate f64 virtual_weight
//   u32 n_tensor { str name u8 group u32 rank { i32 dim } u64 count { f32 } }
//
// where str = u32 length + bytes.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/features.hpp"
#include "ssdcnn/ink.hpp"
#include "ssdcnn/ink_io.hpp"
#include "ssdcnn/model.hpp"

namespace ssdcnn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

inline constexpr char kCheckpointMagic[4] = {'S', 'S', 'D', 'C'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Model<float> model;
  LabelAlphabet alphabet;
  FeatureConfig features;
};

namespace ckpt_detail {

class Writer {
 public:
  template <class V>
  void put(V v) {
    char buf[sizeof(V)];
    std::memcpy(buf, &v, sizeof(V));
    out.append(buf, sizeof(V));
  }
  void str(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    out.append(s);
  }
  std::string out;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : data_(bytes) {}

  template <class V>
  V get(const char* what) {
    need(sizeof(V), what);
    V v;
    std::memcpy(&v, data_.data() + pos_, sizeof(V));
    pos_ += sizeof(V);
    return v;
  }
  std::string str(const char* what) {
    const auto n = get<std::uint32_t>(what);
    need(n, what);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void need(std::size_t n, const char* what) const {
    if (data_.size() - pos_ < n) {
      throw Error(ErrorCode::CorruptTensor, std::string("file ends inside ") + what, pos_);
    }
  }
  std::size_t pos() const { return pos_; }
  std::size_t size() const { return data_.size(); }
  const char* here() const { return data_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace ckpt_detail

inline std::string encode_checkpoint(const Checkpoint& ck) {
  ckpt_detail::Writer w;
  w.out.append(kCheckpointMagic, 4);
  w.put(kCheckpointVersion);
  w.put(static_cast<std::uint8_t>(ck.model.kind));
  const auto arch = ck.model.architecture();
  w.put(static_cast<std::uint32_t>(arch.size()));
  for (const auto& a : arch) w.str(a);
  w.put(static_cast<std::uint32_t>(ck.alphabet.size()));
  for (const auto& e : ck.alphabet.entries()) w.str(e);
  const auto& f = ck.features;
  w.put(f.preprocess.max_gap);
  w.put(static_cast<std::uint8_t>(f.preprocess.method));
  w.put(static_cast<std::int32_t>(f.stack_depth));
  w.put(static_cast<std::int32_t>(f.map_size));
  w.put(static_cast<std::int32_t>(f.eightdir.grid));
  w.put(static_cast<std::int32_t>(f.eightdir.samples));
  w.put(f.eightdir.sigma);
  w.put(f.eightdir.truncate);
  w.put(f.eightdir.virtual_weight);
  w.put(static_cast<std::uint32_t>(ck.model.params.size()));
  for (const auto& p : ck.model.params.items) {
    w.str(p.name);
    w.put(static_cast<std::uint8_t>(p.group));
    w.put(static_cast<std::uint32_t>(p.value.shape.size()));
    for (int d : p.value.shape) w.put(static_cast<std::int32_t>(d));
    w.put(static_cast<std::uint64_t>(p.value.size()));
    w.out.append(reinterpret_cast<const char*>(p.value.ptr()), p.value.size() * sizeof(float));
  }
  return std::move(w.out);
}

inline Checkpoint decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "not an SSDC checkpoint", 0);
  }
  ckpt_detail::Reader r(bytes);
  r.skip(4);
  const auto version = r.get<std::uint32_t>("header");
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::VersionMismatch, "checkpoint version " + std::to_string(version) + ", expected " +
                                                std::to_string(kCheckpointVersion));
  }
  const auto kind_byte = r.get<std::uint8_t>("header");
  if (kind_byte > static_cast<std::uint8_t>(ModelKind::SSDCNN)) {
    throw Error(ErrorCode::CorruptTensor, "unknown model kind " + std::to_string(kind_byte), r.pos() - 1);
  }
  const auto kind = static_cast<ModelKind>(kind_byte);

  std::vector<std::string> arch(r.get<std::uint32_t>("architecture count"));
  if (arch.size() > 16) throw Error(ErrorCode::CorruptTensor, "implausible architecture count", r.pos());
  for (auto& a : arch) a = r.str("architecture string");

  Checkpoint ck;
  const auto n_labels = r.get<std::uint32_t>("alphabet");
  for (std::uint32_t i = 0; i < n_labels; ++i) ck.alphabet.add(r.str("alphabet"));

  auto& f = ck.features;
  f.preprocess.max_gap = r.get<double>("feature config");
  const auto method = r.get<std::uint8_t>("feature config");
  if (method > static_cast<std::uint8_t>(InterpolationMethod::Spline)) {
    throw Error(ErrorCode::CorruptTensor, "unknown interpolation method", r.pos() - 1);
  }
  f.preprocess.method = static_cast<InterpolationMethod>(method);
  f.stack_depth = r.get<std::int32_t>("feature config");
  f.map_size = r.get<std::int32_t>("feature config");
  f.eightdir.grid = r.get<std::int32_t>("feature config");
  f.eightdir.samples = r.get<std::int32_t>("feature config");
  f.eightdir.sigma = r.get<double>("feature config");
  f.eightdir.truncate = r.get<double>("feature config");
  f.eightdir.virtual_weight = r.get<double>("feature config");

  try {
    ck.model = assemble_model<float>(kind, arch);
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptTensor, std::string("stored architecture is invalid: ") + e.what());
  }

  const auto n_tensors = r.get<std::uint32_t>("tensor table");
  if (n_tensors != ck.model.params.size()) {
    throw Error(ErrorCode::CorruptTensor, "checkpoint holds " + std::to_string(n_tensors) + " tensors, architecture needs " +
                                              std::to_string(ck.model.params.size()));
  }
  for (auto& p : ck.model.params.items) {
    const std::size_t at = r.pos();
    const std::string name = r.str("tensor name");
    if (name != p.name) throw Error(ErrorCode::CorruptTensor, "expected tensor '" + p.name + "', found '" + name + "'", at);
    const auto group = r.get<std::uint8_t>("tensor header");
    if (group != static_cast<std::uint8_t>(p.group)) {
      throw Error(ErrorCode::CorruptTensor, "tensor '" + name + "' has the wrong parameter group", at);
    }
    Shape shape(r.get<std::uint32_t>("tensor header"));
    if (shape.size() > 8) throw Error(ErrorCode::CorruptTensor, "tensor '" + name + "' has implausible rank", at);
    for (auto& d : shape) d = r.get<std::int32_t>("tensor shape");
    if (shape != p.value.shape) {
      throw Error(ErrorCode::CorruptTensor, "tensor '" + name + "' has shape " + shape_string(shape) + ", expected " +
                                                shape_string(p.value.shape), at);
    }
    const auto count = r.get<std::uint64_t>("tensor header");
    if (count != p.value.size()) {
      throw Error(ErrorCode::CorruptTensor, "tensor '" + name + "' length " + std::to_string(count) +
                                                " does not match its shape", at);
    }
    r.need(count * sizeof(float), "tensor data");
    std::memcpy(p.value.ptr(), r.here(), count * sizeof(float));
    r.skip(count * sizeof(float));
  }
  if (r.pos() != r.size()) throw Error(ErrorCode::CorruptTensor, "trailing bytes after the last tensor", r.pos());
  return ck;
}

/// FNV-1a of the encoded checkpoint, as 16 hex digits.
inline std::string checkpoint_hash(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
  return out;
}

inline void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(ck));
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file_bytes(path)); }

}  // namespace ssdcnn

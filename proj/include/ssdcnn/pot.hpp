#pragma once

// Import of CASIA-style POT online handwriting records.
//
// Record layout, little-endian:
//   u16  sample_size    total bytes of the record, this field included
//   u8[4] tag           label code; the first two bytes are significant
//   u16  stroke_count
//   (i16 x, i16 y)*     point pairs; (-1, 0) closes a stroke,
//                       (-1, -1) closes the character

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <iconv.h>
#include <span>
#include <string>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/ink.hpp"

namespace ssdcnn {

namespace pot_detail {

inline std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

inline std::int16_t read_i16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::int16_t>(read_u16(b, at));
}

inline std::string hex_label(std::uint8_t hi, std::uint8_t lo) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "0x%02X%02X", hi, lo);
  return buf;
}

// GB2312/GB18030 double-byte code to UTF-8; falls back to a hex tag when
// the code does not decode.
inline std::string decode_tag(std::uint8_t b0, std::uint8_t b1) {
  if (b1 == 0 && b0 > 0x20 && b0 < 0x7F) return std::string(1, static_cast<char>(b0));
  if (b0 < 0x81) return hex_label(b0, b1);

  iconv_t cd = iconv_open("UTF-8", "GB18030");
  if (cd == reinterpret_cast<iconv_t>(-1)) return hex_label(b0, b1);
  char in[2] = {static_cast<char>(b0), static_cast<char>(b1)};
  char out[8] = {};
  char* in_ptr = in;
  char* out_ptr = out;
  std::size_t in_left = sizeof(in);
  std::size_t out_left = sizeof(out);
  const std::size_t rc = iconv(cd, &in_ptr, &in_left, &out_ptr, &out_left);
  iconv_close(cd);
  if (rc == static_cast<std::size_t>(-1) || in_left != 0) return hex_label(b0, b1);
  return std::string(out, out_ptr);
}

}  // namespace pot_detail

/// Parses a stream of concatenated POT records. Labels are added to the
/// alphabet in order of first appearance.
inline Dataset import_pot(std::span<const std::uint8_t> bytes) {
  using pot_detail::read_i16;
  using pot_detail::read_u16;
  constexpr std::size_t kHeader = 8;

  Dataset data;
  std::size_t pos = 0;
  std::size_t record = 0;
  while (pos < bytes.size()) {
    const std::size_t remaining = bytes.size() - pos;
    if (remaining < 2) {
      throw Error(ErrorCode::TruncatedRecord, "record " + std::to_string(record) + ": size field cut off", pos);
    }
    const std::size_t declared = read_u16(bytes, pos);
    if (declared > remaining) {
      throw Error(ErrorCode::TruncatedRecord,
                  "record " + std::to_string(record) + " declares " + std::to_string(declared) + " bytes, " +
                      std::to_string(remaining) + " remain",
                  pos);
    }
    if (declared < kHeader) {
      throw Error(ErrorCode::SizeMismatch,
                  "record " + std::to_string(record) + " declares " + std::to_string(declared) +
                      " bytes, shorter than its header",
                  pos);
    }
    auto rec = bytes.subspan(pos, declared);
    const std::string label = pot_detail::decode_tag(rec[2], rec[3]);
    const std::size_t stroke_count = read_u16(rec, 6);

    InkCharacter ink;
    Stroke current;
    std::size_t at = kHeader;
    bool closed = false;
    while (at + 4 <= rec.size()) {
      const std::int16_t x = read_i16(rec, at);
      const std::int16_t y = read_i16(rec, at + 2);
      at += 4;
      if (x == -1 && y == -1) {
        closed = true;
        break;
      }
      if (x == -1 && y == 0) {
        if (!current.points.empty()) ink.strokes.push_back(std::move(current));
        current = Stroke{};
        continue;
      }
      current.points.push_back(Point{static_cast<double>(x), static_cast<double>(y)});
    }
    if (!closed || !current.points.empty()) {
      throw Error(ErrorCode::MissingTerminator,
                  "record " + std::to_string(record) + " ends without a " +
                      std::string(closed ? "stroke" : "character") + " terminator",
                  pos + at);
    }
    if (at != declared) {
      throw Error(ErrorCode::SizeMismatch,
                  "record " + std::to_string(record) + " consumed " + std::to_string(at) + " of " +
                      std::to_string(declared) + " declared bytes",
                  pos + at);
    }
    if (ink.strokes.size() != stroke_count) {
      throw Error(ErrorCode::SizeMismatch,
                  "record " + std::to_string(record) + " declares " + std::to_string(stroke_count) +
                      " strokes, found " + std::to_string(ink.strokes.size()),
                  pos);
    }
    validate(ink);
    ink.label = data.alphabet.add(label);
    data.samples.push_back(std::move(ink));
    pos += declared;
    ++record;
  }
  return data;
}

/// Appends POT records from `more` to `into`, remapping labels.
inline void merge_into(Dataset& into, const Dataset& more) {
  for (auto ink : more.samples) {
    if (ink.label) ink.label = into.alphabet.add(more.alphabet.at(*ink.label));
    into.samples.push_back(std::move(ink));
  }
}

}  // namespace ssdcnn

#pragma once

// Canonical text format for ink datasets:
//
//   INKv1 <n_classes>
//   <alphabet entry>            (n_classes lines)
//   S <class_id|-> <writer|-> <n_strokes>
//   x,y x,y ...                 (one line per stroke)
//
// Numbers are written in shortest round-trip fixed notation, so writing a
// dataset that was read back from a written file reproduces the same bytes.

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/ink.hpp"

namespace ssdcnn {

inline constexpr int kCanonicalVersion = 1;

namespace detail {

inline void append_number(std::string& out, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  if (ec != std::errc()) {
    // Only reachable for magnitudes beyond ~1e40, which no pen device emits.
    throw Error(ErrorCode::MalformedFile, "coordinate too large for fixed notation");
  }
  out.append(buf, end);
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool has_space(std::string_view s) {
  for (char c : s) {
    if (is_space(c) || c == '\n') return true;
  }
  return false;
}

template <class Int>
bool parse_int(std::string_view tok, Int& out) {
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && p == tok.data() + tok.size();
}

inline bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out, std::chars_format::general);
  return ec == std::errc() && p == tok.data() + tok.size();
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next non-blank line, or false at end of input.
  bool next(std::string_view& line) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view raw = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      if (!trim(raw).empty()) {
        line = raw;
        return true;
      }
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

[[noreturn]] inline void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedFile, "line " + std::to_string(line) + ": " + what, line);
}

}  // namespace detail

inline std::string write_canonical(const Dataset& data) {
  validate(data);
  std::string out;
  out += "INKv" + std::to_string(kCanonicalVersion) + " " + std::to_string(data.alphabet.size()) + "\n";
  for (const auto& entry : data.alphabet.entries()) {
    if (entry.empty() || detail::has_space(entry)) {
      throw Error(ErrorCode::MalformedFile, "alphabet entry '" + entry + "' is empty or contains whitespace");
    }
    out += entry;
    out += '\n';
  }
  for (const auto& ink : data.samples) {
    out += "S ";
    out += ink.label ? std::to_string(*ink.label) : "-";
    out += ' ';
    if (ink.writer) {
      if (ink.writer->empty() || *ink.writer == "-" || detail::has_space(*ink.writer)) {
        throw Error(ErrorCode::MalformedFile, "writer id '" + *ink.writer + "' is not a single token");
      }
      out += *ink.writer;
    } else {
      out += '-';
    }
    out += ' ';
    out += std::to_string(ink.strokes.size());
    out += '\n';
    for (const auto& stroke : ink.strokes) {
      bool first = true;
      for (const auto& p : stroke.points) {
        if (!first) out += ' ';
        first = false;
        detail::append_number(out, p.x);
        out += ',';
        detail::append_number(out, p.y);
      }
      out += '\n';
    }
  }
  return out;
}

inline Dataset read_canonical(std::string_view text) {
  detail::LineReader lines(text);
  std::string_view line;
  if (!lines.next(line)) detail::malformed(1, "missing INKv header");

  auto header = detail::split_ws(line);
  if (header.size() != 2 || header[0].substr(0, 4) != "INKv") {
    detail::malformed(lines.line_no(), "expected 'INKv<version> <n_classes>'");
  }
  int version = 0;
  if (!detail::parse_int(header[0].substr(4), version)) {
    detail::malformed(lines.line_no(), "bad version field '" + std::string(header[0]) + "'");
  }
  if (version != kCanonicalVersion) {
    throw Error(ErrorCode::UnknownVersion, "ink file version " + std::to_string(version) + " is not supported",
                lines.line_no());
  }
  int n_classes = 0;
  if (!detail::parse_int(header[1], n_classes) || n_classes < 0) {
    detail::malformed(lines.line_no(), "bad class count '" + std::string(header[1]) + "'");
  }

  Dataset data;
  for (int c = 0; c < n_classes; ++c) {
    if (!lines.next(line)) detail::malformed(lines.line_no(), "alphabet ends after " + std::to_string(c) + " entries");
    const std::string entry(detail::trim(line));
    if (data.alphabet.find(entry)) detail::malformed(lines.line_no(), "duplicate alphabet entry '" + entry + "'");
    data.alphabet.add(entry);
  }

  while (lines.next(line)) {
    auto toks = detail::split_ws(line);
    if (toks.size() != 4 || toks[0] != "S") {
      detail::malformed(lines.line_no(), "expected 'S <class_id|-> <writer|-> <n_strokes>'");
    }
    InkCharacter ink;
    if (toks[1] != "-") {
      int label = 0;
      if (!detail::parse_int(toks[1], label) || label < 0 || label >= n_classes) {
        detail::malformed(lines.line_no(), "class id '" + std::string(toks[1]) + "' outside alphabet");
      }
      ink.label = label;
    }
    if (toks[2] != "-") ink.writer = std::string(toks[2]);
    std::size_t n_strokes = 0;
    if (!detail::parse_int(toks[3], n_strokes) || n_strokes == 0) {
      detail::malformed(lines.line_no(), "stroke count must be a positive integer");
    }
    for (std::size_t s = 0; s < n_strokes; ++s) {
      if (!lines.next(line)) detail::malformed(lines.line_no(), "sample ends before stroke " + std::to_string(s));
      Stroke stroke;
      for (auto tok : detail::split_ws(line)) {
        const auto comma = tok.find(',');
        Point p;
        if (comma == std::string_view::npos || !detail::parse_double(tok.substr(0, comma), p.x) ||
            !detail::parse_double(tok.substr(comma + 1), p.y)) {
          detail::malformed(lines.line_no(), "bad point '" + std::string(tok) + "'");
        }
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
          detail::malformed(lines.line_no(), "non-finite point '" + std::string(tok) + "'");
        }
        stroke.points.push_back(p);
      }
      ink.strokes.push_back(std::move(stroke));
    }
    data.samples.push_back(std::move(ink));
  }
  return data;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

inline Dataset load_dataset(const std::filesystem::path& path) { return read_canonical(read_file_bytes(path)); }

inline void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  write_file_bytes(path, write_canonical(data));
}

}  // namespace ssdcnn

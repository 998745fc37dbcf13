#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ssdcnn {

enum class ErrorCode {
  // ink
  EmptyCharacter,
  EmptyStroke,
  NonFiniteCoordinate,
  MalformedFile,
  UnknownVersion,
  TruncatedRecord,
  MissingTerminator,
  SizeMismatch,
  // preprocessing / rasterization
  NonPositiveGap,
  CoordinateOutOfRange,
  ZeroLengthSegment,
  // architecture strings
  SyntaxError,
  EmptySpec,
  ShapeError,
  // numerics
  ShapeMismatch,
  NonFiniteScore,
  IndexOutOfRange,
  // pipeline
  EmptyDataset,
  UnlabeledSample,
  // checkpoints
  BadMagic,
  VersionMismatch,
  CorruptTensor,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCharacter: return "EmptyCharacter";
    case ErrorCode::EmptyStroke: return "EmptyStroke";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::TruncatedRecord: return "TruncatedRecord";
    case ErrorCode::MissingTerminator: return "MissingTerminator";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NonPositiveGap: return "NonPositiveGap";
    case ErrorCode::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorCode::ZeroLengthSegment: return "ZeroLengthSegment";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::EmptySpec: return "EmptySpec";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnlabeledSample: return "UnlabeledSample";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptTensor: return "CorruptTensor";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Library-wide exception. `index()` carries the offending stroke, point,
/// layer, byte offset or line number when the failing operation has one.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorCode code, const std::string& message, std::size_t index = npos)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::size_t index_;
};

}  // namespace ssdcnn

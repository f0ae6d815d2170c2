#pragma once

#include <stdexcept>
#include <string>

namespace microlocal {

/// Failure raised by a toolkit operation. `name()` is the stable error
/// identifier (e.g. "InsufficientOctaves") that the CLI reports on exit.
class Error : public std::runtime_error {
public:
  Error(std::string name, const std::string& message);

  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

namespace errors {
inline constexpr const char* kInvalidArgument = "InvalidArgument";
inline constexpr const char* kInsufficientOctaves = "InsufficientOctaves";
inline constexpr const char* kNormalsIntersect = "NormalsIntersect";
inline constexpr const char* kSizeLimit = "SizeLimit";
inline constexpr const char* kQuadratureFailure = "QuadratureFailure";
inline constexpr const char* kEmptySequence = "EmptySequence";
inline constexpr const char* kChannelMismatch = "ChannelMismatch";
inline constexpr const char* kGeometryMismatch = "GeometryMismatch";
inline constexpr const char* kRankOutOfRange = "RankOutOfRange";
inline constexpr const char* kConfigError = "ConfigError";
inline constexpr const char* kFormatError = "FormatError";
}  // namespace errors

[[noreturn]] void fail(const char* name, const std::string& message);

inline void require(bool condition, const char* name, const std::string& message) {
  if (!condition) fail(name, message);
}

}  // namespace microlocal

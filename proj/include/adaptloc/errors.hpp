#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace adaptloc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };
struct CoordinateOutOfBounds : Error { using Error::Error; };
struct EndpointQuery : Error { using Error::Error; };
struct CrossingSegments : Error { using Error::Error; };
struct SegmentOutOfBox : Error { using Error::Error; };
struct OutOfBox : Error { using Error::Error; };
struct NonPositiveWeight : Error { using Error::Error; };
struct RegionNotInTriangulation : Error { using Error::Error; };
struct EmptySubset : Error { using Error::Error; };
struct UnknownRegion : Error { using Error::Error; };
struct InvalidPolicy : Error { using Error::Error; };
struct InsufficientRoom : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Carries the full violation list produced by validate().
struct ValidationError : Error {
  explicit ValidationError(std::vector<std::string> v)
      : Error(join(v)), violations(std::move(v)) {}

  std::vector<std::string> violations;

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid triangulation:";
    for (const auto& s : v) {
      out += ' ';
      out += s;
      out += ';';
    }
    return out;
  }
};

}  // namespace adaptloc

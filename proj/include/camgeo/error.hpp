#pragma once

#include <stdexcept>
#include <string>

namespace camgeo {

// Bad input: malformed files, invariant violations at construction, shape
// mismatches. Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Well-formed input whose geometry or numerics make the result undefined
// (zero baseline, non-finite values). Maps to CLI exit code 3.
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace camgeo

#pragma once

#include <stdexcept>
#include <string>

namespace crs {

// Base class for all domain errors raised by the kernel.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Two objects living over different ground spaces were combined.
struct SpaceMismatch : Error {
  explicit SpaceMismatch(const std::string& what) : Error(what) {}
};

// A map expected to be coarse for a construction is not.
struct NotCoarse : Error {
  explicit NotCoarse(const std::string& what) : Error(what) {}
};

// A push-forward produced a sheared piece (distinct tail slopes over an
// infinite support) that has no closed band/rectangle form.
struct UnsupportedShear : Error {
  explicit UnsupportedShear(const std::string& what) : Error(what) {}
};

// Quotient construction requires the collapsed set to carry its unit.
struct NotUnitalSubspace : Error {
  explicit NotUnitalSubspace(const std::string& what) : Error(what) {}
};

// No injection into the requested terminated target exists (e.g. a space
// with rays into a target with only point components).
struct NoMapToTerminated : Error {
  explicit NoMapToTerminated(const std::string& what) : Error(what) {}
};

// Product requested outside the supported fragment.
struct UnsupportedProduct : Error {
  explicit UnsupportedProduct(const std::string& what) : Error(what) {}
};

// An enumeration or search exceeded its configured size budget.
struct SizeBound : Error {
  explicit SizeBound(const std::string& what) : Error(what) {}
};

// Malformed textual/JSON input.
struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(what) {}
};

// A workspace reference did not resolve to an object of the expected kind.
struct ResolveError : Error {
  explicit ResolveError(const std::string& what) : Error(what) {}
};

// An argument violated a documented precondition (e.g. slope 0 where >= 1
// is required).
struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

}  // namespace crs

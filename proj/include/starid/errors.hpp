#pragma once

#include <stdexcept>
#include <string>

namespace starid {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point coincides with the projection pole and has no planar image.
class DegenerateProjection : public Error {
 public:
  using Error::Error;
};

/// Fewer than three stars survived catalog filtering.
class EmptyCatalog : public Error {
 public:
  using Error::Error;
};

/// Malformed catalog file or CSV input (bad magic, version, checksum, field).
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A scene needs at least three stars to carry triplet features.
class TooFewStars : public Error {
 public:
  using Error::Error;
};

/// Attitude estimation needs two or more non-collinear correspondences.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

}  // namespace starid

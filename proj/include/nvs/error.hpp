#pragma once

#include <stdexcept>
#include <string>

namespace nvs {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDepthError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class BehindCameraError : public Error {
 public:
  using Error::Error;
};

// Invalid intrinsics, non-rigid poses, unreadable calibration files.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class AllHolesError : public Error {
 public:
  using Error::Error;
};

class EmptySelectionError : public Error {
 public:
  using Error::Error;
};

}  // namespace nvs

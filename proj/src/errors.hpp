#pragma once

#include <stdexcept>
#include <string>

namespace uqrpca {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Shape,
  Numeric,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorCode::Shape, what) {}
};

class AdjointStructureError : public Error {
 public:
  explicit AdjointStructureError(const std::string& what) : Error(ErrorCode::Numeric, what) {}
};

class FactorError : public Error {
 public:
  explicit FactorError(const std::string& what) : Error(ErrorCode::Numeric, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::InvalidArgument, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

}  // namespace uqrpca

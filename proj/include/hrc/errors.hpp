#pragma once

#include <stdexcept>
#include <string>

namespace hrc {

enum class ErrorKind {
  kConfig,       // malformed or invalid scenario description
  kNumerical,    // divergence / non-finite values during integration
  kSingular,     // singular matrix or kinematic singularity
  kUnreachable,  // target outside the arm workspace
  kDomain,       // argument outside the valid domain (time, figure index, ...)
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Names the offending config key, e.g. "cost.R".
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(ErrorKind::kConfig, key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what)
      : Error(ErrorKind::kSingular, what) {}
};

class UnreachableError : public Error {
 public:
  explicit UnreachableError(const std::string& what)
      : Error(ErrorKind::kUnreachable, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::kDomain, what) {}
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& message)
      : Error(ErrorKind::kIo, path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace hrc

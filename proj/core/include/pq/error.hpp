#pragma once

#include <stdexcept>
#include <string>

namespace pq {

// Base of every error the library throws. The CLI maps the category to an
// exit code, so each concrete error picks exactly one.
class Error : public std::runtime_error {
 public:
  enum class Category { config, numerical, io };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

// Parameter outside its physical domain (negative length, v = 0, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(Category::config, what) {}
};

// Configuration file problems: unknown key, wrong unit, bad syntax.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::config, what) {}
};

// A formula hit a pole: mechanical instability threshold, magnet collision.
class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what) : Error(Category::numerical, what) {}
};

// Integration produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time)
      : Error(Category::numerical, what + " at t = " + std::to_string(time) + " s"),
        time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

// Signal-processing precondition failures (too short, kernel narrower than
// the sampling step, all-zero populations, empty window).
class SignalError : public Error {
 public:
  explicit SignalError(const std::string& what) : Error(Category::numerical, what) {}
};

// The drive never reaches the avoided crossing (A < |eps0|).
class NoCrossingError : public Error {
 public:
  explicit NoCrossingError(const std::string& what) : Error(Category::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Category::io, what) {}
};

}  // namespace pq

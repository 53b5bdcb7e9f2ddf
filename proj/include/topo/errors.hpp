#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace topo {

// Base for every error raised by the library. The CLI maps subclasses to
// exit codes: ConvergenceError -> 3, everything else -> 2.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
  public:
    using Error::Error;
};

class ParameterError : public Error {
  public:
    using Error::Error;
};

class InvalidFiltrationError : public Error {
  public:
    using Error::Error;
};

class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

// Outside the domain of the balanced 1-D oracle (unequal total masses).
class DomainError : public Error {
  public:
    using Error::Error;
};

class FormatError : public Error {
  public:
    FormatError(const std::string& file, std::size_t offset, const std::string& what)
        : Error(file + " @" + std::to_string(offset) + ": " + what), file_(file), offset_(offset) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t offset() const noexcept { return offset_; }

  private:
    std::string file_;
    std::size_t offset_;
};

class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, std::size_t iterations, double last_delta)
        : Error(what + " (iterations=" + std::to_string(iterations) +
                ", last_delta=" + std::to_string(last_delta) + ")"),
          iterations_(iterations), last_delta_(last_delta) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double last_delta() const noexcept { return last_delta_; }

  private:
    std::size_t iterations_;
    double last_delta_;
};

}  // namespace topo

// Exception types shared across the library. ValidationError marks bad
// inputs; ConvergenceError marks numerical non-convergence. The CLI maps
// them to exit codes 1 and 2 respectively.
#pragma once

#include <stdexcept>
#include <string>

namespace dht {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(what) {}
};

}  // namespace dht

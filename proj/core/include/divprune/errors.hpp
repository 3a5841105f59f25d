#ifndef DIVPRUNE_ERRORS_HPP
#define DIVPRUNE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace divprune {

// Bad input data (files, CSV cells, label sets). CLI maps this to exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A mathematical identity the implementation guarantees was violated.
// Signals an implementation bug, never bad user input. CLI exit code 4.
class InternalConsistencyError : public std::logic_error {
public:
    explicit InternalConsistencyError(const std::string& what) : std::logic_error(what) {}
};

// Pruning could not select a single classifier.
class NoSelectionError : public std::runtime_error {
public:
    explicit NoSelectionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace divprune

#endif

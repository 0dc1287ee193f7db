#pragma once

#include <stdexcept>
#include <string>

namespace corrscreen {

// Malformed or inconsistent input data (ragged rows, duplicate ids,
// mismatched treatments, unequal sample counts for a cross screen).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A threshold or detectable-correlation solve has no solution in (0,1).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, read, or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace corrscreen

#pragma once

#include <stdexcept>
#include <string>

namespace xlemb {

// Error hierarchy. The three top-level categories map one-to-one onto the
// CLI exit codes (usage 1, data 2, numeric 3).

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public DataError {
public:
    using DataError::DataError;
};

class CompositionError : public DataError {
public:
    using DataError::DataError;
};

class SamplingError : public DataError {
public:
    using DataError::DataError;
};

class DimensionError : public DataError {
public:
    using DataError::DataError;
};

class OovError : public DataError {
public:
    using DataError::DataError;
};

class LabelError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace xlemb

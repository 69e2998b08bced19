#pragma once

#include <stdexcept>
#include <string>

namespace geofuse {

// Base for all library errors. Subclasses map onto CLI exit codes, see
// commands.cpp: config 1, numeric 2, data/schema 3, unsupported 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration: bad hyperparameters, incompatible option combos.
struct ConfigError : Error {
    using Error::Error;
};

// Invalid domain values: out-of-range coordinates, mixtures off the simplex,
// degenerate inputs.
struct ValidationError : Error {
    using Error::Error;
};

// Tensor/layer dimension mismatches.
struct ShapeError : Error {
    using Error::Error;
};

// Non-finite values where finite ones are required (NaN loss, inf gradient).
struct NumericError : Error {
    using Error::Error;
};

// Malformed or inconsistent external data: CSV parse failures, missing keys,
// checkpoint/data schema mismatches.
struct DataError : Error {
    using Error::Error;
};

// Requested operation is not defined for the given configuration
// (e.g. cluster maps for encoders without a coordinate input).
struct UnsupportedError : Error {
    using Error::Error;
};

} // namespace geofuse

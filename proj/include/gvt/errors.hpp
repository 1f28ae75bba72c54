#pragma once

#include <stdexcept>
#include <string>

namespace gvt {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand shapes do not line up.
struct DimensionError : Error {
    using Error::Error;
};

// A call violates an API precondition (non-scalar backward, asymmetric
// matrix where symmetry is required, out-of-range schedule step, ...).
struct ContractError : Error {
    using Error::Error;
};

// Invalid model / run configuration; message names the offending field.
struct ConfigError : Error {
    using Error::Error;
};

// NaN/Inf where finite values are required, or an iterative solve failed.
struct NumericError : Error {
    using Error::Error;
};

// Dataset files missing or unreadable; message names the file.
struct IngestError : Error {
    using Error::Error;
};

// A binary payload does not match its declared layout.
struct FormatError : Error {
    using Error::Error;
};

}  // namespace gvt

#pragma once

#include <stdexcept>
#include <string>

namespace sdc {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand shapes do not line up (matmul, broadcast, code length mismatch).
struct ShapeError : Error {
    using Error::Error;
};

// Argument outside its mathematical domain (quantile not in [0,1], d > K, ...).
struct DomainError : Error {
    using Error::Error;
};

// Structurally valid input that the operation cannot handle (zero row,
// single-class label set, batch too small to form a pair).
struct DegenerateInputError : Error {
    using Error::Error;
};

// Malformed or truncated file content; message carries the byte offset.
struct FormatError : Error {
    using Error::Error;
};

// Value cannot be encoded (non +/-1 entry handed to the bit packer).
struct EncodingError : Error {
    using Error::Error;
};

// Numerical breakdown at runtime (NaN loss, non-finite parameter).
struct NumericError : Error {
    using Error::Error;
};

}  // namespace sdc

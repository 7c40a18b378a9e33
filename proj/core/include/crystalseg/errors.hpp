#pragma once

#include <stdexcept>
#include <string>

namespace crystalseg {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input bytes or text (bad PGM header, bad detection line, ...).
struct FormatError : Error {
    using Error::Error;
};

/// A value contract was violated (non-contiguous label ids, box outside
/// the image, empty mask where a nonempty one is required, ...).
struct ValidationError : Error {
    using Error::Error;
};

/// Synthetic scene generation could not place an object.
struct GenerationError : Error {
    using Error::Error;
};

}  // namespace crystalseg

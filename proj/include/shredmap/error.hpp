#pragma once

#include <stdexcept>
#include <string>

namespace shredmap {

// Base for every error the library reports. Messages are meant for end users.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A region, coordinate or index falls outside the image it addresses.
class BoundsError : public Error {
public:
    using Error::Error;
};

// Bad or missing input file, malformed record, duplicate id.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace shredmap

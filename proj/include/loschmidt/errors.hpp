#pragma once

#include <stdexcept>
#include <string>

namespace loschmidt {

// Base of every error raised by the library. Contract violations by the
// caller (bad sizes, non-finite input) use std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PacketUnresolvable : public Error {
public:
    using Error::Error;
};

class UnresolvedOscillations : public Error {
public:
    using Error::Error;
};

class OscillationUnderresolved : public Error {
public:
    using Error::Error;
};

class RegimeViolation : public Error {
public:
    using Error::Error;
};

class NoStationaryPoints : public Error {
public:
    using Error::Error;
};

class InsufficientWindow : public Error {
public:
    using Error::Error;
};

class NonpositiveValues : public Error {
public:
    using Error::Error;
};

}  // namespace loschmidt

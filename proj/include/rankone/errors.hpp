#pragma once

#include <stdexcept>
#include <string>

namespace rankone {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonPositiveScale : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class EmptyTargets : public Error {
public:
    using Error::Error;
};

/// C and D overlap, contain 1, contain duplicates, or hold values <= 1.
class InvalidTargets : public Error {
public:
    using Error::Error;
};

class StageOutOfRange : public Error {
public:
    using Error::Error;
};

/// The requested flow time cannot be absorbed by the built stages.
class HorizonExceeded : public Error {
public:
    using Error::Error;
};

class NoMatchingStages : public Error {
public:
    using Error::Error;
};

class UncertifiedWindow : public Error {
public:
    using Error::Error;
};

class NotDissipative : public Error {
public:
    using Error::Error;
};

}  // namespace rankone

#pragma once

#include <stdexcept>
#include <string>

namespace pswb {

/// Base class for every error raised by the workbench.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class NotSymplectic : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NotSymmetric : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Raised when a chirp or resampling step would alias on the current grid.
class AliasingRisk : public Error {
public:
    using Error::Error;
};

class NotCovariantError : public Error {
public:
    using Error::Error;
};

class Unsupported : public Error {
public:
    using Error::Error;
};

class TooFewShells : public Error {
public:
    using Error::Error;
};

class SizeOverflow : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace pswb

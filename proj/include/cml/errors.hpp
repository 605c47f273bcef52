#pragma once

#include <stdexcept>
#include <string>

namespace cml {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A DAG was requested but the input contains a directed cycle.
class CyclicInput : public Error {
public:
    using Error::Error;
};

/// A query that needs an ancestral graph received one with a (almost) directed cycle or circle marks.
class NotAncestral : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Principal covariance submatrix too ill-conditioned to invert.
class SingularSubmatrix : public Error {
public:
    using Error::Error;
};

/// Fisher-z requires n - |S| - 3 > 0.
class InsufficientSample : public Error {
public:
    using Error::Error;
};

class DegenerateCorrelation : public Error {
public:
    using Error::Error;
};

class RankDeficient : public Error {
public:
    using Error::Error;
};

}  // namespace cml

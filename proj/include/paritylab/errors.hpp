#pragma once

#include <stdexcept>
#include <string>

namespace paritylab {

// Root of every library-specific failure.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Probability mass escaped the retained Fock window.
class TruncationOverflow : public Error {
public:
    using Error::Error;
};

// A state (or projected branch) has no norm left to normalize.
class DegenerateState : public Error {
public:
    using Error::Error;
};

// Parameter outside the mathematical domain of a constructor or formula.
class DomainError : public Error {
public:
    using Error::Error;
};

// Invalid (j, m) labels.
class IndexError : public Error {
public:
    using Error::Error;
};

class DerivativeSingularity : public Error {
public:
    using Error::Error;
};

// Fisher-information terms with vanishing probability but non-vanishing slope.
class IllConditioned : public Error {
public:
    using Error::Error;
};

// Parity expectation pinned at +-1, where the single-shot Fisher formula is 0/0.
class Saturated : public Error {
public:
    using Error::Error;
};

class NotAState : public Error {
public:
    using Error::Error;
};

class NonIdentifiable : public Error {
public:
    using Error::Error;
};

class UnknownAtomNumber : public Error {
public:
    using Error::Error;
};

// Two independent evaluation paths disagree beyond their stated tolerance.
class ContractViolation : public Error {
public:
    using Error::Error;
};

}  // namespace paritylab

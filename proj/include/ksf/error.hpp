#pragma once

#include <stdexcept>
#include <string>

namespace ksf {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, invalid configurations, inconsistent sets.
/// The CLI maps these to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical precondition failed on data that passed input validation.
/// The CLI maps these to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

#define KSF_DEFINE_ERROR(Name, Base) \
    class Name : public Base {       \
    public:                          \
        using Base::Base;            \
    };

KSF_DEFINE_ERROR(ZeroVector, NumericalError)
KSF_DEFINE_ERROR(DegeneratePair, NumericalError)
KSF_DEFINE_ERROR(DegenerateFrame, NumericalError)
KSF_DEFINE_ERROR(InvalidState, NumericalError)

KSF_DEFINE_ERROR(ValidationError, InputError)
KSF_DEFINE_ERROR(ParseError, InputError)
KSF_DEFINE_ERROR(ColorableSet, InputError)
KSF_DEFINE_ERROR(IncompleteModel, InputError)
KSF_DEFINE_ERROR(InvalidConfig, InputError)
KSF_DEFINE_ERROR(UnknownTriad, InputError)

#undef KSF_DEFINE_ERROR

/// Row-level CSV failure; carries the 1-based line number.
class MalformedRow : public InputError {
public:
    MalformedRow(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace ksf

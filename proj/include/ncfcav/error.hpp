#pragma once

#include <stdexcept>
#include <string>

namespace ncfcav
{
// Bad input: malformed design file, out-of-range parameter, unreadable path.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure could not produce a trustworthy result.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class FitFailure
{
    NoDipFound,
    NotConverged,
    GridLimited,
    Unreachable,
};

const char *to_string(FitFailure kind);

class FitError : public NumericalError
{
public:
    FitError(FitFailure kind, const std::string &what)
        : NumericalError(what), kind_(kind)
    {
    }
    FitFailure kind() const noexcept { return kind_; }

private:
    FitFailure kind_;
};

// A result violated one of the library's own invariants (a bug, not bad input).
class InvariantError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

} // namespace ncfcav

#ifndef SHARPK_ERRORS_HPP
#define SHARPK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sharpk {

/// An input violates a documented precondition (bad d, n, rho, t, ...).
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A function was evaluated outside its domain.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A request would exceed the configured memory or work budget.
class resource_exhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An enclosure could not be tightened to the requested width.
class enclosure_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The asymptotic model does not dominate the searched region.
class inconclusive_search : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw precondition_error(what);
    }
}

} // namespace detail
} // namespace sharpk

#endif // SHARPK_ERRORS_HPP

#ifndef NCDYN_ERRORS_HPP
#define NCDYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ncdyn {

// Malformed or out-of-range scenario configuration. The CLI maps this to
// exit code 2.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A solver left its admissible region (blow-up, negative occupation,
// non-finite accumulator). Carries the failing time stamp; the CLI maps
// this to exit code 3.
class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, double t_fail)
        : std::runtime_error(what + " (t = " + std::to_string(t_fail) + ")"),
          t_fail_(t_fail) {}

    double t_fail() const { return t_fail_; }

private:
    double t_fail_;
};

} // namespace ncdyn

#endif

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace treequad {

enum class Errc {
    invalid_argument,
    invalid_dimension,
    invalid_domain,
    invalid_cut,
    empty_container,
    degenerate_container,
    empty_input,
    empty_batch,
    sampler_failure,
    invalid_proposal,
    invalid_input,
    no_mass,
    unsupported,
    budget_exhausted,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the grid runner in particular) can tag failed runs.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace treequad

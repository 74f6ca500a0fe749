#include "treequad/error.hpp"

namespace treequad {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::invalid_dimension: return "invalid-dimension";
        case Errc::invalid_domain: return "invalid-domain";
        case Errc::invalid_cut: return "invalid-cut";
        case Errc::empty_container: return "empty-container";
        case Errc::degenerate_container: return "degenerate-container";
        case Errc::empty_input: return "empty-input";
        case Errc::empty_batch: return "empty-batch";
        case Errc::sampler_failure: return "sampler-failure";
        case Errc::invalid_proposal: return "invalid-proposal";
        case Errc::invalid_input: return "invalid-input";
        case Errc::no_mass: return "no-mass";
        case Errc::unsupported: return "unsupported";
        case Errc::budget_exhausted: return "budget-exhausted";
    }
    return "unknown";
}

}  // namespace treequad

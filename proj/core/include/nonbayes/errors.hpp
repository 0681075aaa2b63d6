#pragma once

#include <stdexcept>
#include <string>

namespace nonbayes {

/// Error codes carried by every nonbayes::Error. Each construction-time
/// code names the violated model assumption so callers can report it.
enum class Errc {
    NonSimplexPrior,            // prior entries outside [0,1] or sum != 1
    ZeroSupportPrior,           // prior not strictly interior
    RowNotDistribution,         // per-state likelihoods do not sum to 1
    ZeroProbabilityRealization, // some realization has ~zero marginal mass
    NotADistribution,           // generic probability-vector violation
    DimensionMismatch,
    IndexOutOfRange,
    MissingRealization,
    InvalidParameter,
    LeftSimplex,                // stretch overshoot left the simplex
    EmptyPointSet,
    EmptyGenerators,
    AffineDependence,
    NotOutsideHull,             // hull-escape construction does not apply
    NoMisreading,               // confirmatory construction: all q_s = 1
    SamplingExhausted,
    ConstructionFailed,         // internal exactness check failed
    ParseError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace nonbayes

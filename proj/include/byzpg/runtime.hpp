#pragma once

#include <string_view>

#include "byzpg/vec.hpp"

namespace byzpg {

// Stream purposes; one derived stream per (agent, purpose, round) keeps RNG
// consumption in one phase from leaking into another.
inline constexpr std::string_view kPurposeInit = "init";
inline constexpr std::string_view kPurposeSample = "sample";
inline constexpr std::string_view kPurposeCommonCoin = "common_coin";
inline constexpr std::string_view kPurposeBucketing = "bucketing";
inline constexpr std::string_view kPurposeByzSelect = "byz_select";
inline constexpr std::string_view kPurposeByzPayload = "byz_payload";

/// Hard error with round/agent diagnostics when a simulation value goes
/// non-finite.
void ensure_finite(const ParamVector& v, int round, int agent, std::string_view what);
void ensure_finite_scalar(double x, int round, int agent, std::string_view what);

}  // namespace byzpg

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vppfreq/allocator.hpp"
#include "vppfreq/freq_model.hpp"
#include "vppfreq/ode_oracle.hpp"
#include "vppfreq/requirements.hpp"

namespace vppfreq {

struct SamplingConfig {
  std::size_t n_samples = 200;
  std::uint64_t seed = 42;

  bool operator==(const SamplingConfig&) const = default;
};

/// Everything a command needs, as read from one JSON document. Field names in
/// the document carry their units (`h0_s`, `f_db1_hz`, ...).
struct Scenario {
  GridParams grid;
  Disturbance disturbance;
  SecurityLimits limits;
  std::vector<IbrSpec> ibrs;
  SamplingConfig sampling;
  SimConfig sim;
  AllocationOptions allocation;
  std::optional<Compensation> compensation;
  /// Explicit VPP parameters for `simulate`; the determined requirement is
  /// used when absent.
  std::optional<VppParams> vpp;

  bool operator==(const Scenario&) const = default;
};

/// Throws Error(InvalidInput) on malformed JSON, unknown keys, missing
/// required fields or invariant violations.
Scenario parse_scenario(std::string_view json_text);

/// Pretty-printed JSON; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

void validate(const Scenario& scenario);

}  // namespace vppfreq

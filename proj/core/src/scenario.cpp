#include "vppfreq/scenario.hpp"

#include <cmath>
#include <initializer_list>
#include <json.hpp>

#include "vppfreq/errors.hpp"

namespace vppfreq {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidInput, what);
}

// Rejects keys outside `allowed` so that a misspelt unit suffix does not
// silently fall back to a default.
void check_keys(const json& obj, std::string_view where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) invalid(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) invalid("unknown key '" + key + "' in " + std::string(where));
  }
}

double number(const json& obj, std::string_view where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    invalid("missing '" + std::string(key) + "' in " + std::string(where));
  }
  if (!it->is_number()) {
    invalid("'" + std::string(key) + "' in " + std::string(where) +
            " must be a number");
  }
  return it->get<double>();
}

double number_or(const json& obj, std::string_view where, const char* key,
                 double fallback) {
  return obj.contains(key) ? number(obj, where, key) : fallback;
}

std::optional<double> optional_number(const json& obj, std::string_view where,
                                      const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return number(obj, where, key);
}

template <typename Int>
Int integer_or(const json& obj, std::string_view where, const char* key,
               Int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) {
    invalid("'" + std::string(key) + "' in " + std::string(where) +
            " must be a non-negative integer");
  }
  return v.get<Int>();
}

bool boolean_or(const json& obj, std::string_view where, const char* key,
                bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) {
    invalid("'" + std::string(key) + "' in " + std::string(where) +
            " must be a boolean");
  }
  return obj.at(key).get<bool>();
}

const json& section(const json& root, const char* key) {
  const auto it = root.find(key);
  if (it == root.end()) invalid("missing section '" + std::string(key) + "'");
  return *it;
}

IbrSpec parse_ibr(const json& j, std::size_t index) {
  const std::string where = "ibrs[" + std::to_string(index) + "]";
  check_keys(j, where,
             {"alpha_per_s", "beta_per_pu", "p_rated_pu", "p_avail_pu",
              "h_min_s", "h_max_s", "d_min_pu", "d_max_pu"});
  IbrSpec ibr;
  ibr.alpha = number(j, where, "alpha_per_s");
  ibr.beta = number(j, where, "beta_per_pu");
  ibr.p_rated = number(j, where, "p_rated_pu");
  ibr.p_avail = optional_number(j, where, "p_avail_pu");
  ibr.h_min = number_or(j, where, "h_min_s", 0.0);
  ibr.h_max = optional_number(j, where, "h_max_s");
  ibr.d_min = number_or(j, where, "d_min_pu", 0.0);
  ibr.d_max = optional_number(j, where, "d_max_pu");
  return ibr;
}

}  // namespace

void validate(const Scenario& s) {
  validate(s.grid);
  validate(s.disturbance);
  if (!activates(s.grid, s.disturbance, s.grid.f_db1)) {
    invalid("disturbance never drives frequency outside the VPP dead band");
  }
  validate(s.limits);
  validate(s.sim);
  if (s.vpp) validate(*s.vpp);
  if (s.sampling.n_samples == 0) invalid("sampling.n_samples must be >= 1");
  if (s.compensation && (!std::isfinite(s.compensation->a) ||
                         !std::isfinite(s.compensation->b))) {
    invalid("compensation must be finite");
  }
}

Scenario parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    invalid(std::string("scenario is not valid JSON: ") + e.what());
  }
  check_keys(root, "scenario",
             {"grid", "disturbance", "limits", "ibrs", "sampling", "sim",
              "allocation", "compensation", "vpp"});

  Scenario s;
  {
    const auto& g = section(root, "grid");
    check_keys(g, "grid",
               {"d0_pu", "h0_s", "r_pu", "t_sg_s", "f0_hz", "f_db1_hz",
                "f_db2_hz"});
    s.grid.d0 = number(g, "grid", "d0_pu");
    s.grid.h0 = number(g, "grid", "h0_s");
    s.grid.r = number(g, "grid", "r_pu");
    s.grid.t_sg = number(g, "grid", "t_sg_s");
    s.grid.f0 = number(g, "grid", "f0_hz");
    s.grid.f_db1 = number(g, "grid", "f_db1_hz");
    s.grid.f_db2 = number(g, "grid", "f_db2_hz");
  }
  {
    const auto& d = section(root, "disturbance");
    check_keys(d, "disturbance", {"delta_p_pu"});
    s.disturbance.delta_p = number(d, "disturbance", "delta_p_pu");
  }
  {
    const auto& l = section(root, "limits");
    check_keys(l, "limits",
               {"rocof_hz_per_s", "nadir_hz", "qss_hz", "h_vpp_max_s",
                "d_vpp_max_pu"});
    s.limits.rocof_lim = number(l, "limits", "rocof_hz_per_s");
    s.limits.nadir_lim = number(l, "limits", "nadir_hz");
    s.limits.qss_lim = number(l, "limits", "qss_hz");
    s.limits.h_vpp_max = number_or(l, "limits", "h_vpp_max_s", 50.0);
    s.limits.d_vpp_max = number_or(l, "limits", "d_vpp_max_pu", 50.0);
  }
  if (root.contains("ibrs")) {
    const auto& list = root.at("ibrs");
    if (!list.is_array()) invalid("ibrs must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      s.ibrs.push_back(parse_ibr(list[i], i));
    }
  }
  if (root.contains("sampling")) {
    const auto& j = root.at("sampling");
    check_keys(j, "sampling", {"n_samples", "seed"});
    s.sampling.n_samples =
        integer_or<std::size_t>(j, "sampling", "n_samples", 200);
    s.sampling.seed = integer_or<std::uint64_t>(j, "sampling", "seed", 42);
  }
  if (root.contains("sim")) {
    const auto& j = root.at("sim");
    check_keys(j, "sim", {"dt_s", "t_end_s", "t_vpp_s", "record_every"});
    s.sim.dt = number_or(j, "sim", "dt_s", s.sim.dt);
    s.sim.t_end = number_or(j, "sim", "t_end_s", s.sim.t_end);
    s.sim.t_vpp = number_or(j, "sim", "t_vpp_s", s.sim.t_vpp);
    s.sim.record_every =
        integer_or<std::size_t>(j, "sim", "record_every", s.sim.record_every);
  }
  if (root.contains("allocation")) {
    const auto& j = root.at("allocation");
    check_keys(j, "allocation", {"cap_damping_at_ideal", "normalize"});
    s.allocation.cap_damping_at_ideal =
        boolean_or(j, "allocation", "cap_damping_at_ideal", true);
    s.allocation.normalize = boolean_or(j, "allocation", "normalize", false);
  }
  if (root.contains("compensation") && !root.at("compensation").is_null()) {
    const auto& j = root.at("compensation");
    check_keys(j, "compensation", {"a_per_s", "b_per_pu"});
    s.compensation = Compensation{number(j, "compensation", "a_per_s"),
                                  number(j, "compensation", "b_per_pu")};
  }
  if (root.contains("vpp") && !root.at("vpp").is_null()) {
    const auto& j = root.at("vpp");
    check_keys(j, "vpp", {"h_vpp_s", "d_vpp_pu"});
    s.vpp = VppParams{number(j, "vpp", "h_vpp_s"), number(j, "vpp", "d_vpp_pu")};
  }

  validate(s);
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["grid"] = {{"d0_pu", s.grid.d0},       {"h0_s", s.grid.h0},
                  {"r_pu", s.grid.r},         {"t_sg_s", s.grid.t_sg},
                  {"f0_hz", s.grid.f0},       {"f_db1_hz", s.grid.f_db1},
                  {"f_db2_hz", s.grid.f_db2}};
  root["disturbance"] = {{"delta_p_pu", s.disturbance.delta_p}};
  root["limits"] = {{"rocof_hz_per_s", s.limits.rocof_lim},
                    {"nadir_hz", s.limits.nadir_lim},
                    {"qss_hz", s.limits.qss_lim},
                    {"h_vpp_max_s", s.limits.h_vpp_max},
                    {"d_vpp_max_pu", s.limits.d_vpp_max}};
  root["ibrs"] = json::array();
  for (const auto& ibr : s.ibrs) {
    json j = {{"alpha_per_s", ibr.alpha},
              {"beta_per_pu", ibr.beta},
              {"p_rated_pu", ibr.p_rated},
              {"h_min_s", ibr.h_min},
              {"d_min_pu", ibr.d_min}};
    if (ibr.p_avail) j["p_avail_pu"] = *ibr.p_avail;
    if (ibr.h_max) j["h_max_s"] = *ibr.h_max;
    if (ibr.d_max) j["d_max_pu"] = *ibr.d_max;
    root["ibrs"].push_back(std::move(j));
  }
  root["sampling"] = {{"n_samples", s.sampling.n_samples},
                      {"seed", s.sampling.seed}};
  root["sim"] = {{"dt_s", s.sim.dt},
                 {"t_end_s", s.sim.t_end},
                 {"t_vpp_s", s.sim.t_vpp},
                 {"record_every", s.sim.record_every}};
  root["allocation"] = {
      {"cap_damping_at_ideal", s.allocation.cap_damping_at_ideal},
      {"normalize", s.allocation.normalize}};
  if (s.compensation) {
    root["compensation"] = {{"a_per_s", s.compensation->a},
                            {"b_per_pu", s.compensation->b}};
  }
  if (s.vpp) {
    root["vpp"] = {{"h_vpp_s", s.vpp->h_vpp}, {"d_vpp_pu", s.vpp->d_vpp}};
  }
  return root.dump(2) + "\n";
}

}  // namespace vppfreq

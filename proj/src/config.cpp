#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "fsi/config.hpp"

namespace fsi {

namespace {

using nlohmann::json;

[[noreturn]] void bad_type(const std::string& key, const char* want) {
  throw std::runtime_error("configuration key \"" + key + "\" must be " + want);
}

double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) bad_type(key, "a number");
  return v.get<double>();
}

int as_int(const std::string& key, const json& v) {
  if (!v.is_number_integer()) bad_type(key, "an integer");
  return v.get<int>();
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) bad_type(key, "a boolean");
  return v.get<bool>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) bad_type(key, "a string");
  return v.get<std::string>();
}

std::vector<double> as_number_list(const std::string& key, const json& v) {
  if (!v.is_array()) bad_type(key, "an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) bad_type(key, "an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> as_int_list(const std::string& key, const json& v) {
  if (!v.is_array()) bad_type(key, "an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) bad_type(key, "an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

SchemeKind parse_scheme(const std::string& key, const json& v) {
  const std::string s = as_string(key, v);
  if (s == "split_thin") return SchemeKind::SplitThin;
  if (s == "monolithic_thin") return SchemeKind::MonolithicThin;
  if (s == "split_thick") return SchemeKind::SplitThick;
  throw std::runtime_error(
      "configuration key \"scheme\" must be one of split_thin, "
      "monolithic_thin, split_thick; got \"" + s + "\"");
}

AssemblyMode parse_assembly(const std::string& key, const json& v) {
  const std::string s = as_string(key, v);
  if (s == "serial") return AssemblyMode::Serial;
  if (s == "parallel") return AssemblyMode::Parallel;
  throw std::runtime_error(
      "configuration key \"assembly\" must be serial or parallel; got \"" + s + "\"");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw std::runtime_error("configuration must be a JSON object of key/value pairs");

  RunConfig rc;
  bool c0_given = false, c1_given = false;

  using Handler = std::function<void(const std::string&, const json&)>;
  const std::map<std::string, Handler> handlers = {
      {"scheme", [&](const std::string& k, const json& v) { rc.scheme.scheme = parse_scheme(k, v); }},
      {"beta", [&](const std::string& k, const json& v) { rc.scheme.beta = as_number(k, v); }},
      {"dt", [&](const std::string& k, const json& v) { rc.scheme.dt = as_number(k, v); }},
      {"T", [&](const std::string& k, const json& v) { rc.scheme.T = as_number(k, v); }},
      {"nx", [&](const std::string& k, const json& v) { rc.scheme.nx = as_int(k, v); }},
      {"ny", [&](const std::string& k, const json& v) { rc.scheme.ny = as_int(k, v); }},
      {"L", [&](const std::string& k, const json& v) { rc.scheme.L = as_number(k, v); }},
      {"R", [&](const std::string& k, const json& v) { rc.scheme.R = as_number(k, v); }},
      {"H_s", [&](const std::string& k, const json& v) { rc.scheme.H_s = as_number(k, v); }},
      {"lumped_interface_mass", [&](const std::string& k, const json& v) { rc.scheme.lumped_interface_mass = as_bool(k, v); }},
      {"solver_tol", [&](const std::string& k, const json& v) { rc.scheme.solver_tol = as_number(k, v); }},
      {"assembly", [&](const std::string& k, const json& v) { rc.scheme.assembly = parse_assembly(k, v); }},
      {"dt_list", [&](const std::string& k, const json& v) { rc.dt_list = as_number_list(k, v); }},
      {"beta_list", [&](const std::string& k, const json& v) { rc.beta_list = as_number_list(k, v); }},
      {"dt_ref", [&](const std::string& k, const json& v) { rc.dt_ref = as_number(k, v); }},
      {"nx_list", [&](const std::string& k, const json& v) { rc.nx_list = as_int_list(k, v); }},
      {"ref_nx", [&](const std::string& k, const json& v) { rc.ref_nx = as_int(k, v); }},
      {"c_linear", [&](const std::string& k, const json& v) { rc.c_linear = as_number(k, v); }},
      {"c_threehalf", [&](const std::string& k, const json& v) { rc.c_threehalf = as_number(k, v); }},
      {"output_dir", [&](const std::string& k, const json& v) { rc.output_dir = as_string(k, v); }},
      {"write_snapshots", [&](const std::string& k, const json& v) { rc.write_snapshots = as_bool(k, v); }},
      {"write_figures", [&](const std::string& k, const json& v) { rc.write_figures = as_bool(k, v); }},
      {"physics.rho_f", [&](const std::string& k, const json& v) { rc.phys.rho_f = as_number(k, v); }},
      {"physics.mu", [&](const std::string& k, const json& v) { rc.phys.mu = as_number(k, v); }},
      {"physics.rho_s", [&](const std::string& k, const json& v) { rc.phys.rho_s = as_number(k, v); }},
      {"physics.eps", [&](const std::string& k, const json& v) { rc.phys.eps = as_number(k, v); }},
      {"physics.E", [&](const std::string& k, const json& v) { rc.phys.E = as_number(k, v); }},
      {"physics.sigma", [&](const std::string& k, const json& v) { rc.phys.sigma = as_number(k, v); }},
      {"physics.C0", [&](const std::string& k, const json& v) { rc.phys.C0 = as_number(k, v); c0_given = true; }},
      {"physics.C1", [&](const std::string& k, const json& v) { rc.phys.C1 = as_number(k, v); c1_given = true; }},
      {"physics.mu_s", [&](const std::string& k, const json& v) { rc.phys.mu_s = as_number(k, v); }},
      {"physics.lambda_s", [&](const std::string& k, const json& v) { rc.phys.lambda_s = as_number(k, v); }},
      {"physics.C_as", [&](const std::string& k, const json& v) { rc.phys.c_as = as_number(k, v); }},
      {"physics.p_max", [&](const std::string& k, const json& v) { rc.phys.p_max = as_number(k, v); }},
      {"physics.t_max", [&](const std::string& k, const json& v) { rc.phys.t_max = as_number(k, v); }},
  };

  for (const auto& [key, value] : j.items()) {
    auto it = handlers.find(key);
    if (it == handlers.end())
      throw std::runtime_error("unknown configuration key \"" + key + "\"");
    it->second(key, value);
  }

  if (c0_given != c1_given)
    throw std::runtime_error(
        "configuration must set both physics.C0 and physics.C1 or neither");
  if (!c0_given) rc.phys.derive_membrane_coefficients(rc.scheme.R);
  return rc;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open configuration file \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace fsi

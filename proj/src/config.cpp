#include "longevity/config.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace longevity {

HedgeConfig ScenarioConfig::hedge_config() const {
  HedgeConfig h;
  h.mp = mp;
  h.rp = rp;
  h.prices = prices;
  h.lp = lp;
  h.lambda = lambda;
  h.T0 = T0;
  h.T = T;
  h.x0 = x0;
  h.step = step;
  h.pricing_sign = pricing_sign;
  h.hedging_sign = hedging_sign;
  return h;
}

TimeGrid ScenarioConfig::path_grid() const { return hedge_config().hedge_grid(); }

void ScenarioConfig::validate() const {
  hedge_config().validate();
  if (n_paths < 1) throw std::invalid_argument("n_paths must be positive");
  if (workers < 1) throw std::invalid_argument("workers must be positive");
  if (lambdas.empty()) throw std::invalid_argument("lambdas must not be empty");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number for " + key + ": '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

VolModel to_vol_model(const std::string& key, const std::string& v) {
  if (v == "vasicek") return VolModel::vasicek;
  if (v == "cir") return VolModel::cir;
  throw std::invalid_argument(key + " must be vasicek or cir");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const ScenarioConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

Field number(double ScenarioConfig::*member) {
  return {[member](ScenarioConfig& c, const std::string& k, const std::string& v) { c.*member = to_double(k, v); },
          [member](const ScenarioConfig& c) { return fmt(c.*member); }};
}

template <class F>
Field num(F access) {
  return {[access](ScenarioConfig& c, const std::string& k, const std::string& v) { access(c) = to_double(k, v); },
          [access](const ScenarioConfig& c) {
            ScenarioConfig copy = c;
            return fmt(access(copy));
          }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f = {
      {"hurst1", num([](ScenarioConfig& c) -> double& { return c.mp.kernels.k1.hurst; })},
      {"hurst2", num([](ScenarioConfig& c) -> double& { return c.mp.kernels.k2.hurst; })},
      {"b1", num([](ScenarioConfig& c) -> double& { return c.mp.drift.b1; })},
      {"b2", num([](ScenarioConfig& c) -> double& { return c.mp.drift.b2; })},
      {"theta1", num([](ScenarioConfig& c) -> double& { return c.mp.drift.theta1; })},
      {"theta2", num([](ScenarioConfig& c) -> double& { return c.mp.drift.theta2; })},
      {"beta1",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          c.mp.drift.beta1 = c.mp.kernels.beta1 = to_double(k, v);
        },
        [](const ScenarioConfig& c) { return fmt(c.mp.drift.beta1); }}},
      {"beta2", num([](ScenarioConfig& c) -> double& { return c.mp.drift.beta2; })},
      {"sigma1", num([](ScenarioConfig& c) -> double& { return c.mp.sigma.a11; })},
      {"sigma2", num([](ScenarioConfig& c) -> double& { return c.mp.sigma.a22; })},
      {"mu1_0", num([](ScenarioConfig& c) -> double& { return c.mp.mu0[0]; })},
      {"mu2_0", num([](ScenarioConfig& c) -> double& { return c.mp.mu0[1]; })},
      {"baseline_a", num([](ScenarioConfig& c) -> double& { return c.mp.baseline.a_m; })},
      {"baseline_g", num([](ScenarioConfig& c) -> double& { return c.mp.baseline.g; })},
      {"age_offset", num([](ScenarioConfig& c) -> double& { return c.mp.baseline.age_offset; })},
      {"vol_model",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          c.mp.vol_model = c.rp.vol_model = to_vol_model(k, v);
        },
        [](const ScenarioConfig& c) { return std::string(c.mp.vol_model == VolModel::cir ? "cir" : "vasicek"); }}},
      {"b_r", num([](ScenarioConfig& c) -> double& { return c.rp.b_r; })},
      {"theta_r", num([](ScenarioConfig& c) -> double& { return c.rp.theta_r; })},
      {"sigma_r", num([](ScenarioConfig& c) -> double& { return c.rp.sigma; })},
      {"r0", num([](ScenarioConfig& c) -> double& { return c.rp.r0; })},
      {"phi1", num([](ScenarioConfig& c) -> double& { return c.prices.phi1; })},
      {"vartheta", num([](ScenarioConfig& c) -> double& { return c.prices.vartheta; })},
      {"c1", num([](ScenarioConfig& c) -> double& { return c.lp.c1; })},
      {"c2", num([](ScenarioConfig& c) -> double& { return c.lp.c2; })},
      {"claim_law",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          if (v == "deterministic")
            c.lp.law = ClaimLaw::deterministic;
          else if (v == "exponential")
            c.lp.law = ClaimLaw::exponential;
          else
            throw std::invalid_argument(k + " must be deterministic or exponential");
        },
        [](const ScenarioConfig& c) {
          return std::string(c.lp.law == ClaimLaw::deterministic ? "deterministic" : "exponential");
        }}},
      {"claim_mean", num([](ScenarioConfig& c) -> double& { return c.lp.claim_mean; })},
      {"lambda", number(&ScenarioConfig::lambda)},
      {"T0", number(&ScenarioConfig::T0)},
      {"T", number(&ScenarioConfig::T)},
      {"x0", number(&ScenarioConfig::x0)},
      {"step", number(&ScenarioConfig::step)},
      {"pricing_sign", number(&ScenarioConfig::pricing_sign)},
      {"hedging_sign", number(&ScenarioConfig::hedging_sign)},
      {"experiment",
       {[](ScenarioConfig& c, const std::string&, const std::string& v) { c.experiment = v; },
        [](const ScenarioConfig& c) { return c.experiment; }}},
      {"lambdas",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          c.lambdas.clear();
          for (const auto& s : split_list(v)) c.lambdas.push_back(to_double(k, s));
        },
        [](const ScenarioConfig& c) { return join(c.lambdas); }}},
      {"models",
       {[](ScenarioConfig& c, const std::string&, const std::string& v) { c.models = split_list(v); },
        [](const ScenarioConfig& c) { return join(c.models); }}},
      {"parameter",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          if (v != "c1" && v != "c2") throw std::invalid_argument(k + " must be c1 or c2");
          c.parameter = v;
        },
        [](const ScenarioConfig& c) { return c.parameter; }}},
      {"values",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          c.values.clear();
          for (const auto& s : split_list(v)) c.values.push_back(to_double(k, s));
        },
        [](const ScenarioConfig& c) { return join(c.values); }}},
      {"n_paths",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          c.n_paths = static_cast<int>(to_double(k, v));
        },
        [](const ScenarioConfig& c) { return std::to_string(c.n_paths); }}},
      {"seed",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          try {
            c.seed = std::stoull(v);
          } catch (const std::exception&) {
            throw std::invalid_argument("bad seed for " + k);
          }
        },
        [](const ScenarioConfig& c) { return std::to_string(c.seed); }}},
      {"output_dir",
       {[](ScenarioConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
        [](const ScenarioConfig& c) { return c.output_dir; }}},
      {"workers",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          c.workers = static_cast<int>(to_double(k, v));
        },
        [](const ScenarioConfig& c) { return std::to_string(c.workers); }}},
  };
  return f;
}

}  // namespace

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  auto it = fields().find(key);
  if (it == fields().end()) throw std::invalid_argument("unknown scenario key: " + key);
  it->second.set(cfg, key, value);
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

std::string dump_scenario(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(cfg) + "\n";
  return out;
}

}  // namespace longevity

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "longevity/experiments.h"
#include "longevity/pricing.h"

using namespace longevity;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> settings;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "scenario file of key = value lines")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", c.settings, "override, as key=value")->take_all();
  cmd->add_option("--seed", c.seed, "seed override");
}

ScenarioConfig scenario(const Common& c) {
  ScenarioConfig cfg = c.config.empty() ? ScenarioConfig{} : load_scenario(c.config);
  for (const std::string& kv : c.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("override must be key=value: " + kv);
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  return cfg;
}

// stdout unless a file is named
class Output {
 public:
  explicit Output(const std::string& file) {
    if (!file.empty()) {
      file_.open(file);
      if (!file_) throw std::runtime_error("cannot write " + file);
    }
    os().precision(12);
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

// Columns t, mu1, mu2 by header name; extra columns are ignored.
std::vector<Vec2> read_mu_csv(const std::string& file, double& step) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  auto index = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error(file + " has no column " + name);
  };
  const std::size_t it = index("t"), i1 = index("mu1"), i2 = index("mu2");
  std::vector<double> t;
  std::vector<Vec2> mu;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < header.size()) throw std::runtime_error("short row in " + file);
    t.push_back(row[it]);
    mu.push_back({row[i1], row[i2]});
  }
  if (t.size() < 3) throw std::runtime_error(file + " needs at least three rows");
  step = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - t[i - 1] - step) > 1e-6 * step) throw std::runtime_error(file + " is not equally spaced");
  return mu;
}

PathBundle seeded_path(const ScenarioConfig& cfg) {
  PathBundle p = PathSimulator(cfg.mp, cfg.rp, cfg.path_grid()).simulate(cfg.seed, 0);
  p.claims = simulate_claims(cfg.lp, p, cfg.seed);
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Longevity hedging under long-range dependent mortality"};
  app.require_subcommand(1);

  Common sim_opt, price_opt, hedge_opt, showcase_opt, frontier_opt, sens_opt;
  auto* sim = app.add_subcommand("simulate", "one seeded path of mortality and rate");
  add_common(sim, sim_opt);
  sim->add_option("-o,--output", sim_opt.out, "CSV file (default stdout)");

  auto* price = app.add_subcommand("price", "bond and longevity bond term structure along a seeded path");
  add_common(price, price_opt);
  price->add_option("-o,--output", price_opt.out, "CSV file (default stdout)");

  std::string hedge_model = "model1";
  auto* hedge = app.add_subcommand("hedge", "equilibrium strategy and wealth on a seeded path");
  add_common(hedge, hedge_opt);
  hedge->add_option("-o,--output", hedge_opt.out, "CSV file (default stdout)");
  hedge->add_option("-m,--model", hedge_model, "model1 | model2 | model2prime | markovian | no_hedge")
      ->check(CLI::IsMember({"model1", "model2", "model2prime", "markovian", "no_hedge"}));

  std::string est_input, est_model = "model1", est_out;
  Common est_opt;
  auto* est = app.add_subcommand("estimate", "fit the insurer mortality model to a (t, mu1, mu2) CSV");
  est->add_option("-i,--input", est_input, "CSV with columns t, mu1, mu2")->required()->check(CLI::ExistingFile);
  est->add_option("-m,--model", est_model, "model1 | model2 | model2prime")
      ->check(CLI::IsMember({"model1", "model2", "model2prime"}));
  est->add_option("-c,--config", est_opt.config, "scenario supplying the national model for model2prime")
      ->check(CLI::ExistingFile);
  est->add_option("-s,--set", est_opt.settings, "override, as key=value")->take_all();
  est->add_option("-o,--output", est_out, "CSV file (default stdout)");

  std::string hurst_input, hurst_column = "mu2", hurst_out;
  std::vector<int> hurst_lags{1, 2, 4, 8, 16};
  auto* hurst = app.add_subcommand("hurst", "pathwise regularity from increments at several lags");
  hurst->add_option("-i,--input", hurst_input, "CSV with columns t, mu1, mu2")->required()->check(CLI::ExistingFile);
  hurst->add_option("--column", hurst_column, "mu1 | mu2")->check(CLI::IsMember({"mu1", "mu2"}));
  hurst->add_option("--lags", hurst_lags, "lags in steps");
  hurst->add_option("-o,--output", hurst_out, "CSV file (default stdout)");

  auto* show = app.add_subcommand("showcase", "paths, strategies and wealth for each model on one seed");
  add_common(show, showcase_opt);
  show->add_option("-d,--output-dir", showcase_opt.out, "output directory");
  auto* front = app.add_subcommand("frontier", "mean-variance frontiers of terminal discounted wealth");
  add_common(front, frontier_opt);
  front->add_option("-d,--output-dir", frontier_opt.out, "output directory");
  auto* sens = app.add_subcommand("sensitivity", "model 1 strategies as c1 or c2 varies");
  add_common(sens, sens_opt);
  sens->add_option("-d,--output-dir", sens_opt.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const ScenarioConfig cfg = scenario(sim_opt);
      const PathBundle p = seeded_path(cfg);
      Output out(sim_opt.out);
      out.os() << "t,mu1,mu2,mu1_hat,mu2_hat,r,discount,claims\n";
      std::vector<int> per_cell(p.grid.n_steps + 1, 0);
      for (const ClaimEvent& e : p.claims.events)
        ++per_cell[std::min(p.grid.n_steps, static_cast<int>(std::ceil(e.time / p.grid.step - 1e-12)))];
      for (int n = 0; n <= p.grid.n_steps; ++n)
        out.os() << p.grid.t(n) << ',' << p.mu[n][0] << ',' << p.mu[n][1] << ',' << p.mu_hat[n][0] << ','
                 << p.mu_hat[n][1] << ',' << p.r[n] << ',' << p.disc[n] << ',' << per_cell[n] << '\n';
    } else if (price->parsed()) {
      const ScenarioConfig cfg = scenario(price_opt);
      const PathBundle p = seeded_path(cfg);
      const BondMarket market(cfg.mp, cfg.rp, cfg.prices, cfg.T, cfg.step, cfg.pricing_sign);
      const int N = p.grid.n_steps;
      const std::vector<BondQuote> lb = market.longevity_along(p, N);
      Output out(price_opt.out);
      out.os() << "t,T,bond_price,longevity_price,sigma_b,sigma_l1\n";
      for (int n = 0; n <= N; ++n) {
        const BondQuote b = market.bond(p.grid.t(n), p.r[n]);
        out.os() << p.grid.t(n) << ',' << cfg.T << ',' << b.price << ',' << lb[n].price << ',' << b.sigma_b << ','
                 << lb[n].sigma_l[0] << '\n';
      }
    } else if (hedge->parsed()) {
      const ScenarioConfig cfg = scenario(hedge_opt);
      const PathBundle p = seeded_path(cfg);
      HedgeConfig hc = cfg.hedge_config();
      if (hedge_model != "model1" && hedge_model != "no_hedge")
        hc.agent = agent_model(hedge_model, cfg.mp, training_path(cfg));
      const EquilibriumHedger h(hc);
      const HedgeComponents c = h.components(p);
      const StrategySeries s = hedge_model == "no_hedge" ? h.no_hedge(c, cfg.lambda) : h.strategy(c, cfg.lambda);
      const int N = p.grid.n_steps;
      const std::vector<double> X =
          evolve_wealth(p, cfg.lp, h.market().loadings(p, N), s.u1, s.u2, cfg.x0, N);
      Output out(hedge_opt.out);
      out.os() << "t,u1,u2,gamma1,gamma3,X\n";
      for (int n = 0; n <= N; ++n)
        out.os() << p.grid.t(n) << ',' << s.u1[n] << ',' << s.u2[n] << ',' << s.gamma1[n] << ',' << s.gamma3[n]
                 << ',' << X[n] << '\n';
    } else if (est->parsed()) {
      double step = 0.0;
      const std::vector<Vec2> mu = read_mu_csv(est_input, step);
      EstimationResult r;
      if (est_model == "model1") {
        r = estimate_cointegrated(mu, step);
      } else if (est_model == "model2") {
        std::vector<double> mu2;
        for (const Vec2& v : mu) mu2.push_back(v[1]);
        r = estimate_markovian(mu2, step);
      } else {
        r = estimate_correlated(mu, step, scenario(est_opt).mp);
      }
      Output out(est_out);
      out.os() << "model,beta1,beta2,b2,theta2,sigma2,rho,rss,lag1_autocorr,n_obs\n";
      auto get = [&](const char* k) { return r.params.count(k) ? r.params.at(k) : 0.0; };
      out.os() << est_model << ',' << get("beta1") << ',' << get("beta2") << ',' << get("b2") << ','
               << get("theta2") << ',' << get("sigma2") << ',' << get("rho") << ',' << r.rss << ','
               << r.lag1_autocorr << ',' << r.n_obs << '\n';
    } else if (hurst->parsed()) {
      double step = 0.0;
      const std::vector<Vec2> mu = read_mu_csv(hurst_input, step);
      std::vector<double> x;
      for (const Vec2& v : mu) x.push_back(v[hurst_column == "mu1" ? 0 : 1]);
      const HolderEstimate h = holder_regularity(x, hurst_lags);
      Output out(hurst_out);
      out.os() << "column,slope,std_error,n_obs\n"
               << hurst_column << ',' << h.slope << ',' << h.std_error << ',' << x.size() << '\n';
    } else {
      Common& opt = show->parsed() ? showcase_opt : front->parsed() ? frontier_opt : sens_opt;
      ScenarioConfig cfg = scenario(opt);
      if (!opt.out.empty()) cfg.output_dir = opt.out;
      if (show->parsed()) run_showcase(cfg);
      else if (front->parsed()) run_frontier(cfg);
      else run_sensitivity(cfg);
      std::cerr << "wrote " << cfg.output_dir << "/manifest.txt\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "longevity/experiments.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

namespace longevity {

namespace {

constexpr std::uint64_t kTrainingIndex = 0xffffffffULL;

std::vector<double> component(const std::vector<Vec2>& v, int i) {
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j][i];
  return out;
}

bool uses_market_model(const std::string& label) { return label == "model1" || label == "no_hedge"; }

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, const std::string& header) : out_(file) {
    if (!out_) throw std::runtime_error("cannot write " + file.string());
    out_.precision(12);
    out_ << header << '\n';
  }
  template <class... A>
  void row(const A&... cols) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cols, first = false), ...);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::filesystem::path prepare_dir(const ScenarioConfig& cfg) {
  std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
  return dir;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

HedgeConfig hedge_for(const ScenarioConfig& cfg, const std::string& label, const PathBundle& training) {
  HedgeConfig h = cfg.hedge_config();
  if (!uses_market_model(label)) h.agent = agent_model(label, cfg.mp, training);
  return h;
}

StrategySeries apply_label(const EquilibriumHedger& h, const HedgeComponents& c, const std::string& label,
                           double lambda) {
  return label == "no_hedge" ? h.no_hedge(c, lambda) : h.strategy(c, lambda);
}

PathBundle showcase_path(const ScenarioConfig& cfg) {
  PathSimulator sim(cfg.mp, cfg.rp, cfg.path_grid());
  PathBundle p = sim.simulate(cfg.seed, 0);
  p.claims = simulate_claims(cfg.lp, p, cfg.seed);
  return p;
}

}  // namespace

MortalityParams agent_model(const std::string& label, const MortalityParams& market, const PathBundle& training) {
  if (uses_market_model(label)) return market;
  if (label == "markovian") {
    MortalityParams m = market;
    m.kernels.k1.hurst = 0.5;
    m.kernels.k2.hurst = 0.5;
    return m;
  }
  if (label == "model2") return fitted_model(market, estimate_markovian(component(training.mu, 1), training.grid.step));
  if (label == "model2prime") return fitted_model(market, estimate_correlated(training.mu, training.grid.step, market));
  throw std::invalid_argument("unknown model label: " + label);
}

PathBundle training_path(const ScenarioConfig& cfg) {
  return PathSimulator(cfg.mp, cfg.rp, cfg.path_grid()).simulate(cfg.seed, kTrainingIndex);
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ShowcaseResult showcase(const ScenarioConfig& cfg) {
  cfg.validate();
  ShowcaseResult r;
  r.path = showcase_path(cfg);
  const PathBundle training = training_path(cfg);
  const int N = cfg.path_grid().n_steps;
  r.fits.push_back(estimate_cointegrated(training.mu, cfg.step));
  r.fits.push_back(estimate_markovian(component(training.mu, 1), cfg.step));
  r.fits.push_back(estimate_correlated(training.mu, cfg.step, cfg.mp));
  std::map<std::string, HedgeComponents> cache;
  for (const std::string& label : cfg.models) {
    EquilibriumHedger h(hedge_for(cfg, label, training));
    const HedgeComponents c = h.components(r.path);
    StrategySeries s = apply_label(h, c, label, cfg.lambda);
    const MarketLoadings m = h.market().loadings(r.path, N);
    r.wealth.push_back(evolve_wealth(r.path, cfg.lp, m, s.u1, s.u2, cfg.x0, N));
    r.labels.push_back(label);
    r.strategies.push_back(std::move(s));
  }
  return r;
}

std::vector<FrontierPoint> frontier(const ScenarioConfig& cfg) {
  cfg.validate();
  const PathBundle training = training_path(cfg);
  const TimeGrid grid = cfg.path_grid();
  const int N = grid.n_steps;
  // no_hedge shares the market-model components with model1
  std::vector<std::unique_ptr<EquilibriumHedger>> hedgers;
  std::vector<std::size_t> hedger_of;
  std::map<std::string, std::size_t> built;
  for (const std::string& label : cfg.models) {
    const std::string key = uses_market_model(label) ? "market" : label;
    if (!built.count(key)) {
      built[key] = hedgers.size();
      hedgers.push_back(std::make_unique<EquilibriumHedger>(hedge_for(cfg, label, training)));
    }
    hedger_of.push_back(built[key]);
  }
  const std::size_t n_models = cfg.models.size(), n_lambda = cfg.lambdas.size();
  // terminal wealth indexed [model][lambda][path]
  std::vector<std::vector<std::vector<double>>> xt(
      n_models, std::vector<std::vector<double>>(n_lambda, std::vector<double>(cfg.n_paths)));
  const PathSimulator sim(cfg.mp, cfg.rp, grid);
  parallel_for(cfg.n_paths, cfg.workers, [&](int i) {
    PathBundle p = sim.simulate(cfg.seed, static_cast<std::uint64_t>(i));
    p.claims = simulate_claims(cfg.lp, p, cfg.seed);
    const MarketLoadings m = hedgers[0]->market().loadings(p, N);
    std::vector<std::unique_ptr<HedgeComponents>> comps(hedgers.size());
    for (std::size_t k = 0; k < n_models; ++k) {
      const std::size_t hk = hedger_of[k];
      if (!comps[hk]) comps[hk] = std::make_unique<HedgeComponents>(hedgers[hk]->components(p));
      for (std::size_t l = 0; l < n_lambda; ++l) {
        const StrategySeries s = apply_label(*hedgers[hk], *comps[hk], cfg.models[k], cfg.lambdas[l]);
        xt[k][l][i] = evolve_wealth(p, cfg.lp, m, s.u1, s.u2, cfg.x0, N).back();
      }
    }
  });
  std::vector<FrontierPoint> out;
  for (std::size_t k = 0; k < n_models; ++k) {
    for (std::size_t l = 0; l < n_lambda; ++l) {
      const std::vector<double>& x = xt[k][l];
      const double n = static_cast<double>(x.size());
      double mean = 0.0;
      for (double v : x) mean += v;
      mean /= n;
      double m2 = 0.0, m4 = 0.0;
      for (double v : x) {
        const double d = (v - mean) * (v - mean);
        m2 += d;
        m4 += d * d;
      }
      const double var = n > 1 ? m2 / (n - 1) : 0.0;
      m4 /= n;
      FrontierPoint f;
      f.model = cfg.models[k];
      f.lambda = cfg.lambdas[l];
      f.mean = mean;
      f.variance = var;
      f.mean_se = std::sqrt(var / n);
      f.variance_se = n > 3 ? std::sqrt(std::max(m4 - (n - 3) / (n - 1) * var * var, 0.0) / n) : 0.0;
      f.n_paths = static_cast<int>(n);
      out.push_back(f);
    }
  }
  return out;
}

SensitivityResult sensitivity(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.values.empty()) throw std::invalid_argument("sensitivity needs at least one value");
  SensitivityResult r;
  r.parameter = cfg.parameter;
  r.values = cfg.values;
  const PathBundle path = showcase_path(cfg);
  for (double v : cfg.values) {
    ScenarioConfig c = cfg;
    (cfg.parameter == "c1" ? c.lp.c1 : c.lp.c2) = v;
    EquilibriumHedger h(c.hedge_config());
    r.strategies.push_back(h.strategy(h.components(path), c.lambda));
  }
  return r;
}

void write_manifest(const ScenarioConfig& cfg, const std::string& command, const std::vector<std::string>& files) {
  const std::filesystem::path dir = prepare_dir(cfg);
  std::string text = "command = " + command + "\n";
  for (const auto& f : files) text += "output = " + f + "\n";
  text += "\n[scenario]\n" + dump_scenario(cfg);
  write_text(dir / "manifest.txt", text);
}

void run_showcase(const ScenarioConfig& cfg) {
  const std::filesystem::path dir = prepare_dir(cfg);
  const ShowcaseResult r = showcase(cfg);
  const PathBundle& p = r.path;
  const int N = cfg.path_grid().n_steps;
  {
    CsvWriter mu(dir / "mu_paths.csv", "t,mu1,mu2");
    CsvWriter hat(dir / "mu_hat_paths.csv", "t,mu1_hat,mu2_hat");
    CsvWriter rate(dir / "rate_path.csv", "t,r,discount");
    for (int n = 0; n <= N; ++n) {
      const double t = p.grid.t(n);
      mu.row(t, p.mu[n][0], p.mu[n][1]);
      hat.row(t, p.mu_hat[n][0], p.mu_hat[n][1]);
      rate.row(t, p.r[n], p.disc[n]);
    }
  }
  {
    CsvWriter s(dir / "strategies.csv", "model,t,u1,u2,gamma1,gamma2,gamma3,Gamma");
    CsvWriter w(dir / "wealth.csv", "model,t,X");
    for (std::size_t k = 0; k < r.labels.size(); ++k) {
      const StrategySeries& st = r.strategies[k];
      for (int n = 0; n <= N; ++n) {
        const double t = p.grid.t(n);
        if (n < N) s.row(r.labels[k], t, st.u1[n], st.u2[n], st.gamma1[n], st.gamma2[n], st.gamma3[n], st.Gamma[n]);
        w.row(r.labels[k], t, r.wealth[k][n]);
      }
    }
  }
  {
    CsvWriter e(dir / "estimates.csv", "model,beta1,beta2,b2,theta2,sigma2,rho,rss,lag1_autocorr,n_obs");
    const char* names[] = {"model1", "model2", "model2prime"};
    for (const EstimationResult& f : r.fits) {
      auto get = [&](const char* k) { return f.params.count(k) ? f.params.at(k) : 0.0; };
      e.row(names[static_cast<int>(f.model)], get("beta1"), get("beta2"), get("b2"), get("theta2"), get("sigma2"),
            get("rho"), f.rss, f.lag1_autocorr, f.n_obs);
    }
  }
  write_text(dir / "plot_showcase.py",
             "import pandas as pd\nimport matplotlib.pyplot as plt\n\n"
             "mu = pd.read_csv('mu_paths.csv')\nhat = pd.read_csv('mu_hat_paths.csv')\n"
             "st = pd.read_csv('strategies.csv')\nw = pd.read_csv('wealth.csv')\n\n"
             "fig, ax = plt.subplots(2, 2, figsize=(11, 8))\n"
             "ax[0, 0].plot(mu.t, mu.mu1, label='mu1')\nax[0, 0].plot(mu.t, mu.mu2, label='mu2')\n"
             "ax[0, 1].plot(hat.t, hat.mu1_hat, label='mu1_hat')\nax[0, 1].plot(hat.t, hat.mu2_hat, label='mu2_hat')\n"
             "for m, g in st.groupby('model', sort=False):\n    ax[1, 0].plot(g.t, g.u1, label=m)\n"
             "for m, g in w.groupby('model', sort=False):\n    ax[1, 1].plot(g.t, g.X, label=m)\n"
             "ax[1, 0].set_title('u1')\nax[1, 1].set_title('discounted wealth')\n"
             "for a in ax.flat:\n    a.legend()\n"
             "fig.tight_layout()\nfig.savefig('showcase.png', dpi=150)\n");
  write_manifest(cfg, "showcase",
                 {"mu_paths.csv", "mu_hat_paths.csv", "rate_path.csv", "strategies.csv", "wealth.csv",
                  "estimates.csv", "plot_showcase.py"});
}

void run_frontier(const ScenarioConfig& cfg) {
  const std::filesystem::path dir = prepare_dir(cfg);
  const std::vector<FrontierPoint> pts = frontier(cfg);
  {
    CsvWriter f(dir / "frontier.csv", "model,lambda,mean,variance,mean_se,variance_se,n_paths");
    for (const FrontierPoint& p : pts) f.row(p.model, p.lambda, p.mean, p.variance, p.mean_se, p.variance_se, p.n_paths);
  }
  write_text(dir / "plot_frontier.py",
             "import pandas as pd\nimport matplotlib.pyplot as plt\n\n"
             "f = pd.read_csv('frontier.csv')\nfig, ax = plt.subplots(figsize=(7, 5))\n"
             "for m, g in f.groupby('model', sort=False):\n"
             "    ax.errorbar(g.variance, g['mean'], yerr=3 * g.mean_se, marker='o', label=m)\n"
             "ax.set_xlabel('Var X(T0)')\nax.set_ylabel('E X(T0)')\nax.legend()\n"
             "fig.tight_layout()\nfig.savefig('frontier.png', dpi=150)\n");
  write_manifest(cfg, "frontier", {"frontier.csv", "plot_frontier.py"});
}

void run_sensitivity(const ScenarioConfig& cfg) {
  const std::filesystem::path dir = prepare_dir(cfg);
  const SensitivityResult r = sensitivity(cfg);
  {
    CsvWriter s(dir / "sensitivity.csv", "parameter,value,t,u1,u2");
    for (std::size_t k = 0; k < r.values.size(); ++k) {
      const StrategySeries& st = r.strategies[k];
      for (int n = 0; n < st.grid.n_steps; ++n) s.row(r.parameter, r.values[k], st.grid.t(n), st.u1[n], st.u2[n]);
    }
  }
  write_text(dir / "plot_sensitivity.py",
             "import pandas as pd\nimport matplotlib.pyplot as plt\n\n"
             "s = pd.read_csv('sensitivity.csv')\nfig, ax = plt.subplots(1, 2, figsize=(11, 4))\n"
             "for v, g in s.groupby('value'):\n"
             "    ax[0].plot(g.t, g.u1, label=f'{g.parameter.iloc[0]}={v:g}')\n"
             "    ax[1].plot(g.t, g.u2, label=f'{g.parameter.iloc[0]}={v:g}')\n"
             "ax[0].set_title('u1')\nax[1].set_title('u2')\nax[0].legend()\n"
             "fig.tight_layout()\nfig.savefig('sensitivity.png', dpi=150)\n");
  write_manifest(cfg, "sensitivity", {"sensitivity.csv", "plot_sensitivity.py"});
}

}  // namespace longevity

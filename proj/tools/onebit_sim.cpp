// Command-line driver for the 1-bit precoding experiments.

#include "onebit/config.hpp"
#include "onebit/sim.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Overrides {
  std::string config;
  std::optional<int> nt, k, trials, threads;
  std::optional<std::string> mod, out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> snr, precoders;
  bool no_timing = false;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--nt", o.nt, "transmit antennas");
  app->add_option("--k", o.k, "users");
  app->add_option("--mod", o.mod, "modulation (qpsk, 8psk, 16qam, ...)");
  app->add_option("--snr", o.snr, "SNR points in dB; 'a:step:b' expands to a range");
  app->add_option("--trials", o.trials, "frames per SNR point / instances");
  app->add_option("--seed", o.seed, "64-bit seed");
  app->add_option("--precoders", o.precoders, "zf-inf, zf-1bit, ci-1bit, opsu, pbb, fbb")->delimiter(',');
  app->add_option("--threads", o.threads, "worker threads for ber-sweep");
  app->add_option("--out", o.out, "output CSV path (stdout if omitted)");
  app->add_flag("--no-timing", o.no_timing, "write wall_ms = 0 for byte-reproducible output");
}

std::vector<double> expand_snr(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) {
    const auto f = s.find(':');
    if (f == std::string::npos) {
      out.push_back(onebit::parse_number(s));
      continue;
    }
    const auto g = s.find(':', f + 1);
    if (g == std::string::npos) throw std::invalid_argument("SNR range must be a:step:b");
    const double a = onebit::parse_number(s.substr(0, f));
    const double step = onebit::parse_number(s.substr(f + 1, g - f - 1));
    const double b = onebit::parse_number(s.substr(g + 1));
    if (!(step > 0.0)) throw std::invalid_argument("SNR step must be positive");
    for (int i = 0; a + i * step <= b + 1e-9; ++i) out.push_back(a + i * step);
  }
  return out;
}

onebit::SimConfig resolve(const Overrides& o) {
  onebit::SimConfig cfg = o.config.empty() ? onebit::SimConfig{} : onebit::load_config(o.config);
  if (o.nt) cfg.nt = *o.nt;
  if (o.k) cfg.k = *o.k;
  if (o.mod) cfg.modulation = *o.mod;
  if (!o.snr.empty()) cfg.snr_db = expand_snr(o.snr);
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.precoders.empty()) cfg.precoders = o.precoders;
  if (o.threads) cfg.threads = *o.threads;
  if (o.out) cfg.out = *o.out;
  if (o.no_timing) cfg.timing = false;
  onebit::validate(cfg);
  return cfg;
}

void emit(const onebit::SimConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) std::cout << text;
  else onebit::write_text(cfg.out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-bit constructive-interference precoding simulator"};
  app.require_subcommand(1);
  Overrides ber, nodes, conv, prop;
  auto* c_ber = app.add_subcommand("ber-sweep", "Monte Carlo BER versus SNR");
  auto* c_nodes = app.add_subcommand("node-count", "visited nodes of P-BB and F-BB");
  auto* c_conv = app.add_subcommand("convergence", "upper-bound / MSE traces");
  auto* c_prop = app.add_subcommand("prop1-audit", "interior entries of the relaxed solution");
  add_common(c_ber, ber);
  add_common(c_nodes, nodes);
  add_common(c_conv, conv);
  add_common(c_prop, prop);
  std::vector<int> k_values;
  c_nodes->add_option("--k-values", k_values, "user counts to sweep")->delimiter(',');

  CLI11_PARSE(app, argc, argv);
  try {
    if (c_ber->parsed()) {
      const auto cfg = resolve(ber);
      emit(cfg, onebit::ber_csv(onebit::run_ber_sweep(cfg)));
    } else if (c_nodes->parsed()) {
      auto cfg = resolve(nodes);
      if (!k_values.empty()) cfg.k_values = k_values;
      onebit::validate(cfg);
      emit(cfg, onebit::node_count_csv(onebit::run_node_count(cfg)));
    } else if (c_conv->parsed()) {
      const auto cfg = resolve(conv);
      emit(cfg, onebit::convergence_csv(onebit::run_convergence(cfg)));
    } else if (c_prop->parsed()) {
      const auto cfg = resolve(prop);
      const auto rows = onebit::run_prop1_audit(cfg);
      emit(cfg, onebit::prop1_csv(rows));
      for (const auto& r : rows) {
        if (!r.pass) return 2;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

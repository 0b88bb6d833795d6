#pragma once

#include "onebit/bb.hpp"
#include "onebit/ci_geometry.hpp"
#include "onebit/constellation.hpp"
#include "onebit/precoders.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace onebit {

enum class PrecoderKind { ZfInf, Zf1Bit, Ci1Bit, Opsu, Pbb, Fbb };

inline PrecoderKind parse_precoder(const std::string& name) {
  if (name == "zf-inf") return PrecoderKind::ZfInf;
  if (name == "zf-1bit") return PrecoderKind::Zf1Bit;
  if (name == "ci-1bit") return PrecoderKind::Ci1Bit;
  if (name == "opsu") return PrecoderKind::Opsu;
  if (name == "pbb") return PrecoderKind::Pbb;
  if (name == "fbb") return PrecoderKind::Fbb;
  throw std::invalid_argument("unknown precoder: " + name);
}

inline std::string precoder_name(PrecoderKind k) {
  switch (k) {
    case PrecoderKind::ZfInf: return "zf-inf";
    case PrecoderKind::Zf1Bit: return "zf-1bit";
    case PrecoderKind::Ci1Bit: return "ci-1bit";
    case PrecoderKind::Opsu: return "opsu";
    case PrecoderKind::Pbb: return "pbb";
    case PrecoderKind::Fbb: return "fbb";
  }
  return "?";
}

struct SimConfig {
  int nt = 8;
  int k = 2;
  std::string modulation = "qpsk";
  std::vector<double> snr_db{0.0};
  int trials = 1000;  // frames per SNR point, or instances for the non-BER experiments
  std::vector<std::string> precoders{"zf-1bit", "ci-1bit", "opsu", "pbb"};
  std::uint64_t seed = 1;
  double eps0 = 1e-3;
  std::string out;
  std::vector<int> k_values;  // node-count sweep; empty means {k}
  int threads = 1;
  bool timing = true;  // false writes wall_ms = 0 so output is byte-reproducible
};

inline void validate(const SimConfig& c) {
  if (c.nt < 1 || c.k < 1) throw std::invalid_argument("config: nt and k must be positive");
  if (c.k > c.nt) throw std::invalid_argument("config: k must not exceed nt");
  if (c.trials < 0) throw std::invalid_argument("config: trials must be non-negative");
  if (c.threads < 1) throw std::invalid_argument("config: threads must be positive");
  if (!(c.eps0 > 0.0)) throw std::invalid_argument("config: eps0 must be positive");
  for (double s : c.snr_db) {
    if (!std::isfinite(s)) throw std::invalid_argument("config: SNR grid must be finite");
  }
  for (int k : c.k_values) {
    if (k < 1 || k > c.nt) throw std::invalid_argument("config: k_values entries must lie in [1, nt]");
  }
  Constellation::parse(c.modulation);
  for (const auto& p : c.precoders) parse_precoder(p);
}

inline double snr_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

/// Generator keyed by (seed, trial, stream); independent of scheduling.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32), stream};
  return std::mt19937_64(seq);
}

/// i.i.d. CN(0, 1) entries, filled row by row.
inline ComplexMatrix gen_channel(int k, int nt, std::mt19937_64& rng) {
  if (k < 1 || nt < 1) throw std::invalid_argument("gen_channel: dimensions must be positive");
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexMatrix H(k, nt);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < nt; ++c) {
      const double re = g(rng);
      const double im = g(rng);
      H(r, c) = Complex(re, im);
    }
  }
  return H;
}

/// CN(0, sigma2 I_K)
inline ComplexVector gen_noise(int k, double sigma2, std::mt19937_64& rng) {
  if (sigma2 < 0.0) throw std::invalid_argument("gen_noise: sigma2 must be non-negative");
  ComplexVector n(k);
  if (sigma2 == 0.0) {
    n.setZero();
    return n;
  }
  std::normal_distribution<double> g(0.0, std::sqrt(sigma2 / 2.0));
  for (int i = 0; i < k; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    n[i] = Complex(re, im);
  }
  return n;
}

inline std::vector<std::uint8_t> gen_bits(std::size_t count, std::mt19937_64& rng) {
  std::vector<std::uint8_t> bits(count);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return bits;
}

struct Frame {
  ComplexMatrix H;
  std::vector<std::uint8_t> bits;
  ComplexVector s;
};

inline Frame gen_frame(int k, int nt, const Constellation& c, std::uint64_t seed, std::uint64_t trial) {
  auto rng = make_rng(seed, trial, 0);
  Frame f;
  f.H = gen_channel(k, nt, rng);
  f.bits = gen_bits(static_cast<std::size_t>(k * c.bits_per_symbol()), rng);
  f.s = modulate(f.bits, c);
  return f;
}

struct BERRecord {
  std::string precoder;
  double snr_db = 0.0;
  long long bits = 0;
  long long errors = 0;
  double ber = 0.0;
  double ber_stderr = 0.0;
  double mean_nodes = 0.0;
  double mean_iters = 0.0;
  double wall_ms = 0.0;
};

/// One precoder applied to one frame. sigma2 is ignored by PSK paths.
inline PrecodeResult run_precoder(PrecoderKind kind, const Frame& f, const Constellation& c,
                                  const std::optional<CiRelaxation>& rel, double sigma2, double eps0) {
  const bool qam = c.kind() == Modulation::Qam;
  auto need_rel = [&]() -> const CiRelaxation& {
    if (!rel) throw std::runtime_error("relaxation unavailable");
    return *rel;
  };
  PrecodeResult r;
  switch (kind) {
    case PrecoderKind::ZfInf:
    case PrecoderKind::Zf1Bit:
      r = zf_precode(f.H, f.s, kind == PrecoderKind::Zf1Bit);
      if (qam) r.beta = compute_beta(r.x, f.H, f.s, sigma2);
      return r;
    case PrecoderKind::Ci1Bit:
      return qam ? ci_onebit_qam(need_rel(), sigma2) : ci_onebit_psk(need_rel());
    case PrecoderKind::Opsu:
      return qam ? opsu_qam(need_rel(), sigma2) : opsu_psk(need_rel());
    case PrecoderKind::Pbb: {
      if (!qam) return pbb_psk_precode(need_rel());
      AltOptOptions opt;
      opt.eps0 = eps0;
      return alt_opt_pbb_qam(need_rel(), sigma2, opt);
    }
    case PrecoderKind::Fbb: {
      if (!qam) {
        const CiRelaxation& rl = need_rel();
        BBOutput out = fbb(rl.problem, BBObjective::MaxMin, 1.0, 0.0, &rl.x_quantized);
        r.x_e = out.x_e;
        r.x = collapse(out.x_e);
        r.objective = psk_objective(rl.problem.M * out.x_e);
        r.bb = std::move(out.diag);
        return r;
      }
      AltOptOptions opt;
      opt.eps0 = eps0;
      opt.inner = InnerSearch::FullBB;
      return alt_opt_pbb_qam(need_rel(), sigma2, opt);
    }
  }
  throw std::logic_error("run_precoder: unhandled precoder");
}

inline double iteration_count(const PrecodeResult& r, const Constellation& c) {
  return c.kind() == Modulation::Qam ? r.total_iterations : r.bb.depth_iterations;
}

namespace detail {

struct Cell {
  long long bits = 0, errors = 0, trials = 0, nodes = 0, aborted = 0;
  double iters = 0.0;
  double wall_ns = 0.0;
};

inline void check_output(PrecoderKind kind, const PrecodeResult& r, int nt) {
  if (kind == PrecoderKind::ZfInf) return;
  const DacAlphabet dac(nt);
  for (Eigen::Index i = 0; i < r.x.size(); ++i) {
    if (!dac.contains(r.x[i])) throw std::runtime_error("1-bit output leaves the DAC alphabet");
  }
  if (std::abs(r.x.squaredNorm() - 1.0) > 1e-9) throw std::runtime_error("1-bit output does not have unit power");
}

inline long long decide_errors(const Frame& f, const Constellation& c, const PrecodeResult& r,
                               const ComplexVector& noise) {
  const ComplexVector y = f.H * r.x + noise;
  std::vector<std::uint8_t> decided;
  decided.reserve(f.bits.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const Decision d = demodulate(y[k], c, c.kind() == Modulation::Qam ? r.beta : 1.0);
    append_bits(d.bits, c.bits_per_symbol(), decided);
  }
  return static_cast<long long>(count_bit_errors(f.bits, decided));
}

}  // namespace detail

/// Monte Carlo BER sweep. Every frame draws a fresh channel and bit vector;
/// all precoders and SNR points see the same frames, and all precoders see the
/// same noise at a given SNR point.
inline std::vector<BERRecord> run_ber_sweep(const SimConfig& cfg, std::ostream& log = std::cerr) {
  validate(cfg);
  const Constellation c = Constellation::parse(cfg.modulation);
  const bool qam = c.kind() == Modulation::Qam;
  std::vector<PrecoderKind> kinds;
  for (const auto& n : cfg.precoders) kinds.push_back(parse_precoder(n));
  const std::size_t np = kinds.size(), ns = cfg.snr_db.size();
  const bool need_rel = std::any_of(kinds.begin(), kinds.end(), [](PrecoderKind k) {
    return k != PrecoderKind::ZfInf && k != PrecoderKind::Zf1Bit;
  });
  using Clock = std::chrono::steady_clock;

  const int workers = std::max(1, std::min(cfg.threads, std::max(cfg.trials, 1)));
  std::vector<std::vector<detail::Cell>> cells(static_cast<std::size_t>(workers),
                                               std::vector<detail::Cell>(np * ns));
  std::vector<std::string> logs(static_cast<std::size_t>(workers));

  auto work = [&](int w) {
    auto& acc = cells[static_cast<std::size_t>(w)];
    std::ostringstream wlog;
    for (int t = w; t < cfg.trials; t += workers) {
      const Frame f = gen_frame(cfg.k, cfg.nt, c, cfg.seed, static_cast<std::uint64_t>(t));
      std::optional<CiRelaxation> rel;
      if (need_rel) {
        try {
          rel = relax_ci(f.H, f.s, c);
        } catch (const std::exception& e) {
          wlog << "trial " << t << ": relaxation failed: " << e.what() << '\n';
        }
      }
      std::vector<ComplexVector> noise(ns);
      for (std::size_t j = 0; j < ns; ++j) {
        auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(t), static_cast<std::uint32_t>(1 + j));
        noise[j] = gen_noise(cfg.k, snr_to_sigma2(cfg.snr_db[j]), rng);
      }
      for (std::size_t p = 0; p < np; ++p) {
        // PSK precoding does not depend on the noise level: precode once per frame.
        std::optional<PrecodeResult> shared;
        double shared_ns = 0.0;
        for (std::size_t j = 0; j < ns; ++j) {
          detail::Cell& cell = acc[p * ns + j];
          const double sigma2 = snr_to_sigma2(cfg.snr_db[j]);
          try {
            PrecodeResult local;
            const PrecodeResult* r = nullptr;
            double ns_used = 0.0;
            if (!qam) {
              if (!shared) {
                const auto t0 = Clock::now();
                shared = run_precoder(kinds[p], f, c, rel, sigma2, cfg.eps0);
                shared_ns = std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
                detail::check_output(kinds[p], *shared, cfg.nt);
              }
              r = &*shared;
              ns_used = shared_ns;
            } else {
              const auto t0 = Clock::now();
              local = run_precoder(kinds[p], f, c, rel, sigma2, cfg.eps0);
              ns_used = std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
              detail::check_output(kinds[p], local, cfg.nt);
              if (!(local.beta > 0.0)) throw std::runtime_error("non-positive precoding factor");
              r = &local;
            }
            cell.errors += detail::decide_errors(f, c, *r, noise[j]);
            cell.bits += static_cast<long long>(f.bits.size());
            cell.trials += 1;
            cell.nodes += r->bb.nodes_visited;
            cell.iters += iteration_count(*r, c);
            cell.wall_ns += ns_used;
          } catch (const std::exception& e) {
            wlog << "trial " << t << " " << precoder_name(kinds[p]) << " @ " << cfg.snr_db[j]
                 << " dB aborted: " << e.what() << '\n';
            if (qam) {
              cell.aborted += 1;
              continue;
            }
            // The shared PSK output is unusable at every SNR point.
            for (std::size_t jj = j; jj < ns; ++jj) acc[p * ns + jj].aborted += 1;
            break;
          }
        }
      }
    }
    logs[static_cast<std::size_t>(w)] = wlog.str();
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& l : logs) log << l;

  std::vector<BERRecord> out;
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t j = 0; j < ns; ++j) {
      detail::Cell tot;
      for (const auto& wc : cells) {
        const detail::Cell& cl = wc[p * ns + j];
        tot.bits += cl.bits;
        tot.errors += cl.errors;
        tot.trials += cl.trials;
        tot.nodes += cl.nodes;
        tot.aborted += cl.aborted;
        tot.iters += cl.iters;
        tot.wall_ns += cl.wall_ns;
      }
      BERRecord r;
      r.precoder = precoder_name(kinds[p]);
      r.snr_db = cfg.snr_db[j];
      r.bits = tot.bits;
      r.errors = tot.errors;
      r.ber = tot.bits > 0 ? static_cast<double>(tot.errors) / static_cast<double>(tot.bits) : 0.0;
      r.ber_stderr = tot.bits > 0 ? std::sqrt(r.ber * (1.0 - r.ber) / static_cast<double>(tot.bits)) : 0.0;
      r.mean_nodes = tot.trials > 0 ? static_cast<double>(tot.nodes) / static_cast<double>(tot.trials) : 0.0;
      r.mean_iters = tot.trials > 0 ? tot.iters / static_cast<double>(tot.trials) : 0.0;
      r.wall_ms = cfg.timing ? tot.wall_ns * 1e-6 : 0.0;
      if (tot.aborted > 0) log << r.precoder << " @ " << r.snr_db << " dB: " << tot.aborted << " trials aborted\n";
      out.push_back(r);
    }
  }
  return out;
}

struct NodeCountRecord {
  int k = 0;
  std::string method;
  int instances = 0;
  double mean_nodes = 0.0;
  double mean_depth = 0.0;
  int max_depth = 0;
  int max_residual = 0;  // largest residual set (P-BB) or 2Nt (F-BB)
};

/// Mean visited nodes of P-BB and F-BB over cfg.trials instances per K. QAM
/// instances run both searches once at the CI 1-bit point's beta and the first
/// SNR point of the grid.
inline std::vector<NodeCountRecord> run_node_count(const SimConfig& cfg, std::ostream& log = std::cerr) {
  validate(cfg);
  const Constellation c = Constellation::parse(cfg.modulation);
  const bool qam = c.kind() == Modulation::Qam;
  const double sigma2 = snr_to_sigma2(cfg.snr_db.empty() ? 10.0 : cfg.snr_db.front());
  std::vector<int> ks = cfg.k_values.empty() ? std::vector<int>{cfg.k} : cfg.k_values;
  const bool run_fbb = 2 * cfg.nt <= kFbbMaxDims;
  if (!run_fbb) log << "node-count: 2Nt = " << 2 * cfg.nt << " exceeds the F-BB guard; F-BB column skipped\n";
  std::vector<NodeCountRecord> out;
  for (int k : ks) {
    NodeCountRecord pb{k, "pbb"}, fb{k, "fbb"};
    for (int t = 0; t < cfg.trials; ++t) {
      const Frame f = gen_frame(k, cfg.nt, c, cfg.seed, static_cast<std::uint64_t>(t));
      const CiRelaxation rel = relax_ci(f.H, f.s, c);
      const double beta = qam ? compute_beta(rel.x_quantized, rel.problem, sigma2) : 1.0;
      const BBOutput p = qam ? pbb_qam_inner(rel.problem, beta, sigma2, rel.split, rel.x_quantized)
                             : pbb_psk(rel.problem, rel.split, rel.x_quantized);
      pb.instances += 1;
      pb.mean_nodes += static_cast<double>(p.diag.nodes_visited);
      pb.mean_depth += p.diag.depth_iterations;
      pb.max_depth = std::max(pb.max_depth, p.diag.depth_iterations);
      pb.max_residual = std::max(pb.max_residual, rel.split.residual_count());
      if (run_fbb) {
        const BBOutput q = fbb(rel.problem, qam ? BBObjective::Mse : BBObjective::MaxMin, beta, sigma2, &rel.x_quantized);
        fb.instances += 1;
        fb.mean_nodes += static_cast<double>(q.diag.nodes_visited);
        fb.mean_depth += q.diag.depth_iterations;
        fb.max_depth = std::max(fb.max_depth, q.diag.depth_iterations);
        fb.max_residual = rel.problem.dims();
      }
    }
    for (NodeCountRecord* r : {&pb, &fb}) {
      if (r->instances == 0) continue;
      r->mean_nodes /= r->instances;
      r->mean_depth /= r->instances;
      out.push_back(*r);
    }
  }
  return out;
}

struct TraceRecord {
  int trial = 0;
  std::string method;
  int iteration = 0;
  double value = 0.0;
};

/// PSK: UB0 after each P-BB level / F-BB expansion (index 0 is the incumbent).
/// QAM: MSE after each alternating round of P-BB (index 0 is the CI 1-bit point).
inline std::vector<TraceRecord> run_convergence(const SimConfig& cfg) {
  validate(cfg);
  const Constellation c = Constellation::parse(cfg.modulation);
  const bool qam = c.kind() == Modulation::Qam;
  const double sigma2 = snr_to_sigma2(cfg.snr_db.empty() ? 10.0 : cfg.snr_db.front());
  std::vector<TraceRecord> out;
  for (int t = 0; t < cfg.trials; ++t) {
    const Frame f = gen_frame(cfg.k, cfg.nt, c, cfg.seed, static_cast<std::uint64_t>(t));
    const CiRelaxation rel = relax_ci(f.H, f.s, c);
    auto emit = [&](const std::string& method, double first, const std::vector<double>& trace) {
      out.push_back({t, method, 0, first});
      for (std::size_t i = 0; i < trace.size(); ++i) out.push_back({t, method, static_cast<int>(i + 1), trace[i]});
    };
    if (qam) {
      AltOptOptions opt;
      opt.eps0 = cfg.eps0;
      const PrecodeResult r = alt_opt_pbb_qam(rel, sigma2, opt);
      out.push_back({t, "pbb", 0, r.mse_trace.front()});
      for (std::size_t i = 1; i < r.mse_trace.size(); ++i) out.push_back({t, "pbb", static_cast<int>(i), r.mse_trace[i]});
      continue;
    }
    // Index 0 is scored by the same bounder the search starts from.
    const double warm = MaxMinBounder(rel.problem, rel.split).objective(residual_part(rel.split, rel.x_quantized));
    emit("pbb", warm, pbb_psk(rel.problem, rel.split, rel.x_quantized).diag.ub_trace);
    if (rel.problem.dims() <= kFbbMaxDims) {
      const SplitState all = full_split(rel.problem.dims());
      const double warm_full = MaxMinBounder(rel.problem, all).objective(rel.x_quantized);
      emit("fbb", warm_full, fbb(rel.problem, BBObjective::MaxMin, 1.0, 0.0, &rel.x_quantized).diag.ub_trace);
    }
  }
  return out;
}

struct Prop1Record {
  int trial = 0;
  int nt = 0;
  int k = 0;
  std::string modulation;
  int count = 0;
  int bound = 0;
  int rank = 0;
  bool pass = false;
};

/// Entries of the relaxed CI solution strictly inside the box, against 2K-1.
inline std::vector<Prop1Record> run_prop1_audit(const SimConfig& cfg) {
  validate(cfg);
  const Constellation c = Constellation::parse(cfg.modulation);
  std::vector<Prop1Record> out;
  for (int t = 0; t < cfg.trials; ++t) {
    const Frame f = gen_frame(cfg.k, cfg.nt, c, cfg.seed, static_cast<std::uint64_t>(t));
    const CiRelaxation rel = relax_ci(f.H, f.s, c);
    Prop1Record r;
    r.trial = t;
    r.nt = cfg.nt;
    r.k = cfg.k;
    r.modulation = c.name();
    r.count = rel.split.residual_count();
    r.bound = 2 * cfg.k - 1;
    r.rank = audit_rank(rel.problem.M);
    r.pass = r.count <= r.bound;
    out.push_back(r);
  }
  return out;
}

// ---- CSV ----

/// Shortest round-trip decimal form, independent of the global locale.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

inline const char* kBerHeader = "precoder,snr_db,bits,errors,ber,ber_stderr,mean_nodes,mean_iters,wall_ms";

inline std::string ber_csv(const std::vector<BERRecord>& records) {
  std::string s = std::string(kBerHeader) + "\n";
  for (const auto& r : records) {
    s += r.precoder + "," + format_number(r.snr_db) + "," + std::to_string(r.bits) + "," + std::to_string(r.errors) +
         "," + format_number(r.ber) + "," + format_number(r.ber_stderr) + "," + format_number(r.mean_nodes) + "," +
         format_number(r.mean_iters) + "," + format_number(r.wall_ms) + "\n";
  }
  return s;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline void export_csv(const std::vector<BERRecord>& records, const std::string& path) {
  write_text(path, ber_csv(records));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::vector<BERRecord> parse_ber_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kBerHeader) throw std::invalid_argument("parse_ber_csv: bad header");
  std::vector<BERRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw std::invalid_argument("parse_ber_csv: expected 9 fields");
    BERRecord r;
    r.precoder = f[0];
    r.snr_db = parse_number(f[1]);
    r.bits = std::stoll(f[2]);
    r.errors = std::stoll(f[3]);
    r.ber = parse_number(f[4]);
    r.ber_stderr = parse_number(f[5]);
    r.mean_nodes = parse_number(f[6]);
    r.mean_iters = parse_number(f[7]);
    r.wall_ms = parse_number(f[8]);
    out.push_back(r);
  }
  return out;
}

inline std::vector<BERRecord> read_ber_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_ber_csv(ss.str());
}

inline std::string node_count_csv(const std::vector<NodeCountRecord>& records) {
  std::string s = "k,method,instances,mean_nodes,mean_depth,max_depth,max_residual\n";
  for (const auto& r : records) {
    s += std::to_string(r.k) + "," + r.method + "," + std::to_string(r.instances) + "," + format_number(r.mean_nodes) +
         "," + format_number(r.mean_depth) + "," + std::to_string(r.max_depth) + "," + std::to_string(r.max_residual) +
         "\n";
  }
  return s;
}

inline std::string convergence_csv(const std::vector<TraceRecord>& records) {
  std::string s = "trial,method,iteration,value\n";
  for (const auto& r : records) {
    s += std::to_string(r.trial) + "," + r.method + "," + std::to_string(r.iteration) + "," + format_number(r.value) +
         "\n";
  }
  return s;
}

inline std::string prop1_csv(const std::vector<Prop1Record>& records) {
  std::string s = "trial,nt,k,mod,count,bound,rank,pass\n";
  for (const auto& r : records) {
    s += std::to_string(r.trial) + "," + std::to_string(r.nt) + "," + std::to_string(r.k) + "," + r.modulation + "," +
         std::to_string(r.count) + "," + std::to_string(r.bound) + "," + std::to_string(r.rank) + "," +
         (r.pass ? "1" : "0") + "\n";
  }
  return s;
}

}  // namespace onebit

#include "mstcam/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ostream>
#include <thread>

namespace mstcam {

std::uint64_t eps_max(std::uint64_t rows, int width) {
  if (width < 1) throw Error("eps_max: width must be positive");
  return rows * static_cast<std::uint64_t>(width);
}

double meps(std::span<const std::uint64_t> eps_samples) {
  if (eps_samples.empty()) throw Error("meps: no eps samples");
  long double sum = 0;
  for (auto e : eps_samples) sum += static_cast<long double>(e);
  return static_cast<double>(sum / static_cast<long double>(eps_samples.size()));
}

double pof(double meps, std::uint64_t eps_max) {
  if (eps_max == 0) throw Error("pof: eps_max is zero (empty table)");
  return (1.0 - meps / static_cast<double>(eps_max)) * 100.0;
}

double total_pof(double minimization_pof, double enabling_pof) {
  return 100.0 * (1.0 - (1.0 - minimization_pof / 100.0) * (1.0 - enabling_pof / 100.0));
}

PowerReport measure(const MstcamEngine& engine, std::span<const Word> trace, bool keep_samples) {
  if (trace.empty()) throw Error("measure: empty trace");
  PowerReport r;
  r.config = engine.config();
  r.trace_length = trace.size();
  r.rows = engine.row_count();
  r.width = engine.width();
  r.eps_max = engine.eps_max();
  if (keep_samples) r.eps_samples.emplace().reserve(trace.size());
  for (Word a : trace) {
    const auto e = engine.lookup(a).eps;
    r.eps_sum += e;
    if (keep_samples) r.eps_samples->push_back(e);
  }
  r.meps = static_cast<double>(r.eps_sum) / static_cast<double>(trace.size());
  r.pof = pof(r.meps, r.eps_max);
  return r;
}

std::vector<PowerReport> sweep_stage_configs(const MstcamEngine& engine, std::span<const StageConfig> configs,
                                             std::span<const Word> trace, bool keep_samples, unsigned threads) {
  for (const auto& c : configs) c.validate(engine.width());
  if (trace.empty()) throw Error("sweep: empty trace");
  if (engine.row_count() == 0) throw Error("sweep: engine has no rows");

  std::vector<PowerReport> reports(configs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(configs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      reports[i] = measure(engine.reconfigured(configs[i]), trace, keep_samples);
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return reports;
}

std::vector<PowerReport> sweep_stage_configs(const RoutingTable& table, std::span<const StageConfig> configs,
                                             std::span<const Word> trace, bool strict, bool keep_samples) {
  for (const auto& c : configs) c.validate(table.width());
  const MstcamEngine engine =
      MstcamEngine::from_table(table, StageConfig::single(table.width()), strict);
  return sweep_stage_configs(engine, configs, trace, keep_samples);
}

std::vector<StageConfig> equal_split_configs(int width) {
  std::vector<StageConfig> out;
  for (int k = 1; k <= width; k *= 2) {
    if (width % k == 0) out.push_back(StageConfig::equal_split(width, k));
  }
  return out;
}

std::vector<StageConfig> two_stage_configs(int width) {
  std::vector<StageConfig> out;
  for (int w1 = 1; w1 < width; ++w1) out.push_back(StageConfig({w1, width - w1}));
  return out;
}

namespace {

void compose(int remaining, int stages_left, int stride, bool first, std::vector<int>& prefix,
             std::vector<StageConfig>& out) {
  if (stages_left == 1) {
    if (remaining >= 1) {
      prefix.push_back(remaining);
      out.emplace_back(prefix);
      prefix.pop_back();
    }
    return;
  }
  for (int w = 1; w <= remaining - (stages_left - 1); ++w) {
    if (!first && stride > 1 && w != 1 && w % stride != 0) continue;
    prefix.push_back(w);
    compose(remaining - w, stages_left - 1, stride, false, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<StageConfig> stage_compositions(int width, int stages, int stride) {
  if (stages < 1 || stages > width) throw ConfigError("cannot split width " + std::to_string(width) + " into " +
                                                      std::to_string(stages) + " stages");
  std::vector<StageConfig> out;
  std::vector<int> prefix;
  compose(width, stages, std::max(stride, 1), true, prefix, out);
  return out;
}

int default_stride(int width) { return width <= 16 ? 1 : 4; }

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

void write_csv_header(std::ostream& out) { out << "config,stages,rows,width,eps_max,meps,pof\n"; }

void write_csv_row(std::ostream& out, const PowerReport& r) {
  out << r.config.to_string() << ',' << r.config.stages() << ',' << r.rows << ',' << r.width << ',' << r.eps_max
      << ',' << format_real(r.meps) << ',' << format_real(r.pof) << '\n';
}

}  // namespace mstcam

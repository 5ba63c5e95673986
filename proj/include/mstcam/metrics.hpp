#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mstcam/cube.hpp"
#include "mstcam/engine.hpp"
#include "mstcam/routing_table.hpp"

namespace mstcam {

/// Nominal power of one enabled cell. POF does not depend on it.
inline constexpr double kCellWatts = 1.0;

/// S * W: cells enabled per search when every cell is searched.
std::uint64_t eps_max(std::uint64_t rows, int width);

/// Mean enabled cells per search. Throws Error on an empty sample set.
double meps(std::span<const std::uint64_t> eps_samples);

/// Power optimization factor in percent: (1 - meps / eps_max) * 100.
double pof(double meps, std::uint64_t eps_max);

/// Combined saving of row reduction followed by stage enabling, in percent:
/// 100 * (1 - (1 - min/100) * (1 - en/100)).
double total_pof(double minimization_pof, double enabling_pof);

struct PowerReport {
  StageConfig config;
  std::size_t trace_length = 0;
  std::size_t rows = 0;
  int width = 0;
  std::uint64_t eps_sum = 0;
  std::uint64_t eps_max = 0;
  double meps = 0.0;
  double pof = 0.0;
  /// Per-search eps, kept only when requested.
  std::optional<std::vector<std::uint64_t>> eps_samples;
};

/// Runs every address of `trace` through `engine` and summarizes power.
PowerReport measure(const MstcamEngine& engine, std::span<const Word> trace, bool keep_samples = false);

/// One report per configuration over the same compacted rows and trace,
/// in the order given. Configurations are validated before any lookup.
std::vector<PowerReport> sweep_stage_configs(const MstcamEngine& engine, std::span<const StageConfig> configs,
                                             std::span<const Word> trace, bool keep_samples = false,
                                             unsigned threads = 0);

/// Compacts `table` once, then sweeps.
std::vector<PowerReport> sweep_stage_configs(const RoutingTable& table, std::span<const StageConfig> configs,
                                             std::span<const Word> trace, bool strict, bool keep_samples = false);

/// k stages of equal width for every power of two k dividing `width`.
std::vector<StageConfig> equal_split_configs(int width);

/// All (w1, width - w1) for w1 = 1..width-1.
std::vector<StageConfig> two_stage_configs(int width);

/// Compositions of `width` into `stages` parts. The first stage takes every
/// width; the middle stages take 1 and multiples of `stride`; the last stage
/// takes the remainder. stride 1 enumerates every composition.
std::vector<StageConfig> stage_compositions(int width, int stages, int stride = 1);

/// Stride used by the three/four-stage sweeps: 1 up to width 16, else 4.
int default_stride(int width);

/// `config,stages,rows,width,eps_max,meps,pof`
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const PowerReport& report);

/// Fixed six-decimal rendering used in every report.
std::string format_real(double value);

}  // namespace mstcam

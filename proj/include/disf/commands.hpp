#pragma once

#include "disf/ift.hpp"
#include "disf/overlay.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace disf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Invalid combination of command-line values; maps to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::optional<std::filesystem::path> image_dir;
  std::optional<std::filesystem::path> gt_dir;
  std::optional<std::filesystem::path> output;
  std::filesystem::path out_dir = ".";
  long long n0 = 8000;
  std::vector<long long> nf_list = {20};
  CostPolicy policy = CostPolicy::DynamicMean;
  int br_radius = 2;
  bool overlay = false;
  Rgb overlay_color = {0, 255, 255};
  bool trace = false;
  int workers = 0;  // 0: DISF_WORKERS, else hardware concurrency
  int repeat = 1;
};

/// Checks the invariants shared by all commands; throws UsageError.
void validate(const RunConfig& config);

/// Worker count after applying the DISF_WORKERS default.
int resolve_workers(int requested);

/// Segments each input, writing <stem>_labels.pgm into out_dir (or `output`
/// for a single input), plus <stem>_overlay.png with `overlay` and
/// <stem>_iter<k>.png per iteration with `trace`.
int cmd_segment(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Sweeps every image against its ground truth for each nf and writes
/// `image,nf,n0,policy,br,ue,iterations,ms` rows followed by per-nf means.
int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Per-stage timings for every (image, nf).
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Boundary map (non-zero = boundary) to 16-bit region label PGM.
int cmd_convert_gt(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses arguments (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace disf::cli

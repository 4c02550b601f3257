#include "disf/commands.hpp"

#include "disf/groundtruth.hpp"
#include "disf/io.hpp"
#include "disf/metrics.hpp"
#include "disf/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace disf::cli {
namespace {

namespace fs = std::filesystem;
using Scalar = double;

bool is_image_file(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

std::vector<fs::path> collect_images(const RunConfig& config) {
  std::vector<fs::path> images = config.inputs;
  if (config.image_dir) {
    std::error_code ec;
    fs::directory_iterator it(*config.image_dir, ec);
    if (ec) throw IoError(*config.image_dir, "cannot list directory: " + ec.message());
    for (const auto& entry : it)
      if (entry.is_regular_file() && is_image_file(entry.path())) images.push_back(entry.path());
  }
  std::sort(images.begin(), images.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename() != b.filename() ? a.filename() < b.filename() : a < b;
  });
  return images;
}

// GT files for an image stem S: S.<ext> or S_<digits>.<ext>, sorted.
std::vector<fs::path> ground_truth_files(const fs::path& gt_dir, const std::string& stem) {
  std::vector<fs::path> out;
  std::error_code ec;
  fs::directory_iterator it(gt_dir, ec);
  if (ec) throw IoError(gt_dir, "cannot list directory: " + ec.message());
  for (const auto& entry : it) {
    if (!entry.is_regular_file() || !is_image_file(entry.path())) continue;
    const std::string candidate = entry.path().stem().string();
    bool match = candidate == stem;
    if (!match && candidate.size() > stem.size() + 1 && candidate.compare(0, stem.size(), stem) == 0 &&
        candidate[stem.size()] == '_') {
      match = std::all_of(candidate.begin() + std::ptrdiff_t(stem.size()) + 1, candidate.end(),
                          [](unsigned char c) { return std::isdigit(c); });
    }
    if (match) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Runs fn(i) for i in [0, count) on a pool of workers. Each index is handled
// by exactly one worker; callers store results by index.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(std::size_t(std::max(1, workers)), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

std::string format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

void write_output(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (!config.output) {
    out << text;
    return;
  }
  std::ofstream file(*config.output, std::ios::binary);
  if (!file) throw IoError(*config.output, "cannot open for writing");
  file << text;
  if (!file) throw IoError(*config.output, "write failed");
}

DisfParams params_for(const RunConfig& config, long long nf, bool trace) {
  DisfParams params;
  params.n0 = config.n0;
  params.nf = nf;
  params.policy = config.policy;
  params.record_trace = trace;
  return params;
}

void check_fits(const RawImage& img, const RunConfig& config) {
  if (config.n0 > (long long)img.pixel_count())
    throw UsageError("n0 = " + std::to_string(config.n0) + " exceeds the " +
                     std::to_string(img.pixel_count()) + " pixels of the input");
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

Rgb parse_color(const std::string& text) {
  Rgb color{};
  std::stringstream ss(text);
  std::string part;
  int k = 0;
  while (std::getline(ss, part, ',')) {
    if (k >= 3) throw UsageError("color must be r,g,b");
    int v = 0;
    try {
      std::size_t used = 0;
      v = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("invalid color component '" + part + "'");
    }
    if (v < 0 || v > 255) throw UsageError("color component out of range: " + part);
    color[k++] = std::uint8_t(v);
  }
  if (k != 3) throw UsageError("color must be r,g,b");
  return color;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

void validate(const RunConfig& config) {
  if (config.n0 < 1) throw UsageError("n0 must be positive");
  if (config.nf_list.empty()) throw UsageError("at least one nf value is required");
  for (std::size_t i = 0; i < config.nf_list.size(); ++i) {
    const long long nf = config.nf_list[i];
    if (nf < 1) throw UsageError("nf must be positive");
    if (nf > config.n0)
      throw UsageError("nf = " + std::to_string(nf) + " exceeds n0 = " + std::to_string(config.n0));
    if (i > 0 && nf <= config.nf_list[i - 1]) throw UsageError("nf list must be strictly increasing");
  }
  if (config.br_radius < 0) throw UsageError("BR radius must be non-negative");
  if (config.repeat < 1) throw UsageError("repeat must be positive");
  if (config.workers < 0) throw UsageError("workers must be non-negative");
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DISF_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return int(std::max(1u, std::thread::hardware_concurrency()));
}

int cmd_segment(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(config);
    if (config.nf_list.size() != 1) throw UsageError("segment takes a single nf");
    const std::vector<fs::path> images = collect_images(config);
    if (images.empty()) throw UsageError("no input image given");
    if (config.output && images.size() > 1)
      throw UsageError("--labels names a single file but several inputs were given");
    const long long nf = config.nf_list.front();

    std::vector<std::string> lines(images.size());
    std::vector<std::exception_ptr> errors(images.size());
    parallel_for(images.size(), resolve_workers(config.workers), [&](std::size_t i) {
      try {
        const fs::path& input = images[i];
        const RawImage raw = read_image(input);
        check_fits(raw, config);
        const auto lab = srgb_to_lab<Scalar>(raw);
        const auto result = disf_segment(lab, params_for(config, nf, config.trace));
        const LabelMap labels = result.forest.label_map();

        const std::string stem = input.stem().string();
        const fs::path label_path = config.output ? *config.output : config.out_dir / (stem + "_labels.pgm");
        write_label_pgm(label_path, labels);
        if (config.overlay)
          write_png(config.out_dir / (stem + "_overlay.png"),
                    render_overlay(raw, labels, config.overlay_color));
        if (config.trace) {
          for (const auto& it : result.trace.iterations)
            write_png(config.out_dir / (stem + "_iter" + std::to_string(it.iteration) + ".png"),
                      render_overlay(raw, *it.labels, config.overlay_color, it.seed_pixels));
        }
        lines[i] = label_path.string() + ": nf=" + std::to_string(count_labels(labels)) +
                   " iterations=" + std::to_string(result.trace.ift_runs()) + "\n";
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      out << lines[i];
    }
    return kExitOk;
  });
}

int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(config);
    if (!config.gt_dir) throw UsageError("evaluate requires --gt");
    const std::vector<fs::path> images = collect_images(config);
    if (images.empty()) throw UsageError("no input images found");

    struct Row {
      MetricResult metric;
      std::size_t iterations = 0;
      double ms = 0;
    };
    struct ImageResult {
      std::vector<Row> rows;
      std::string warning;
    };
    std::vector<ImageResult> results(images.size());
    std::mutex err_mutex;

    parallel_for(images.size(), resolve_workers(config.workers), [&](std::size_t i) {
      ImageResult& res = results[i];
      try {
        const auto gt_files = ground_truth_files(*config.gt_dir, images[i].stem().string());
        if (gt_files.empty()) throw IoError(images[i], "no ground truth found");
        std::vector<LabelMap> gts;
        for (const auto& g : gt_files) gts.push_back(densify_labels(read_label_map(g)));

        const RawImage raw = read_image(images[i]);
        check_fits(raw, config);
        for (const auto& gt : gts)
          if (gt.rows() != raw.height || gt.cols() != raw.width)
            throw IoError(images[i], "ground truth dimensions differ from image");
        const auto lab = srgb_to_lab<Scalar>(raw);
        for (long long nf : config.nf_list) {
          const auto start = std::chrono::steady_clock::now();
          const auto result = disf_segment(lab, params_for(config, nf, false));
          Row row;
          row.ms = elapsed_ms(start);
          row.iterations = result.trace.ift_runs();
          const LabelMap seg = result.forest.label_map();
          for (const auto& gt : gts) {
            const MetricResult m = evaluate_segmentation(seg, gt, config.br_radius);
            row.metric.br += m.br;
            row.metric.ue += m.ue;
            row.metric.nf_actual = m.nf_actual;
          }
          row.metric.br /= double(gts.size());
          row.metric.ue /= double(gts.size());
          res.rows.push_back(row);
        }
      } catch (const std::exception& e) {
        res.rows.clear();
        res.warning = std::string(e.what()) + ", skipped";
      }
      if (!res.warning.empty()) {
        std::lock_guard lock(err_mutex);
        err << "warning: " << res.warning << '\n';
      }
    });

    std::ostringstream csv;
    csv << "image,nf,n0,policy,br,ue,iterations,ms\n";
    const std::size_t nfs = config.nf_list.size();
    std::vector<double> br(nfs, 0), ue(nfs, 0), iters(nfs, 0), ms(nfs, 0);
    std::size_t evaluated = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (results[i].rows.empty()) continue;
      ++evaluated;
      for (std::size_t k = 0; k < nfs; ++k) {
        const Row& r = results[i].rows[k];
        csv << images[i].stem().string() << ',' << config.nf_list[k] << ',' << config.n0 << ','
            << to_string(config.policy) << ',' << format("%.6f", r.metric.br) << ','
            << format("%.6f", r.metric.ue) << ',' << r.iterations << ',' << format("%.3f", r.ms)
            << '\n';
        br[k] += r.metric.br;
        ue[k] += r.metric.ue;
        iters[k] += double(r.iterations);
        ms[k] += r.ms;
      }
    }
    if (evaluated == 0) {
      err << "error: no image could be evaluated\n";
      return kExitFailure;
    }
    for (std::size_t k = 0; k < nfs; ++k) {
      const double n = double(evaluated);
      csv << "mean," << config.nf_list[k] << ',' << config.n0 << ',' << to_string(config.policy) << ','
          << format("%.6f", br[k] / n) << ',' << format("%.6f", ue[k] / n) << ','
          << format("%.2f", iters[k] / n) << ',' << format("%.3f", ms[k] / n) << '\n';
    }
    write_output(config, csv.str(), out);
    return kExitOk;
  });
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(config);
    const std::vector<fs::path> images = collect_images(config);
    if (images.empty()) throw UsageError("no input images found");

    struct Row {
      std::size_t iterations = 0;
      double sampling = 0, ift = 0, reduction = 0, total = 0;
    };
    std::vector<std::vector<Row>> rows(images.size());
    std::vector<std::string> failures(images.size());

    parallel_for(images.size(), resolve_workers(config.workers), [&](std::size_t i) {
      try {
        const RawImage raw = read_image(images[i]);
        check_fits(raw, config);
        const auto lab = srgb_to_lab<Scalar>(raw);
        for (long long nf : config.nf_list) {
          for (int rep = 0; rep < config.repeat; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            const auto result = disf_segment(lab, params_for(config, nf, false));
            Row row;
            row.total = elapsed_ms(start);
            row.iterations = result.trace.ift_runs();
            row.sampling = result.trace.sampling_ms;
            row.ift = result.trace.ift_ms();
            row.reduction = result.trace.reduction_ms();
            rows[i].push_back(row);
          }
        }
      } catch (const std::exception& e) {
        rows[i].clear();
        failures[i] = e.what();
      }
    });

    std::ostringstream csv;
    csv << "image,nf,n0,policy,iterations,sampling_ms,ift_ms,reduction_ms,total_ms\n";
    bool any = false;
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (!failures[i].empty()) {
        err << "warning: " << failures[i] << ", skipped\n";
        continue;
      }
      any = true;
      for (std::size_t k = 0; k < rows[i].size(); ++k) {
        const Row& r = rows[i][k];
        csv << images[i].stem().string() << ',' << config.nf_list[k / std::size_t(config.repeat)]
            << ',' << config.n0 << ',' << to_string(config.policy) << ',' << r.iterations << ','
            << format("%.3f", r.sampling) << ',' << format("%.3f", r.ift) << ','
            << format("%.3f", r.reduction) << ',' << format("%.3f", r.total) << '\n';
      }
    }
    if (!any) {
      err << "error: no image could be benchmarked\n";
      return kExitFailure;
    }
    write_output(config, csv.str(), out);
    return kExitOk;
  });
}

int cmd_convert_gt(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.inputs.size() != 1) throw UsageError("convert-gt takes exactly one --input");
    if (!config.output) throw UsageError("convert-gt requires --output");
    const LabelMap raw = read_label_map(config.inputs.front());
    const Mask boundary = (raw.array() != 0).cast<std::uint8_t>();
    const LabelMap regions = regions_from_boundary_map(boundary);
    write_label_pgm(*config.output, regions);
    out << config.output->string() << ": " << count_labels(regions) << " regions\n";
    return kExitOk;
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"DISF superpixel segmentation"};
  app.require_subcommand(1);

  RunConfig config;
  std::string policy = "dynamic";
  std::string color = "0,255,255";
  std::vector<std::string> inputs;
  std::string image_dir, gt_dir, output;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--n0", config.n0, "Initial seed count")->capture_default_str();
    cmd->add_option("--policy", policy, "Arc-weight estimator: dynamic | root")->capture_default_str();
  };

  CLI::App* segment = app.add_subcommand("segment", "Segment images into superpixels");
  segment->add_option("--input,-i", inputs, "Input image(s)")->required();
  segment->add_option("--out-dir,-o", config.out_dir, "Output directory");
  segment->add_option("--labels", output, "Label map path (single input)");
  segment->add_option("--nf", config.nf_list, "Final superpixel count")->expected(1);
  segment->add_flag("--overlay", config.overlay, "Write a boundary overlay PNG");
  segment->add_option("--color", color, "Overlay boundary color r,g,b");
  segment->add_flag("--trace", config.trace, "Write one overlay per iteration");
  segment->add_option("--workers", config.workers, "Parallel images (default: DISF_WORKERS or #cores)");
  add_common(segment);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Boundary recall / under-segmentation sweep");
  evaluate->add_option("--images", image_dir, "Image directory");
  evaluate->add_option("--input,-i", inputs, "Input image(s)");
  evaluate->add_option("--gt", gt_dir, "Ground-truth label directory")->required();
  evaluate->add_option("--nf", config.nf_list, "Superpixel counts, e.g. 20,50,100")->delimiter(',');
  evaluate->add_option("--radius", config.br_radius, "Boundary recall tolerance (pixels)");
  evaluate->add_option("--workers", config.workers, "Parallel images (default: DISF_WORKERS or #cores)");
  evaluate->add_option("--output", output, "CSV path (default: stdout)");
  add_common(evaluate);

  CLI::App* bench = app.add_subcommand("bench", "Per-stage timings");
  bench->add_option("--images", image_dir, "Image directory");
  bench->add_option("--input,-i", inputs, "Input image(s)");
  bench->add_option("--nf", config.nf_list, "Superpixel counts")->delimiter(',');
  bench->add_option("--repeat", config.repeat, "Runs per (image, nf)");
  bench->add_option("--workers", config.workers, "Parallel images (default: DISF_WORKERS or #cores)");
  bench->add_option("--output", output, "CSV path (default: stdout)");
  add_common(bench);

  CLI::App* convert = app.add_subcommand("convert-gt", "Boundary map to region label map");
  convert->add_option("--input,-i", inputs, "Boundary image (non-zero = boundary)")->required();
  convert->add_option("--output", output, "Label PGM path")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  return guarded(err, [&] {
    for (const auto& in : inputs) config.inputs.emplace_back(in);
    if (!image_dir.empty()) config.image_dir = image_dir;
    if (!gt_dir.empty()) config.gt_dir = gt_dir;
    if (!output.empty()) config.output = output;
    try {
      config.policy = parse_cost_policy(policy);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    config.overlay_color = parse_color(color);

    if (segment->parsed()) return cmd_segment(config, out, err);
    if (evaluate->parsed()) return cmd_evaluate(config, out, err);
    if (bench->parsed()) return cmd_bench(config, out, err);
    return cmd_convert_gt(config, out, err);
  });
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace disf::cli

/* Copyright 2026 The ChromaFlow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "chromaflow/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "chromaflow/attack.hpp"
#include "chromaflow/error.hpp"
#include "chromaflow/evaluate.hpp"
#include "chromaflow/io.hpp"
#include "chromaflow/metrics.hpp"
#include "chromaflow/model.hpp"
#include "chromaflow/rng.hpp"
#include "chromaflow/train.hpp"

namespace chromaflow {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct AttackFlags {
  std::string image, model, mode = "ycbcr", out, sidecar;
  std::size_t target = 0;
  double kappa = 0.0, lr = 0.01;
  bool restricted = false;
  std::size_t max_iters = 500;
  std::uint64_t seed = 0;
};

struct EvaluateFlags {
  std::string manifest, model, out_dir, external;
  std::vector<std::string> modes{"ycbcr", "lab", "rgb"};
  std::vector<double> kappas{0.0, 10.0};
  std::vector<std::string> restricted{"false", "true"};
  std::size_t max_iters = 500, jobs = 1;
  double lr = 0.01;
  std::uint64_t seed = 0;
};

struct MetricsFlags {
  std::string ref, test, domain = "rgb";
};

struct ColorhistFlags {
  std::string dir, out, report, thresholds_out;
  std::size_t bins = 10;
  std::optional<double> max_value;
};

struct DefendFlags {
  std::string image, space = "ycbcr", out;
};

struct TrainFlags {
  std::string data, out;
  bool synthetic = false;
  std::size_t epochs = 20, per_class = 100, batch_size = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

struct SynthFlags {
  std::string out_dir;
  std::size_t per_class = 10;
  std::uint64_t seed = 0;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

AttackMode mode_or_throw(const std::string& name) {
  auto mode = parse_attack_mode(name);
  if (!mode) throw UsageError("unknown mode '" + name + "' (expected ycbcr, lab or rgb)");
  return *mode;
}

bool bool_or_throw(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw UsageError("expected a boolean, got '" + text + "'");
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json metrics_json(const MetricReport& m) {
  json j;
  j["ssim"] = number_or_null(m.ssim);
  j["ms_ssim"] = number_or_null(m.ms_ssim);
  j["one_minus_ssim"] = number_or_null(m.one_minus_ssim);
  j["one_minus_ms_ssim"] = number_or_null(m.one_minus_ms_ssim);
  j["l0"] = m.l0;
  j["l2"] = number_or_null(m.l2);
  j["linf"] = number_or_null(m.linf);
  j["colorfulness"] = number_or_null(m.colorfulness_benign);
  for (const auto& [name, v] : m.external) j[name] = number_or_null(v);
  return j;
}

int cmd_attack(const AttackFlags& f, std::ostream& out) {
  AttackConfig cfg;
  cfg.mode = mode_or_throw(f.mode);
  cfg.kappa = f.kappa;
  cfg.restricted = f.restricted;
  cfg.max_iters = f.max_iters;
  cfg.lr = f.lr;
  cfg.seed = f.seed;
  cfg.validate();
  const Classifier model = load_weights(f.model);
  if (f.target >= model.num_classes()) {
    throw UsageError("--target " + std::to_string(f.target) + " out of range for a " +
                     std::to_string(model.num_classes()) + "-class model");
  }
  const Image benign = read_image(f.image);
  const AttackResult result = run_attack(benign, f.target, model, cfg);
  write_image(result.adversarial, f.out);

  json j;
  j["success"] = result.success;
  j["iterations"] = result.iterations_used;
  j["final_loss"] = number_or_null(result.final_loss);
  j["logits"] = json::array();
  for (std::size_t i = 0; i < result.final_logits.size(); ++i) {
    j["logits"].push_back(number_or_null(result.final_logits[i]));
  }
  j["metrics"] = metrics_json(result.metrics);
  j["target"] = f.target;
  j["mode"] = attack_mode_name(cfg.mode);
  j["kappa"] = cfg.kappa;
  j["restricted"] = cfg.restricted;
  j["seed"] = cfg.seed;
  const std::string sidecar = f.sidecar.empty() ? f.out + ".json" : f.sidecar;
  write_text(sidecar, j.dump(2) + "\n");

  out << (result.success ? "success" : "failure") << " after " << result.iterations_used
      << " iterations, loss " << result.final_loss << "\n";
  return result.success ? kExitOk : kExitAttackFailed;
}

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out) {
  std::vector<AttackMode> modes;
  for (const auto& m : f.modes) modes.push_back(mode_or_throw(m));
  std::vector<bool> restricted;
  for (const auto& r : f.restricted) restricted.push_back(bool_or_throw(r));
  const Classifier model = load_weights(f.model);
  const auto rows = read_manifest(f.manifest, model.num_classes());
  const fs::path base = fs::path(f.manifest).parent_path();
  std::vector<Image> images;
  images.reserve(rows.size());
  for (const auto& row : rows) {
    const fs::path p = row.image_path.is_absolute() ? row.image_path : base / row.image_path;
    images.push_back(read_image(p));
  }
  std::optional<ExternalMetrics> external;
  if (!f.external.empty()) external = load_external_metrics(f.external);

  EvalOptions opts;
  opts.seed = f.seed;
  opts.max_iters = f.max_iters;
  opts.lr = f.lr;
  opts.jobs = f.jobs;
  const auto report = evaluate(rows, images, model, expand_settings(modes, f.kappas, restricted),
                               opts, external ? &*external : nullptr);
  write_report(report, f.out_dir);
  out << summary_text(report);
  return kExitOk;
}

int cmd_metrics(const MetricsFlags& f, std::ostream& out) {
  SsimOptions opts;
  if (f.domain == "luma") {
    opts.domain = SsimDomain::kLuma;
  } else if (f.domain != "rgb") {
    throw UsageError("--ssim-domain must be rgb or luma");
  }
  const Image ref = read_image(f.ref);
  const Image test = read_image(f.test);
  if (ref.height() != test.height() || ref.width() != test.width()) {
    throw UsageError("dimension mismatch: " + std::to_string(ref.height()) + "x" +
                     std::to_string(ref.width()) + " vs " + std::to_string(test.height()) + "x" +
                     std::to_string(test.width()));
  }
  out << metrics_json(measure(ref, test, opts)).dump(2) << "\n";
  return kExitOk;
}

struct ReportRow {
  std::string setting;  // mode,kappa,restricted
  bool success = false;
  double colorfulness = 0.0;
};

std::vector<ReportRow> read_report_rows(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty report");
  std::map<std::string, std::size_t> col;
  {
    std::istringstream hdr(line);
    std::string name;
    for (std::size_t i = 0; std::getline(hdr, name, ','); ++i) col[name] = i;
  }
  for (const char* need : {"mode", "kappa", "restricted", "success", "colorfulness"}) {
    if (!col.count(need)) {
      throw FormatError(path.string() + ": report lacks column '" + need + "'");
    }
  }
  std::vector<ReportRow> rows;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() < col.size()) {
      throw FormatError(path.string() + " line " + std::to_string(line_no) + ": too few fields");
    }
    ReportRow r;
    r.setting = fields[col["mode"]] + "," + fields[col["kappa"]] + "," + fields[col["restricted"]];
    r.success = fields[col["success"]] == "1";
    try {
      r.colorfulness = std::stod(fields[col["colorfulness"]]);
    } catch (const std::exception&) {
      throw FormatError(path.string() + " line " + std::to_string(line_no) +
                        ": bad colorfulness value");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

int cmd_colorhist(const ColorhistFlags& f, std::ostream& out) {
  if (f.bins == 0) throw UsageError("--bins must be positive");
  const auto files = list_images(f.dir);
  if (files.empty()) throw UsageError("no .ppm or .png images in " + f.dir);
  std::vector<double> values;
  for (const auto& file : files) values.push_back(colorfulness(read_image(file)));
  double hi = f.max_value.value_or(*std::max_element(values.begin(), values.end()));
  if (!(hi > 0.0)) hi = 1.0;
  const double width = hi / static_cast<double>(f.bins);
  std::vector<std::size_t> counts(f.bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>(std::floor(v / width));
    counts[std::min(b, f.bins - 1)]++;
  }
  std::ostringstream csv;
  csv << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < f.bins; ++b) {
    csv << format_double(width * static_cast<double>(b)) << ','
        << format_double(b + 1 == f.bins ? hi : width * static_cast<double>(b + 1)) << ','
        << counts[b] << '\n';
  }
  write_text(f.out, csv.str());
  out << "histogram of " << values.size() << " images written to " << f.out << "\n";

  if (!f.report.empty()) {
    if (f.thresholds_out.empty()) throw UsageError("--report requires --thresholds-out");
    const auto rows = read_report_rows(f.report);
    std::vector<std::string> settings;
    for (const auto& r : rows) {
      if (std::find(settings.begin(), settings.end(), r.setting) == settings.end()) {
        settings.push_back(r.setting);
      }
    }
    std::ostringstream thr;
    thr << "threshold,mode,kappa,restricted,retained,successes,success_rate\n";
    for (std::size_t b = 0; b < f.bins; ++b) {
      const double t = width * static_cast<double>(b);
      for (const auto& s : settings) {
        std::size_t retained = 0, successes = 0;
        for (const auto& r : rows) {
          if (r.setting != s || r.colorfulness < t) continue;
          ++retained;
          successes += r.success ? 1 : 0;
        }
        const double rate = retained == 0 ? std::nan("")
                                          : static_cast<double>(successes) /
                                                static_cast<double>(retained);
        thr << format_double(t) << ',' << s << ',' << retained << ',' << successes << ','
            << format_double(rate) << '\n';
      }
    }
    write_text(f.thresholds_out, thr.str());
  }
  return kExitOk;
}

int cmd_defend(const DefendFlags& f, std::ostream& out) {
  ColorSpace space;
  if (f.space == "ycbcr") {
    space = ColorSpace::kYcbcr;
  } else if (f.space == "lab") {
    space = ColorSpace::kLab;
  } else {
    throw UsageError("--space must be ycbcr or lab");
  }
  write_image(chroma_subsample_420(read_image(f.image), space), f.out);
  out << "wrote " << f.out << "\n";
  return kExitOk;
}

int cmd_train(const TrainFlags& f, std::ostream& out) {
  if (f.synthetic == !f.data.empty()) throw UsageError("exactly one of --data and --synthetic");
  if (f.batch_size == 0) throw UsageError("--batch-size must be positive");
  std::vector<LabeledImage> data;
  if (f.synthetic) {
    Rng data_rng(derive_seed(f.seed, 1));
    data = make_synthetic_dataset(f.per_class, data_rng);
  } else {
    data = read_labeled_directory(f.data);
  }
  if (data.empty()) throw UsageError("no training images");
  std::size_t num_classes = 0;
  for (const auto& d : data) num_classes = std::max(num_classes, d.label + 1);
  const std::size_t h = data.front().image.height(), w = data.front().image.width();
  for (const auto& d : data) {
    if (d.image.height() != h || d.image.width() != w) {
      throw UsageError("training images must share one size");
    }
  }
  Rng init_rng(derive_seed(f.seed, 0));
  const Classifier init = Classifier::init(reference_architecture(num_classes, h, w), init_rng);
  TrainOptions opts;
  opts.epochs = f.epochs;
  opts.lr = f.lr;
  opts.batch_size = f.batch_size;
  Rng train_rng(derive_seed(f.seed, 2));
  TrainReport report;
  const Classifier trained = train_toy(init, data, opts, train_rng, &report);
  save_weights(trained, f.out);
  out << "final train accuracy: " << report.final_accuracy << "\n";
  return kExitOk;
}

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  const fs::path root(f.out_dir);
  Rng rng(f.seed);
  const auto data = make_synthetic_dataset(f.per_class, rng);
  std::ostringstream manifest;
  manifest << "image_path,true_class,target_class\n";
  std::map<std::size_t, std::size_t> counter;
  SyntheticOptions defaults;
  for (const auto& d : data) {
    const fs::path rel = fs::path(std::to_string(d.label)) /
                         (std::to_string(counter[d.label]++) + ".ppm");
    fs::create_directories(root / rel.parent_path());
    write_image(d.image, root / rel);
    const std::size_t target =
        (d.label + 1 + rng.uniform_index(defaults.num_classes - 1)) % defaults.num_classes;
    manifest << rel.generic_string() << ',' << d.label << ',' << target << '\n';
  }
  write_text(root / "manifest.csv", manifest.str());
  out << "wrote " << data.size() << " images under " << f.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chrominance-only flow-field adversarial attacks", "chromaflow"};
  app.require_subcommand(1);

  AttackFlags af;
  auto* attack = app.add_subcommand("attack", "Attack one image and write the result");
  attack->add_option("--image", af.image, "Benign image (.ppm/.png)")->required();
  attack->add_option("--target", af.target, "Target class")->required();
  attack->add_option("--model", af.model, "Weight file")->required();
  attack->add_option("--mode", af.mode, "ycbcr, lab or rgb");
  attack->add_option("--kappa", af.kappa, "Confidence margin");
  attack->add_option("--restricted", af.restricted, "Bound the flow to (-1, 1)");
  attack->add_option("--max-iters", af.max_iters);
  attack->add_option("--lr", af.lr);
  attack->add_option("--seed", af.seed);
  attack->add_option("--out", af.out, "Adversarial image path")->required();
  attack->add_option("--sidecar", af.sidecar, "JSON report path (default <out>.json)");

  EvaluateFlags ef;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Attack a manifest under many settings");
  evaluate_cmd->add_option("--manifest", ef.manifest)->required();
  evaluate_cmd->add_option("--model", ef.model)->required();
  evaluate_cmd->add_option("--modes", ef.modes)->delimiter(',');
  evaluate_cmd->add_option("--kappas", ef.kappas)->delimiter(',');
  evaluate_cmd->add_option("--restricted", ef.restricted)->delimiter(',');
  evaluate_cmd->add_option("--out-dir", ef.out_dir)->required();
  evaluate_cmd->add_option("--seed", ef.seed);
  evaluate_cmd->add_option("--max-iters", ef.max_iters);
  evaluate_cmd->add_option("--lr", ef.lr);
  evaluate_cmd->add_option("--jobs", ef.jobs);
  evaluate_cmd->add_option("--external-metrics", ef.external,
                           "CSV of externally computed metrics keyed by image_path");

  MetricsFlags mf;
  auto* metrics = app.add_subcommand("metrics", "Compare two images");
  metrics->add_option("--ref", mf.ref)->required();
  metrics->add_option("--test", mf.test)->required();
  metrics->add_option("--ssim-domain", mf.domain, "rgb or luma");

  ColorhistFlags cf;
  auto* colorhist = app.add_subcommand("colorhist", "Colorfulness histogram of a directory");
  colorhist->add_option("--dir", cf.dir)->required();
  colorhist->add_option("--bins", cf.bins);
  colorhist->add_option("--out", cf.out)->required();
  colorhist->add_option("--max", cf.max_value, "Upper edge of the last bin");
  colorhist->add_option("--report", cf.report, "per_image.csv from evaluate");
  colorhist->add_option("--thresholds-out", cf.thresholds_out);

  DefendFlags df;
  auto* defend = app.add_subcommand("defend", "Apply 4:2:0 chroma subsampling");
  defend->add_option("--image", df.image)->required();
  defend->add_option("--space", df.space, "ycbcr or lab");
  defend->add_option("--out", df.out)->required();

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "Train the reference CNN");
  train->add_option("--data", tf.data, "Directory of <class>/<image> files");
  train->add_flag("--synthetic", tf.synthetic, "Use the seeded synthetic dataset");
  train->add_option("--per-class", tf.per_class, "Synthetic images per class");
  train->add_option("--epochs", tf.epochs);
  train->add_option("--lr", tf.lr);
  train->add_option("--batch-size", tf.batch_size);
  train->add_option("--seed", tf.seed);
  train->add_option("--out", tf.out)->required();

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "Write the synthetic dataset and a manifest");
  synth->add_option("--out-dir", sf.out_dir)->required();
  synth->add_option("--per-class", sf.per_class);
  synth->add_option("--seed", sf.seed);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (attack->parsed()) return cmd_attack(af, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(ef, out);
    if (metrics->parsed()) return cmd_metrics(mf, out);
    if (colorhist->parsed()) return cmd_colorhist(cf, out);
    if (defend->parsed()) return cmd_defend(df, out);
    if (train->parsed()) return cmd_train(tf, out);
    if (synth->parsed()) return cmd_synth(sf, out);
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace chromaflow

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

// End-to-end acceptance run: prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "chromaflow/attack.hpp"
#include "chromaflow/colorspace.hpp"
#include "chromaflow/evaluate.hpp"
#include "chromaflow/io.hpp"
#include "chromaflow/metrics.hpp"
#include "chromaflow/model.hpp"
#include "chromaflow/rng.hpp"
#include "chromaflow/train.hpp"
#include "chromaflow/warp.hpp"

namespace chromaflow {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

TensorD random_tensor(const Shape& shape, Rng& rng, double lo, double hi) {
  TensorD t(shape);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

// ---- 1. gradient integrity ------------------------------------------------

constexpr int kGradPoints = 100;
constexpr double kGradTolerance = 1e-4;
constexpr double kGradStep = 1e-6;
constexpr double kModelGradStep = 1e-4;

Architecture small_architecture() {
  Architecture arch;
  arch.input_shape = {3, 8, 8};
  arch.layers = {Conv2dSpec{4, 3, 3, 1, 1}, ReluSpec{}, MaxPool2dSpec{2, 2},
                 Conv2dSpec{6, 3, 3, 1, 1}, ReluSpec{}, MaxPool2dSpec{2, 2},
                 FlattenSpec{}, DenseSpec{10}};
  return arch;
}

Verdict gradient_integrity() {
  const auto start = Clock::now();
  Verdict v;
  Rng rng(1001);

  auto run = [&](const std::string& name, const std::function<GradCheckReport()>& one_point) {
    GradCheckReport worst;
    for (int k = 0; k < kGradPoints; ++k) {
      const GradCheckReport r = one_point();
      if (k == 0 || r.max_relative_error > worst.max_relative_error) worst = r;
    }
    v.require(worst.max_relative_error < kGradTolerance,
              name + " error " + fmt("%.2e", worst.max_relative_error) + " (analytic " +
                  fmt("%.6e", worst.worst_analytic) + ", numeric " +
                  fmt("%.6e", worst.worst_numeric) + ")");
    v.note(name + " " + fmt("%.1e", worst.max_relative_error));
  };
  auto check = [](DiffOp<double>& op, std::vector<TensorD> inputs) {
    GradCheckOptions options;
    options.step = kGradStep;
    return grad_check_report(op, std::move(inputs), options);
  };
  // ReLU networks are piecewise linear in every single coordinate, so a wider
  // step costs no truncation error and keeps round-off far below the
  // smallest gradients; coordinates whose step straddles a kink are skipped.
  std::size_t model_checked = 0, model_skipped = 0;
  auto check_model = [&](DiffOp<double>& op, std::vector<TensorD> inputs) {
    GradCheckOptions options;
    options.step = kModelGradStep;
    options.skip_kinks = true;
    const GradCheckReport r = grad_check_report(op, std::move(inputs), options);
    model_checked += r.checked;
    model_skipped += r.skipped;
    return r;
  };

  run("warp", [&] {
    WarpOp<double> op;
    return check(op, {random_tensor({2, 5, 6}, rng, 0.0, 1.0),
                      random_tensor({2, 5, 6}, rng, -1.5, 1.5)});
  });
  run("tanh", [&] {
    TanhOp<double> op;
    return check(op, {random_tensor({2, 4, 4}, rng, -3.0, 3.0)});
  });
  for (Conversion c : {Conversion::kRgbToYcbcr, Conversion::kYcbcrToRgb,
                       Conversion::kRgbToLab, Conversion::kLabToRgb}) {
    static const char* names[] = {"rgb->ycbcr", "ycbcr->rgb", "rgb->lab", "lab->rgb"};
    run(names[static_cast<int>(c)], [&] {
      const ImageD rgb(random_tensor({3, 3, 4}, rng, 0.02, 0.98), ColorSpace::kRgb);
      TensorD input = rgb.pixels;
      if (c == Conversion::kYcbcrToRgb) input = rgb_to_ycbcr(rgb).pixels;
      if (c == Conversion::kLabToRgb) input = rgb_to_lab(rgb).pixels;
      ColorConvertOp<double> op(c);
      return check(op, {input});
    });
  }
  run("clip", [&] {
    TensorD x({3, 3, 3});
    for (double& e : x.data()) {
      e = rng.uniform(-0.4, 1.4);
      if (std::abs(e) < 0.01 || std::abs(e - 1.0) < 0.01) e += 0.02;
    }
    ClipOp<double> op;
    return check(op, {x});
  });
  run("cw-loss", [&] {
    TensorD z = random_tensor({10}, rng, -5.0, 5.0);
    CwLossOp<double> op(rng.uniform_index(10), rng.uniform_index(2) == 0 ? 0.0 : 10.0);
    return check(op, {z});
  });
  // Every layer type of the reference network, with parameters perturbed too.
  run("model", [&] {
    ClassifierD model = ClassifierD::init(small_architecture(), rng);
    for (auto& p : model.mutable_params()) {
      if (!p.bias.empty()) p.bias = random_tensor(p.bias.shape(), rng, -0.1, 0.1);
    }
    ClassifierOp<double> op(model, true);
    std::vector<TensorD> inputs{random_tensor({3, 8, 8}, rng, 0.0, 1.0)};
    for (auto& p : op.parameter_inputs()) inputs.push_back(p);
    return check_model(op, inputs);
  });
  {
    ClassifierOp<double> op(ClassifierD::init(reference_architecture(), rng), false);
    const double err =
        check_model(op, {random_tensor({3, 32, 32}, rng, 0.0, 1.0)}).max_relative_error;
    v.require(err < kGradTolerance, "reference model input error " + fmt("%.2e", err));
  }
  const double skipped_fraction =
      static_cast<double>(model_skipped) / static_cast<double>(model_checked + model_skipped);
  v.require(skipped_fraction <= 0.01, "model kink skips " + fmt("%.3f", skipped_fraction));
  v.note("model kink skips " + std::to_string(model_skipped) + "/" +
         std::to_string(model_checked + model_skipped));

  const double elapsed = seconds_since(start);
  v.require(elapsed < 60.0, "runtime " + fmt("%.1fs", elapsed));
  v.note(fmt("%.1fs", elapsed));
  return v;
}

// ---- 2. colorspace fidelity ----------------------------------------------

Verdict colorspace_fidelity() {
  Verdict v;
  Rng rng(1002);
  const Image rgb(random_tensor({3, 100, 100}, rng, 0.0, 1.0).cast<float>(), ColorSpace::kRgb);

  auto max_diff = [](const Image& a, const Image& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
      worst = std::max(worst, std::abs(double{a.pixels[i]} - double{b.pixels[i]}));
    }
    return worst;
  };
  const double ycc = max_diff(ycbcr_to_rgb(rgb_to_ycbcr(rgb)), rgb);
  const double lab = max_diff(lab_to_rgb(rgb_to_lab(rgb)), rgb);
  v.require(ycc <= 1e-5, "ycbcr round trip " + fmt("%.2e", ycc));
  v.require(lab <= 1e-4, "lab round trip " + fmt("%.2e", lab));
  v.note("round trips ycbcr " + fmt("%.1e", ycc) + " lab " + fmt("%.1e", lab));

  Image gray(1, 256, ColorSpace::kRgb);
  for (std::size_t j = 0; j < 256; ++j) {
    gray.at(0, 0, j) = gray.at(1, 0, j) = gray.at(2, 0, j) = static_cast<float>(j) / 255.0f;
  }
  const Image gy = rgb_to_ycbcr(gray);
  const Image gl = rgb_to_lab(gray);
  bool exact = true;
  double ab = 0.0;
  for (std::size_t j = 0; j < 256; ++j) {
    exact = exact && gy.at(1, 0, j) == 128.0f && gy.at(2, 0, j) == 128.0f;
    ab = std::max({ab, std::abs(double{gl.at(1, 0, j)}), std::abs(double{gl.at(2, 0, j)})});
  }
  v.require(exact, "gray Cb/Cr not exactly 128");
  v.require(ab < 1e-6, "gray |a*|,|b*| " + fmt("%.2e", ab));

  const Image white(1, 1, ColorSpace::kRgb, 1.0f);
  const double l = rgb_to_lab(white).at(0, 0, 0);
  v.require(std::abs(l - 100.0) <= 1e-3, "white L " + fmt("%.6f", l));
  return v;
}

// ---- 3. warp semantics ---------------------------------------------------

Verdict warp_semantics() {
  Verdict v;
  Rng rng(1003);

  const TensorD img = random_tensor({3, 9, 11}, rng, 0.0, 1.0);
  v.require(apply_flow(img, FlowFieldD(9, 11)) == img, "zero flow is not the identity");

  // Output pixel (i, j) with |flow| < 1 may only depend on the 3x3 source
  // neighbourhood around (i, j).
  std::size_t violations = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      FlowFieldD flow(5, 5);
      flow.displacements.at(0, i, j) = rng.uniform(-0.999, 0.999);
      flow.displacements.at(1, i, j) = rng.uniform(-0.999, 0.999);
      for (std::size_t si = 0; si < 5; ++si) {
        for (std::size_t sj = 0; sj < 5; ++sj) {
          TensorD impulse({1, 5, 5});
          impulse.at(0, si, sj) = 1.0;
          const double out = apply_flow(impulse, flow).at(0, i, j);
          const bool near = std::abs(static_cast<long>(si) - static_cast<long>(i)) <= 1 &&
                            std::abs(static_cast<long>(sj) - static_cast<long>(j)) <= 1;
          if (!near && out != 0.0) ++violations;
        }
      }
    }
  }
  v.require(violations == 0, std::to_string(violations) + " locality violations");

  std::size_t range_failures = 0;
  for (int k = 0; k < 1000; ++k) {
    const double lo = rng.uniform(-2.0, 1.0);
    const double hi = lo + rng.uniform(0.0, 2.0);
    const TensorD src = random_tensor({1, 4, 5}, rng, lo, hi);
    const FlowFieldD flow(random_tensor({2, 4, 5}, rng, -6.0, 6.0));
    const TensorD out = apply_flow(src, flow);
    const auto [mn, mx] = std::minmax_element(src.data().begin(), src.data().end());
    for (double e : out.data()) {
      if (e < *mn - 1e-12 || e > *mx + 1e-12) {
        ++range_failures;
        break;
      }
    }
  }
  v.require(range_failures == 0, std::to_string(range_failures) + "/1000 range failures");
  v.note("1000 range cases, 25 locality sweeps");
  return v;
}

// ---- 4. desk-scale run ---------------------------------------------------

constexpr std::size_t kTrainPerClass = 100;
constexpr std::size_t kTestImages = 100;

struct DeskRun {
  double train_seconds = 0.0;
  double train_accuracy = 0.0;
  double attack_seconds = 0.0;
  Classifier model;
  std::vector<Image> images;
  EvaluationReport report;
};

DeskRun desk_run(std::uint64_t seed) {
  DeskRun run;
  const auto start = Clock::now();
  Rng init_rng(derive_seed(seed, 0));
  Rng data_rng(derive_seed(seed, 1));
  Rng train_rng(derive_seed(seed, 2));
  const auto data = make_synthetic_dataset(kTrainPerClass, data_rng);
  TrainReport train_report;
  run.model = train_toy(Classifier::init(reference_architecture(), init_rng), data, TrainOptions{},
                        train_rng, &train_report);
  run.train_accuracy = train_report.final_accuracy;
  run.train_seconds = seconds_since(start);

  // Held-out batch with random targets different from the label.
  Rng test_rng(derive_seed(seed, 3));
  std::vector<ManifestRow> rows;
  for (std::size_t k = 0; k < kTestImages; ++k) {
    const std::size_t label = test_rng.uniform_index(kSyntheticPatterns);
    run.images.push_back(make_synthetic_image(label, test_rng));
    const std::size_t target =
        (label + 1 + test_rng.uniform_index(kSyntheticPatterns - 1)) % kSyntheticPatterns;
    rows.push_back({std::to_string(k) + ".ppm", label, target});
  }

  const auto attack_start = Clock::now();
  EvalOptions options;
  options.seed = seed;
  options.keep_adversarial = true;
  run.report = evaluate(rows, run.images, run.model,
                        expand_settings({AttackMode::kYcbcrChroma, AttackMode::kLabChroma,
                                         AttackMode::kRgbAll},
                                        {0.0, 10.0}, {false, true}),
                        options);
  run.attack_seconds = seconds_since(attack_start);
  return run;
}

const EvalCell& cell(const std::vector<EvalCell>& cells, AttackMode mode, double kappa,
                     bool restricted) {
  for (const auto& c : cells) {
    if (c.setting.mode == mode && c.setting.kappa == kappa &&
        c.setting.restricted == restricted) {
      return c;
    }
  }
  throw UsageError("missing evaluation cell");
}

std::string cell_name(AttackMode mode, double kappa, bool restricted) {
  return std::string(attack_mode_name(mode)) + "/k" + fmt("%g", kappa) +
         (restricted ? "/r" : "/u");
}

constexpr AttackMode kChromaModes[] = {AttackMode::kYcbcrChroma, AttackMode::kLabChroma};
constexpr AttackMode kAllModes[] = {AttackMode::kYcbcrChroma, AttackMode::kLabChroma,
                                    AttackMode::kRgbAll};

Verdict desk_scale(const DeskRun& run) {
  Verdict v;
  const auto cells = run.report.cells();
  v.require(run.train_accuracy >= 0.9, "train accuracy " + fmt("%.3f", run.train_accuracy));
  v.require(run.train_seconds < 300.0, "training took " + fmt("%.0fs", run.train_seconds));
  v.note("train acc " + fmt("%.3f", run.train_accuracy) + " in " +
         fmt("%.0fs", run.train_seconds));

  const double rgb0 = cell(cells, AttackMode::kRgbAll, 0.0, false).success_rate;
  v.require(rgb0 >= 0.95, "rgb/k0/u success " + fmt("%.2f", rgb0));
  for (AttackMode m : kChromaModes) {
    const double r = cell(cells, m, 0.0, false).success_rate;
    v.require(r >= 0.60, cell_name(m, 0.0, false) + " success " + fmt("%.2f", r));
  }

  std::size_t orderings = 0, broken = 0;
  auto order = [&](const EvalCell& hi, const EvalCell& lo) {
    ++orderings;
    if (hi.success_rate < lo.success_rate) {
      ++broken;
      v.require(false, cell_name(hi.setting.mode, hi.setting.kappa, hi.setting.restricted) +
                           " < " +
                           cell_name(lo.setting.mode, lo.setting.kappa, lo.setting.restricted));
    }
  };
  for (AttackMode m : kAllModes) {
    for (bool r : {false, true}) order(cell(cells, m, 0.0, r), cell(cells, m, 10.0, r));
    for (double k : {0.0, 10.0}) order(cell(cells, m, k, false), cell(cells, m, k, true));
  }
  for (AttackMode m : kChromaModes) {
    for (double k : {0.0, 10.0}) {
      for (bool r : {false, true}) order(cell(cells, AttackMode::kRgbAll, k, r), cell(cells, m, k, r));
    }
  }
  v.note(std::to_string(orderings - broken) + "/" + std::to_string(orderings) +
         " orderings hold");

  const double total = run.train_seconds + run.attack_seconds;
  v.require(total < 1800.0, "runtime " + fmt("%.0fs", total));
  v.note("runtime " + fmt("%.0fs", total));
  return v;
}

// ---- 5. perceptual ordering ----------------------------------------------

Verdict perceptual_ordering(const DeskRun& run) {
  Verdict v;
  const auto cells = run.report.cells();
  for (bool r : {false, true}) {
    const EvalCell& rgb = cell(cells, AttackMode::kRgbAll, 10.0, r);
    v.note(cell_name(AttackMode::kRgbAll, 10.0, r) + " " +
           fmt("%.4f", rgb.mean_one_minus_ssim) + "/" + fmt("%.4f", rgb.mean_one_minus_ms_ssim));
    for (AttackMode m : kChromaModes) {
      const EvalCell& c = cell(cells, m, 10.0, r);
      const std::string name = cell_name(m, 10.0, r);
      v.note(name + " " + fmt("%.4f", c.mean_one_minus_ssim) + "/" +
             fmt("%.4f", c.mean_one_minus_ms_ssim));
      v.require(c.successes > 0 && rgb.successes > 0, name + " has no successes to compare");
      v.require(c.mean_one_minus_ssim < rgb.mean_one_minus_ssim, name + " 1-SSIM not below rgb");
      v.require(c.mean_one_minus_ms_ssim < rgb.mean_one_minus_ms_ssim,
                name + " 1-MS-SSIM not below rgb");
    }
  }
  return v;
}

// ---- 6. luminance preservation -------------------------------------------

Verdict luminance_preservation(const DeskRun& run) {
  Verdict v;
  std::size_t attacks = 0;
  double worst = 0.0;
  for (std::size_t s = 0; s < run.report.settings.size(); ++s) {
    const AttackMode mode = run.report.settings[s].mode;
    if (mode == AttackMode::kRgbAll) continue;
    const ColorSpace space = mode == AttackMode::kYcbcrChroma ? ColorSpace::kYcbcr : ColorSpace::kLab;
    for (std::size_t r = 0; r < run.report.rows.size(); ++r) {
      const EvalRecord& rec = run.report.record(s, r);
      if (!rec.success) continue;
      ++attacks;
      const ImageD adv = rec.adversarial.cast<double>();
      const ImageD benign_luma = convert(run.images[r].cast<double>(), space);
      const ImageD adv_luma = convert(adv, space);
      for (std::size_t i = 0; i < adv.height(); ++i) {
        for (std::size_t j = 0; j < adv.width(); ++j) {
          // A channel at exactly 0 or 1 may have been clipped; skip the pixel.
          bool clipped = false;
          for (std::size_t c = 0; c < 3; ++c) {
            clipped = clipped || adv.at(c, i, j) <= 0.0 || adv.at(c, i, j) >= 1.0;
          }
          if (clipped) continue;
          worst = std::max(worst, std::abs(adv_luma.at(0, i, j) - benign_luma.at(0, i, j)));
        }
      }
    }
  }
  v.require(attacks > 0, "no successful chroma attacks");
  v.require(worst < 1e-3, "max luma change " + fmt("%.2e", worst));
  v.note(std::to_string(attacks) + " successful chroma attacks, max |dY| " + fmt("%.2e", worst));
  return v;
}

// ---- 7. grayscale failure mode -------------------------------------------

Verdict grayscale_failure(const DeskRun& run) {
  Verdict v;
  Rng rng(1007);
  std::size_t attacks = 0, failures = 0;
  double worst = 0.0, input_color = 0.0, output_color = 0.0;
  for (int k = 0; k < 10; ++k) {
    Image img = make_synthetic_image(rng.uniform_index(kSyntheticPatterns), rng);
    for (std::size_t i = 0; i < img.height(); ++i) {
      for (std::size_t j = 0; j < img.width(); ++j) {
        const float y = 0.299f * img.at(0, i, j) + 0.587f * img.at(1, i, j) +
                        0.114f * img.at(2, i, j);
        img.at(0, i, j) = img.at(1, i, j) = img.at(2, i, j) = y;
      }
    }
    input_color = std::max(input_color, colorfulness(img));
    const std::size_t pred = argmax(run.model.predict(img.pixels));
    const std::size_t target = (pred + 1 + rng.uniform_index(kSyntheticPatterns - 1)) %
                               kSyntheticPatterns;
    for (AttackMode m : kChromaModes) {
      AttackConfig config;
      config.mode = m;
      config.seed = static_cast<std::uint64_t>(k);
      const AttackResult res = run_attack(img, target, run.model, config);
      ++attacks;
      if (!res.success) ++failures;
      for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        worst = std::max(worst, std::abs(double{res.adversarial.pixels[i]} - img.pixels[i]));
      }
      output_color = std::max(output_color, colorfulness(res.adversarial));
    }
  }
  v.require(failures == attacks, std::to_string(attacks - failures) + " attacks succeeded");
  v.require(worst <= 1e-5, "max pixel change " + fmt("%.2e", worst));
  v.require(input_color == 0.0, "input colorfulness " + fmt("%.2e", input_color));
  v.note(std::to_string(failures) + "/" + std::to_string(attacks) + " failed, max change " +
         fmt("%.1e", worst) + ", input colorfulness " + fmt("%g", input_color) +
         ", output colorfulness <= " + fmt("%.1e", output_color));
  return v;
}

// ---- 8. defense sanity ---------------------------------------------------

Verdict defense_sanity(const DeskRun& run) {
  Verdict v;
  std::size_t successes = 0, flips = 0;
  for (std::size_t s = 0; s < run.report.settings.size(); ++s) {
    const EvalSetting& setting = run.report.settings[s];
    if (setting.mode == AttackMode::kRgbAll || !setting.restricted) continue;
    const ColorSpace space =
        setting.mode == AttackMode::kYcbcrChroma ? ColorSpace::kYcbcr : ColorSpace::kLab;
    for (std::size_t r = 0; r < run.report.rows.size(); ++r) {
      const EvalRecord& rec = run.report.record(s, r);
      if (!rec.success) continue;
      ++successes;
      const Image defended = chroma_subsample_420(rec.adversarial, space);
      if (!is_success(run.model.predict(defended.pixels), run.report.rows[r].target_class,
                      setting.kappa)) {
        ++flips;
      }
    }
  }
  const double rate = successes ? static_cast<double>(flips) / successes : 0.0;
  v.require(successes > 0, "no successful restricted chroma attacks");
  v.require(rate >= 0.30, "flip rate " + fmt("%.2f", rate));
  v.note(std::to_string(flips) + "/" + std::to_string(successes) + " flipped (" +
         fmt("%.2f", rate) + ")");
  return v;
}

// ---- 9. metric golden values ---------------------------------------------

Verdict metric_goldens() {
  Verdict v;
  const Image a(16, 16, ColorSpace::kRgb, 0.5f), b(16, 16, ColorSpace::kRgb, 0.6f);
  // Luminance term alone; the constant images make contrast and structure 1.
  const double c1 = 1e-4;
  const double expected = (2 * 0.5 * 0.6 + c1) / (0.25 + 0.36 + c1);
  const double s = ssim(a, b);
  v.require(std::abs(s - expected) <= 1e-4, "constant ssim " + fmt("%.6f", s));

  Image red(8, 8, ColorSpace::kRgb);
  Image checker(8, 8, ColorSpace::kRgb);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      red.at(0, i, j) = 1.0f;
      const bool r = (i + j) % 2 == 0;
      checker.at(0, i, j) = r ? 1.0f : 0.0f;
      checker.at(1, i, j) = r ? 0.0f : 1.0f;
    }
  }
  const double cr = colorfulness(red), cc = colorfulness(checker);
  v.require(std::abs(cr - 0.33541) <= 1e-4, "red colorfulness " + fmt("%.6f", cr));
  v.require(std::abs(cc - 1.15) <= 1e-4, "checker colorfulness " + fmt("%.6f", cc));
  v.note("ssim " + fmt("%.6f", s) + ", red " + fmt("%.5f", cr) + ", checker " + fmt("%.5f", cc));
  return v;
}

// ---- 10. determinism -----------------------------------------------------

std::string report_bytes(const EvaluationReport& r) {
  return per_image_csv(r) + success_rates_csv(r) + distortion_csv(r) + summary_text(r);
}

void print(int n, const char* name, const Verdict& v) {
  std::printf("criterion %2d %-28s %s  %s\n", n, name, v.pass ? "PASS" : "FAIL",
              v.detail.c_str());
  std::fflush(stdout);
}

}  // namespace
}  // namespace chromaflow

int main(int argc, char** argv) {
  using namespace chromaflow;
  CLI::App app{"chromaflow acceptance run"};
  std::uint64_t seed = 2024;
  std::string work_dir;
  app.add_option("--seed", seed, "Seed of the desk-scale run");
  bool quick = false;
  app.add_option("--work-dir", work_dir, "Where to write the evaluation report");
  app.add_flag("--quick", quick, "Only the criteria that need no trained model");
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  auto report = [&](int n, const char* name, const Verdict& v) {
    print(n, name, v);
    all = all && v.pass;
  };

  try {
    report(1, "gradient integrity", gradient_integrity());
    report(2, "colorspace fidelity", colorspace_fidelity());
    report(3, "warp semantics", warp_semantics());
    if (quick) {
      report(9, "metric golden values", metric_goldens());
      return all ? 0 : 1;
    }

    const DeskRun run = desk_run(seed);
    if (!work_dir.empty()) write_report(run.report, work_dir);
    report(4, "desk-scale attack loop", desk_scale(run));
    report(5, "perceptual ordering", perceptual_ordering(run));
    report(6, "luminance preservation", luminance_preservation(run));
    report(7, "grayscale failure mode", grayscale_failure(run));
    report(8, "defense sanity", defense_sanity(run));
    report(9, "metric golden values", metric_goldens());

    const DeskRun again = desk_run(seed);
    Verdict det;
    det.require(report_bytes(run.report) == report_bytes(again.report),
                "reports differ between runs");
    det.require(serialize_weights(run.model) == serialize_weights(again.model),
                "trained weights differ between runs");
    det.note(std::to_string(report_bytes(run.report).size()) + " report bytes compared");
    report(10, "determinism", det);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}

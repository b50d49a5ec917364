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

#include "chromaflow/evaluate.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "chromaflow/error.hpp"
#include "chromaflow/rng.hpp"

namespace chromaflow {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_index(const std::string& text, std::size_t& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string setting_key(const EvalSetting& s) {
  return std::string(attack_mode_name(s.mode)) + "," + format_double(s.kappa) + "," +
         (s.restricted ? "true" : "false");
}

double mean_or_nan(double sum, std::size_t n) {
  return n == 0 ? std::nan("") : sum / static_cast<double>(n);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericError("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::vector<ManifestRow> parse_manifest(const std::string& text, std::size_t num_classes) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<ManifestRow> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != 3 || trim(fields[0]) != "image_path" ||
          trim(fields[1]) != "true_class" || trim(fields[2]) != "target_class") {
        throw FormatError("manifest line " + std::to_string(line_no) +
                          ": expected header 'image_path,true_class,target_class'");
      }
      continue;
    }
    const std::string where = "manifest line " + std::to_string(line_no) + ": ";
    if (fields.size() != 3) {
      throw FormatError(where + "expected 3 fields, got " + std::to_string(fields.size()));
    }
    ManifestRow row;
    row.image_path = trim(fields[0]);
    if (row.image_path.empty()) throw FormatError(where + "empty image_path");
    if (!parse_index(trim(fields[1]), row.true_class)) {
      throw FormatError(where + "true_class '" + trim(fields[1]) + "' is not a class index");
    }
    if (!parse_index(trim(fields[2]), row.target_class)) {
      throw FormatError(where + "target_class '" + trim(fields[2]) + "' is not a class index");
    }
    if (row.true_class >= num_classes || row.target_class >= num_classes) {
      throw FormatError(where + "class index out of range for a " +
                        std::to_string(num_classes) + "-class model");
    }
    if (row.true_class == row.target_class) {
      throw FormatError(where + "target_class equals true_class");
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw FormatError("manifest is empty");
  return rows;
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path,
                                       std::size_t num_classes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), num_classes);
}

std::vector<EvalSetting> expand_settings(const std::vector<AttackMode>& modes,
                                         const std::vector<double>& kappas,
                                         const std::vector<bool>& restricted) {
  std::vector<EvalSetting> settings;
  for (AttackMode mode : modes) {
    for (double kappa : kappas) {
      for (bool r : restricted) settings.push_back({mode, kappa, r});
    }
  }
  return settings;
}

EvaluationReport evaluate(const std::vector<ManifestRow>& rows, const std::vector<Image>& images,
                          const Classifier& model, const std::vector<EvalSetting>& settings,
                          const EvalOptions& options, const ExternalMetrics* external) {
  if (rows.size() != images.size()) {
    throw UsageError("evaluate: " + std::to_string(rows.size()) + " rows but " +
                     std::to_string(images.size()) + " images");
  }
  for (const auto& s : settings) {
    AttackConfig cfg;
    cfg.kappa = s.kappa;
    cfg.max_iters = options.max_iters;
    cfg.lr = options.lr;
    cfg.validate();
  }
  EvaluationReport report;
  report.rows = rows;
  report.settings = settings;
  report.records.resize(settings.size() * rows.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < rows.size(); r = next++) {
      try {
        for (std::size_t s = 0; s < settings.size(); ++s) {
          AttackConfig cfg;
          cfg.mode = settings[s].mode;
          cfg.kappa = settings[s].kappa;
          cfg.restricted = settings[s].restricted;
          cfg.max_iters = options.max_iters;
          cfg.lr = options.lr;
          cfg.seed = derive_seed(options.seed, r);
          AttackResult result = run_attack(images[r], rows[r].target_class, model, cfg);
          EvalRecord& rec = report.records[s * rows.size() + r];
          rec.row = r;
          rec.setting = s;
          rec.success = result.success;
          rec.iterations = result.iterations_used;
          rec.final_loss = result.final_loss;
          rec.metrics = std::move(result.metrics);
          if (external != nullptr) {
            auto it = external->find(rows[r].image_path.string());
            if (it != external->end()) rec.metrics.external = it->second;
          }
          if (options.keep_adversarial) rec.adversarial = std::move(result.adversarial);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = rows.size();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, rows.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

std::vector<EvalCell> EvaluationReport::cells() const {
  std::vector<EvalCell> out;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    EvalCell cell;
    cell.setting = settings[s];
    cell.attempts = rows.size();
    double ssim_sum = 0, ms_sum = 0, l0_sum = 0, l2_sum = 0, linf_sum = 0;
    std::map<std::string, std::pair<double, std::size_t>> ext;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const EvalRecord& rec = record(s, r);
      if (!rec.success) continue;
      ++cell.successes;
      ssim_sum += rec.metrics.one_minus_ssim;
      ms_sum += rec.metrics.one_minus_ms_ssim;
      l0_sum += static_cast<double>(rec.metrics.l0);
      l2_sum += rec.metrics.l2;
      linf_sum += rec.metrics.linf;
      for (const auto& [name, v] : rec.metrics.external) {
        ext[name].first += v;
        ++ext[name].second;
      }
    }
    cell.success_rate = cell.attempts == 0 ? 0.0
                                           : static_cast<double>(cell.successes) /
                                                 static_cast<double>(cell.attempts);
    cell.mean_one_minus_ssim = mean_or_nan(ssim_sum, cell.successes);
    cell.mean_one_minus_ms_ssim = mean_or_nan(ms_sum, cell.successes);
    cell.mean_l0 = mean_or_nan(l0_sum, cell.successes);
    cell.mean_l2 = mean_or_nan(l2_sum, cell.successes);
    cell.mean_linf = mean_or_nan(linf_sum, cell.successes);
    for (const auto& [name, acc] : ext) cell.mean_external[name] = mean_or_nan(acc.first, acc.second);
    out.push_back(std::move(cell));
  }
  return out;
}

namespace {

std::vector<std::string> external_names(const EvaluationReport& report) {
  std::map<std::string, bool> names;
  for (const auto& rec : report.records) {
    for (const auto& [name, v] : rec.metrics.external) names[name] = true;
  }
  std::vector<std::string> out;
  for (const auto& [name, unused] : names) out.push_back(name);
  return out;
}

}  // namespace

std::string per_image_csv(const EvaluationReport& report) {
  const auto ext = external_names(report);
  std::ostringstream out;
  out << "row,image_path,true_class,target_class,mode,kappa,restricted,success,iterations,"
         "final_loss,ssim,ms_ssim,one_minus_ssim,one_minus_ms_ssim,l0,l2,linf,colorfulness";
  for (const auto& name : ext) out << ',' << name;
  out << '\n';
  for (std::size_t s = 0; s < report.settings.size(); ++s) {
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
      const EvalRecord& rec = report.record(s, r);
      const ManifestRow& row = report.rows[r];
      const MetricReport& m = rec.metrics;
      out << r << ',' << row.image_path.string() << ',' << row.true_class << ','
          << row.target_class << ',' << setting_key(report.settings[s]) << ','
          << (rec.success ? 1 : 0) << ',' << rec.iterations << ',' << format_double(rec.final_loss)
          << ',' << format_double(m.ssim) << ',' << format_double(m.ms_ssim) << ','
          << format_double(m.one_minus_ssim) << ',' << format_double(m.one_minus_ms_ssim) << ','
          << m.l0 << ',' << format_double(m.l2) << ',' << format_double(m.linf) << ','
          << format_double(m.colorfulness_benign);
      for (const auto& name : ext) {
        auto it = m.external.find(name);
        out << ',' << (it == m.external.end() ? std::string("nan") : format_double(it->second));
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string success_rates_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "mode,kappa,restricted,attempts,successes,success_rate\n";
  for (const EvalCell& c : report.cells()) {
    out << setting_key(c.setting) << ',' << c.attempts << ',' << c.successes << ','
        << format_double(c.success_rate) << '\n';
  }
  return out.str();
}

std::string distortion_csv(const EvaluationReport& report) {
  const auto ext = external_names(report);
  std::ostringstream out;
  out << "mode,kappa,restricted,successes,mean_one_minus_ssim,mean_one_minus_ms_ssim,mean_l0,"
         "mean_l2,mean_linf";
  for (const auto& name : ext) out << ",mean_" << name;
  out << '\n';
  for (const EvalCell& c : report.cells()) {
    out << setting_key(c.setting) << ',' << c.successes << ','
        << format_double(c.mean_one_minus_ssim) << ',' << format_double(c.mean_one_minus_ms_ssim)
        << ',' << format_double(c.mean_l0) << ',' << format_double(c.mean_l2) << ','
        << format_double(c.mean_linf);
    for (const auto& name : ext) {
      auto it = c.mean_external.find(name);
      out << ',' << (it == c.mean_external.end() ? std::string("nan") : format_double(it->second));
    }
    out << '\n';
  }
  return out.str();
}

std::string summary_text(const EvaluationReport& report) {
  std::ostringstream out;
  char line[256];
  out << "Attack success rates (" << report.rows.size() << " images)\n";
  std::snprintf(line, sizeof(line), "%-6s %6s %-10s %10s %12s %12s\n", "mode", "kappa",
                "restricted", "success", "1-SSIM", "1-MS-SSIM");
  out << line;
  for (const EvalCell& c : report.cells()) {
    std::snprintf(line, sizeof(line), "%-6s %6g %-10s %9.1f%% %12.6f %12.6f\n",
                  attack_mode_name(c.setting.mode), c.setting.kappa,
                  c.setting.restricted ? "yes" : "no", 100.0 * c.success_rate,
                  c.mean_one_minus_ssim, c.mean_one_minus_ms_ssim);
    out << line;
  }
  out << "Distortion means are over successful attacks only.\n";
  return out.str();
}

void write_report(const EvaluationReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / kPerImageCsv, per_image_csv(report));
  write_text(out_dir / kSuccessRatesCsv, success_rates_csv(report));
  write_text(out_dir / kDistortionCsv, distortion_csv(report));
  write_text(out_dir / kSummaryTxt, summary_text(report));
}

}  // namespace chromaflow

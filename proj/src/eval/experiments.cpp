#include "phishdet/eval/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <charconv>

#include "phishdet/error.hpp"
#include "phishdet/util/text.hpp"

namespace phishdet {
namespace {

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string metrics_csv_tail(const Metrics& m) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,%.4f", m.p_d, m.p_fa, m.p_md, m.accuracy);
  return buf;
}

std::string layers_label(const std::vector<std::size_t>& sizes) {
  std::string s = "(";
  for (std::size_t l = 1; l + 1 < sizes.size(); ++l) {
    if (l > 1) s += ' ';
    s += std::to_string(sizes[l]);
  }
  return s + ")";
}

std::size_t argmax(const std::vector<TableRow>& rows) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].metrics.accuracy > rows[best].metrics.accuracy) best = i;
  }
  return best;
}

std::string kernel_label(const KernelSpec& k) {
  switch (k.kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return k.degree == 3 ? "cubic" : "poly" + std::to_string(k.degree);
    case KernelKind::rbf: return "rbf";
    case KernelKind::sigmoid: return "sigmoid";
  }
  return "kernel";
}

}  // namespace

std::string_view to_string(ModelFamily family) noexcept {
  switch (family) {
    case ModelFamily::lr: return "lr";
    case ModelFamily::ann: return "ann";
    case ModelFamily::svm: return "svm";
  }
  return "unknown";
}

std::optional<ModelFamily> parse_model_family(std::string_view name) noexcept {
  if (name == "lr") return ModelFamily::lr;
  if (name == "ann") return ModelFamily::ann;
  if (name == "svm") return ModelFamily::svm;
  return std::nullopt;
}

Model train_model(const Dataset& train, const TrainSpec& spec) {
  switch (spec.family) {
    case ModelFamily::lr: return lr_train(train, spec.lr);
    case ModelFamily::ann: {
      AnnTrainOptions opts = spec.ann;
      if (!opts.layer_sizes.empty()) opts.layer_sizes.front() = train.dim();
      return ann_train(train, opts);
    }
    case ModelFamily::svm: return svm_train(train, spec.svm);
  }
  throw Error(Errc::InvalidHyperparameter, "unknown model family");
}

ModelBundle train_bundle(const Dataset& raw_train, const TrainSpec& spec) {
  Standardizer s = fit_standardizer(raw_train);
  Model m = train_model(apply_standardizer(s, raw_train), spec);
  return ModelBundle{std::move(m), std::move(s)};
}

Metrics evaluate_bundle(const ModelBundle& bundle, const Dataset& raw_test, PfaDenominator pfa) {
  return compute_metrics(confusion(model_predict_all(bundle, raw_test), raw_test.labels), pfa);
}

PreparedSplit prepare_split(const Dataset& data, const SplitSpec& spec) {
  auto [train, test] = split_dataset(data, spec);
  Standardizer s = fit_standardizer(train);
  return PreparedSplit{apply_standardizer(s, train), apply_standardizer(s, test), std::move(s)};
}

Metrics evaluate_on_split(const PreparedSplit& split, const TrainSpec& spec, PfaDenominator pfa) {
  const ModelBundle bundle{train_model(split.train, spec), std::nullopt};
  return evaluate_bundle(bundle, split.test, pfa);
}

SweepResult regularization_sweep(const PreparedSplit& split, const TrainSpec& base, std::span<const double> grid,
                                 PfaDenominator pfa) {
  if (grid.empty()) throw Error(Errc::InvalidConfig, "sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(Errc::InvalidConfig, "sweep grid must be strictly increasing");
  }
  const char* name = base.family == ModelFamily::svm ? "C" : "lambda";
  SweepResult result;
  for (double v : grid) {
    TrainSpec spec = base;
    spec.lr.lambda = v;
    spec.ann.lambda = v;
    spec.svm.c_penalty = v;
    try {
      result.metrics_per_value.push_back(evaluate_on_split(split, spec, pfa));
    } catch (const Error& e) {
      throw Error(e.code(), std::string("at ") + name + "=" + format_param(v) + ": " + e.what());
    }
    result.parameter_values.push_back(v);
  }
  return result;
}

ComparisonTable ann_grid(const PreparedSplit& split, const AnnTrainOptions& base, PfaDenominator pfa) {
  const std::size_t d = split.train.dim();
  const std::vector<std::vector<std::size_t>> shapes{{d, 100, 1}, {d, 100, 100, 1}};
  ComparisonTable table;
  for (const auto& shape : shapes) {
    for (Activation act : {Activation::relu, Activation::tanh, Activation::sigmoid}) {
      TrainSpec spec;
      spec.family = ModelFamily::ann;
      spec.ann = base;
      spec.ann.layer_sizes = shape;
      spec.ann.activation = act;
      table.rows.push_back({layers_label(shape) + "/" + std::string(to_string(act)), evaluate_on_split(split, spec, pfa)});
    }
  }
  table.best = argmax(table.rows);
  return table;
}

ComparisonTable kernel_comparison(const PreparedSplit& split, const SvmTrainOptions& base, PfaDenominator pfa) {
  ComparisonTable table;
  for (const KernelSpec& k : {KernelSpec::linear(), KernelSpec::polynomial(), KernelSpec::rbf(), KernelSpec::sigmoid()}) {
    TrainSpec spec;
    spec.family = ModelFamily::svm;
    spec.svm = base;
    spec.svm.kernel = k;
    table.rows.push_back({kernel_label(k), evaluate_on_split(split, spec, pfa)});
  }
  table.best = argmax(table.rows);
  return table;
}

ComparisonTable model_comparison(const PreparedSplit& split, const ComparisonOptions& options, PfaDenominator pfa) {
  const ComparisonTable ann = ann_grid(split, options.ann, pfa);
  const ComparisonTable svm = kernel_comparison(split, options.svm, pfa);
  return model_comparison(split, options, ann, svm, pfa);
}

ComparisonTable model_comparison(const PreparedSplit& split, const ComparisonOptions& options,
                                 const ComparisonTable& ann, const ComparisonTable& svm, PfaDenominator pfa) {
  TrainSpec lr;
  lr.family = ModelFamily::lr;
  lr.lr = options.lr;
  const SweepResult sweep = regularization_sweep(split, lr, options.lr_lambdas, pfa);
  std::size_t best = 0;
  for (std::size_t i = 1; i < sweep.metrics_per_value.size(); ++i) {
    if (sweep.metrics_per_value[i].accuracy > sweep.metrics_per_value[best].accuracy) best = i;
  }
  ComparisonTable table;
  table.rows.push_back({"ANN " + ann.rows.at(ann.best).config, ann.rows.at(ann.best).metrics});
  table.rows.push_back({"SVM " + svm.rows.at(svm.best).config, svm.rows.at(svm.best).metrics});
  table.rows.push_back({"LR lambda=" + format_param(sweep.parameter_values[best]), sweep.metrics_per_value[best]});
  table.best = argmax(table.rows);
  return table;
}

std::vector<double> parse_grid(std::string_view spec) {
  auto number = [&](std::string_view s) {
    s = text::trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw Error(Errc::InvalidConfig, "bad number '" + std::string(s) + "' in grid '" + std::string(spec) + "'");
    }
    return v;
  };
  std::vector<double> out;
  const auto parts = text::split(spec, ':');
  if (parts.size() == 3) {
    const double a = number(parts[0]);
    const double b = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || b < a) throw Error(Errc::InvalidConfig, "grid '" + std::string(spec) + "' needs a <= b and step > 0");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  } else if (parts.size() == 1) {
    for (std::string_view p : text::split(spec, ',')) out.push_back(number(p));
  } else {
    throw Error(Errc::InvalidConfig, "grid must be 'a:b:step' or a comma-separated list");
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw Error(Errc::InvalidConfig, "grid values must be strictly increasing");
  }
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "param,p_d,p_fa,p_md,accuracy\n";
  for (std::size_t i = 0; i < sweep.parameter_values.size(); ++i) {
    out += format_param(sweep.parameter_values[i]) + "," + metrics_csv_tail(sweep.metrics_per_value[i]) + "\n";
  }
  return out;
}

std::string table_csv(const ComparisonTable& table) {
  std::string out = "param,p_d,p_fa,p_md,accuracy\n";
  for (const TableRow& row : table.rows) out += row.config + "," + metrics_csv_tail(row.metrics) + "\n";
  return out;
}

std::string table_report(const std::string& title, const ComparisonTable& table) {
  std::size_t width = 13;
  for (const TableRow& row : table.rows) width = std::max(width, row.config.size());
  std::string out = title + "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "  %-*s  %8s  %8s  %8s  %8s\n", static_cast<int>(width), "configuration", "P_d", "P_fa",
                "P_md", "accuracy");
  out += buf;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const Metrics& m = table.rows[i].metrics;
    std::snprintf(buf, sizeof buf, "%s %-*s  %7.1f%%  %7.1f%%  %7.1f%%  %7.1f%%\n", i == table.best ? "*" : " ",
                  static_cast<int>(width), table.rows[i].config.c_str(), 100 * m.p_d, 100 * m.p_fa, 100 * m.p_md,
                  100 * m.accuracy);
    out += buf;
  }
  return out;
}

std::string metrics_report(const Metrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "p_d       %.4f\np_fa      %.4f\np_md      %.4f\naccuracy  %.4f\n", m.p_d, m.p_fa, m.p_md,
                m.accuracy);
  return buf;
}

}  // namespace phishdet

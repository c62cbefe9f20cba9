#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include "neuropath/architecture.hpp"
#include "neuropath/errors.hpp"
#include "neuropath/model_io.hpp"
#include "neuropath/parallel.hpp"
#include "neuropath/statistics.hpp"
#include "neuropath/trainer.hpp"

namespace neuropath::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

fs::path require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) {
    throw IoError("missing data file '" + p.string() + "' (check --data-dir)");
  }
  return p;
}

Dataset load_split(const RunConfig& cfg, bool train) {
  if (cfg.data_dir.empty()) throw UsageError("--data-dir is required for this command");
  Dataset data;
  if (cfg.dataset == "mnist") {
    const std::string prefix = train ? "train" : "t10k";
    data = load_mnist(require_file(cfg.data_dir / (prefix + "-images-idx3-ubyte")),
                      require_file(cfg.data_dir / (prefix + "-labels-idx1-ubyte")),
                      train ? "mnist-train" : "mnist-test");
  } else {
    std::vector<fs::path> batches;
    if (train) {
      for (int i = 1; i <= 5; ++i) {
        batches.push_back(require_file(cfg.data_dir / ("data_batch_" + std::to_string(i) + ".bin")));
      }
    } else {
      batches.push_back(require_file(cfg.data_dir / "test_batch.bin"));
    }
    data = load_cifar10(batches, train ? "cifar10-train" : "cifar10-test");
  }
  const std::size_t limit = train ? cfg.train_limit : cfg.test_limit;
  return limit == 0 ? data : data.head(limit);
}

std::string instance_name(SynthesisMethod s, Measure m, std::size_t k) {
  return to_string(s) + "_" + to_string(m) + "_k" + std::to_string(k);
}

std::vector<std::size_t> correctly_classified(const Network& net, const Dataset& data,
                                              std::size_t jobs) {
  std::vector<char> ok(data.size());
  parallel_for(data.size(), jobs, [&](std::size_t i) {
    ok[i] = forward(net, data.input(i)).predicted_class == data.label(i);
  });
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ok.size(); ++i)
    if (ok[i]) idx.push_back(i);
  return idx;
}

json set_to_json(const SuspiciousSet& s, std::optional<std::size_t> cls) {
  json neurons = json::array();
  for (const auto& n : s.ranked) neurons.push_back({n.layer, n.neuron, n.score});
  return {{"class", cls ? json(*cls) : json(nullptr)},
          {"truncated", s.truncated},
          {"neurons", neurons}};
}

SuspiciousSet set_from_json(const json& inst, const json& entry) {
  SuspiciousSet s;
  s.mode = parse_selection_mode(inst.at("mode").get<std::string>());
  s.k = inst.at("k").get<std::size_t>();
  s.layers = inst.at("layers").get<std::vector<std::size_t>>();
  s.widths = inst.at("widths").get<std::vector<std::size_t>>();
  s.truncated = entry.at("truncated").get<bool>();
  for (const auto& n : entry.at("neurons")) {
    s.ranked.push_back({n.at(0).get<std::size_t>(), n.at(1).get<std::size_t>(), n.at(2).get<double>()});
  }
  return s;
}

// Spectra written by the localize stage: one pooled, or one per class.
std::vector<HitSpectrum> read_spectra(const RunConfig& cfg, std::size_t num_classes) {
  std::vector<HitSpectrum> spectra;
  if (!cfg.per_class) {
    spectra.push_back(read_spectrum_csv(cfg.out / "spectrum.csv"));
    return spectra;
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    spectra.push_back(read_spectrum_csv(cfg.out / ("spectrum_class" + std::to_string(c) + ".csv")));
  }
  return spectra;
}

}  // namespace

void train_stage(const RunConfig& cfg, std::ostream& log) {
  const Dataset train_set = load_split(cfg, true);
  const Dataset test_set = load_split(cfg, false);
  const std::string arch =
      cfg.arch.find('<') == std::string::npos ? reference_architecture(cfg.arch) : cfg.arch;
  const Network init = build_network(train_set.input_shape(), arch, cfg.seed);

  TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.learning_rate = cfg.learning_rate;
  tc.seed = cfg.seed;
  json epochs = json::array();
  const Network net = train(init, train_set, tc, [&](const EpochStats& s) {
    log << "train: epoch " << s.epoch << " loss " << s.mean_loss << " accuracy "
        << s.train_accuracy << "%\n";
    epochs.push_back({{"epoch", s.epoch}, {"loss", s.mean_loss}, {"accuracy", s.train_accuracy}});
  });
  const double test_acc = accuracy(net, test_set);
  log << "train: test accuracy " << test_acc << "%\n";

  make_dirs(cfg.out);
  save_model(net, cfg.model_dir());
  write_json(cfg.out / "train.json",
             {{"architecture", arch}, {"epochs", epochs}, {"test_accuracy", test_acc}});
}

void localize_stage(const RunConfig& cfg, std::ostream& log) {
  const Network net = load_model(cfg.model_dir());
  const Dataset test_set = load_split(cfg, false);
  make_dirs(cfg.out);

  AccumulateOptions opts;
  opts.jobs = cfg.jobs;
  SpectrumResult total{HitSpectrum(net)};
  if (cfg.per_class) {
    for (std::size_t c = 0; c < net.num_classes(); ++c) {
      opts.class_filter = c;
      const SpectrumResult r = accumulate_spectrum(net, test_set, cfg.analysis(), opts);
      write_spectrum_csv(cfg.out / ("spectrum_class" + std::to_string(c) + ".csv"), r.spectrum,
                         cfg.measures.front(), cfg.mode);
      total.spectrum.merge(r.spectrum);
      total.analyzed += r.analyzed;
      total.passed += r.passed;
      total.failed += r.failed;
      total.skipped_degenerate += r.skipped_degenerate;
    }
  } else {
    total = accumulate_spectrum(net, test_set, cfg.analysis(), opts);
  }
  write_spectrum_csv(cfg.out / "spectrum.csv", total.spectrum, cfg.measures.front(), cfg.mode);
  write_json(cfg.out / "localize.json", {{"analyzed", total.analyzed},
                                         {"passed", total.passed},
                                         {"failed", total.failed},
                                         {"skipped_degenerate", total.skipped_degenerate}});
  log << "localize: " << total.analyzed << " inputs, " << total.failed << " failing, "
      << total.skipped_degenerate << " skipped\n";
}

void synthesize_stage(const RunConfig& cfg, std::ostream& log) {
  const Network net = load_model(cfg.model_dir());
  const Dataset test_set = load_split(cfg, false);
  const auto spectra = read_spectra(cfg, net.num_classes());
  const auto seeds = correctly_classified(net, test_set, cfg.jobs);

  for (auto method : cfg.synth) {
    const SynthesisParams params = cfg.synthesis(method);
    for (auto measure : cfg.measures) {
      std::vector<LayerScores> scores;
      for (const auto& s : spectra) scores.push_back(suspiciousness(s, measure));
      for (auto k : cfg.ks) {
        const std::string name = instance_name(method, measure, k);
        const fs::path dir = cfg.out / "synth" / name;
        make_dirs(dir);

        std::vector<SuspiciousSet> sets;
        json targets = {{"synth", to_string(method)},
                        {"measure", to_string(measure)},
                        {"k", k},
                        {"mode", to_string(cfg.mode)},
                        {"sets", json::array()}};
        for (std::size_t i = 0; i < scores.size(); ++i) {
          sets.push_back(rank_top_k(scores[i], k, cfg.mode));
          targets["sets"].push_back(
              set_to_json(sets.back(), cfg.per_class ? std::optional(i) : std::nullopt));
        }
        targets["layers"] = sets.front().layers;
        targets["widths"] = sets.front().widths;
        write_json(dir / "targets.json", targets);

        std::vector<std::optional<SynthesisResult>> results(seeds.size());
        parallel_for(seeds.size(), cfg.jobs, [&](std::size_t i) {
          const std::size_t idx = seeds[i];
          const std::size_t label = test_set.label(idx);
          const auto& set = cfg.per_class ? sets.at(label) : sets.front();
          results[i] = synthesize(net, test_set.input(idx), label, set, params);
        });

        std::vector<double> flat;
        flat.reserve(seeds.size() * test_set.input_size());
        json samples = json::array();
        std::size_t failed = 0;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
          const auto& r = *results[i];
          flat.insert(flat.end(), r.synthesized.begin(), r.synthesized.end());
          failed += r.misclassified ? 1 : 0;
          samples.push_back({{"original_idx", seeds[i]},
                             {"label", r.label},
                             {"final_class", r.final_class},
                             {"misclassified", r.misclassified},
                             {"iterations", r.iterations_run},
                             {"l1", r.distances.l1},
                             {"l2", r.distances.l2},
                             {"linf", r.distances.linf}});
        }
        write_float32_file(dir / "inputs.f32", flat);
        write_json(dir / "index.json", {{"instance", name},
                                        {"input_size", test_set.input_size()},
                                        {"count", seeds.size()},
                                        {"samples", samples}});
        log << "synthesize: " << name << " " << failed << "/" << seeds.size()
            << " misclassified\n";
      }
    }
  }
}

json evaluate_stage(const RunConfig& cfg, std::ostream& log) {
  const Network net = load_model(cfg.model_dir());
  const Dataset test_set = load_split(cfg, false);
  make_dirs(cfg.out / "plots");

  json report;
  report["config"] = to_json(cfg);
  report["model"] = {{"test_accuracy", accuracy(net, test_set)},
                     {"test_samples", test_set.size()},
                     {"correctly_classified", correctly_classified(net, test_set, cfg.jobs).size()}};
  if (fs::exists(cfg.out / "localize.json")) {
    report["localization"] = read_json(cfg.out / "localize.json");
  }

  struct Instance {
    SynthesisMethod synth;
    Measure measure;
    std::size_t k;
    double accuracy;
    CoverageReport coverage;
    std::vector<SuspiciousSet> sets;
  };
  std::vector<Instance> instances;
  json rows = json::array();

  for (auto method : cfg.synth) {
    for (auto measure : cfg.measures) {
      for (auto k : cfg.ks) {
        const std::string name = instance_name(method, measure, k);
        const fs::path dir = cfg.out / "synth" / name;
        const json targets = read_json(dir / "targets.json");
        const json index = read_json(dir / "index.json");
        const std::vector<double> flat = read_float32_file(dir / "inputs.f32");

        const std::size_t d = index.at("input_size").get<std::size_t>();
        const std::size_t n = index.at("count").get<std::size_t>();
        if (d != test_set.input_size() || flat.size() != n * d) {
          throw DataError("'" + (dir / "inputs.f32").string() + "' holds " +
                          std::to_string(flat.size()) + " values, index expects " +
                          std::to_string(n) + " x " + std::to_string(d));
        }

        Instance inst{method, measure, k, 0.0, {}, {}};
        for (const auto& entry : targets.at("sets")) inst.sets.push_back(set_from_json(targets, entry));

        std::vector<std::vector<double>> originals, synthesized;
        std::vector<std::size_t> labels;
        // Results grouped by the target set that produced them.
        std::vector<std::vector<SynthesisResult>> groups(inst.sets.size());
        for (std::size_t i = 0; i < n; ++i) {
          const auto& s = index.at("samples").at(i);
          const std::size_t idx = s.at("original_idx").get<std::size_t>();
          if (idx >= test_set.size()) {
            throw DataError("'" + (dir / "index.json").string() + "' refers to sample " +
                            std::to_string(idx) + " beyond the test set");
          }
          const auto in = test_set.input(idx);
          originals.emplace_back(in.begin(), in.end());
          synthesized.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i * d),
                                   flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
          labels.push_back(test_set.label(idx));
          SynthesisResult r;
          r.label = labels.back();
          r.synthesized = synthesized.back();
          groups.at(inst.sets.size() == 1 ? 0 : r.label).push_back(std::move(r));
        }

        for (std::size_t g = 0; g < groups.size(); ++g) {
          if (groups[g].empty() || inst.sets[g].empty()) continue;
          inst.coverage.merge(coverage_and_failures(net, groups[g], inst.sets[g],
                                                    cfg.coverage_options()));
        }
        const SynthesizedMetrics m = synthesized_metrics(net, originals, labels, synthesized);
        inst.accuracy = m.accuracy;
        rows.push_back({{"synth", to_string(method)},
                        {"measure", to_string(measure)},
                        {"k", k},
                        {"n_synth", m.count},
                        {"n_failed", inst.coverage.n_failed},
                        {"loss", m.loss},
                        {"accuracy", m.accuracy},
                        {"c", inst.coverage.c},
                        {"f", inst.coverage.f},
                        {"l1", m.mean_distance.l1},
                        {"l2", m.mean_distance.l2},
                        {"linf", m.mean_distance.linf}});
        log << "evaluate: " << name << " accuracy " << m.accuracy << "% C " << inst.coverage.c
            << " F " << inst.coverage.f << "\n";
        instances.push_back(std::move(inst));
      }
    }
  }
  report["instances"] = rows;

  // C against F per synthesizer.
  json correlation = json::array();
  for (auto method : cfg.synth) {
    std::vector<double> cs, fs_;
    std::vector<PlotPoint> points;
    for (const auto& inst : instances) {
      if (inst.synth != method) continue;
      cs.push_back(inst.coverage.c);
      fs_.push_back(inst.coverage.f);
      points.push_back({to_string(inst.measure) + "_k" + std::to_string(inst.k), inst.coverage.c,
                        inst.coverage.f});
    }
    write_plot_csv(cfg.out / "plots" / ("c_vs_f_" + to_string(method) + ".csv"), points);
    json row = {{"synth", to_string(method)}, {"n", cs.size()}, {"rho", nullptr}, {"p_value", nullptr}};
    if (cs.size() >= 3) {
      if (const auto r = spearman(cs, fs_)) {
        row["rho"] = r->statistic;
        row["p_value"] = *r->p_value;
      }
    }
    correlation.push_back(row);
  }
  report["correlation"] = correlation;

  // Accuracy over K for every (synthesizer, measure) pair of approaches.
  json comparisons = json::array();
  std::vector<std::pair<std::string, std::vector<double>>> groups;
  for (auto method : cfg.synth) {
    for (auto measure : cfg.measures) {
      std::vector<double> acc;
      for (const auto& inst : instances)
        if (inst.synth == method && inst.measure == measure) acc.push_back(inst.accuracy);
      groups.push_back({to_string(method) + "/" + to_string(measure), acc});
    }
  }
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      const StatResult w = wilcoxon_rank_sum(groups[a].second, groups[b].second);
      comparisons.push_back({{"a", groups[a].first},
                             {"b", groups[b].first},
                             {"metric", "accuracy"},
                             {"z", w.statistic},
                             {"p_value", *w.p_value},
                             {"a12", a12(groups[a].second, groups[b].second).statistic}});
    }
  }
  report["comparisons"] = comparisons;

  // Per-layer Jaccard overlap between the measures' suspicious sets.
  json overlap = json::array();
  for (auto k : cfg.ks) {
    std::vector<const Instance*> at_k;
    for (const auto& inst : instances)
      if (inst.k == k && inst.synth == cfg.synth.front()) at_k.push_back(&inst);
    for (std::size_t a = 0; a < at_k.size(); ++a) {
      for (std::size_t b = a + 1; b < at_k.size(); ++b) {
        std::vector<double> mean;
        const std::size_t nsets = at_k[a]->sets.size();
        for (std::size_t g = 0; g < nsets; ++g) {
          const auto r = overlap_ratio(at_k[a]->sets[g], at_k[b]->sets[g]);
          if (mean.empty()) mean.assign(r.size(), 0.0);
          for (std::size_t l = 0; l < r.size(); ++l) mean[l] += r[l] / static_cast<double>(nsets);
        }
        overlap.push_back({{"k", k},
                           {"a", to_string(at_k[a]->measure)},
                           {"b", to_string(at_k[b]->measure)},
                           {"per_layer", mean}});
      }
    }
  }
  report["overlap"] = overlap;

  write_json(cfg.out / "report.json", report);
  log << "evaluate: wrote " << (cfg.out / "report.json").string() << "\n";
  return report;
}

namespace {

// Long flag name -> config key, and how to write the parsed value there.
struct FlagTable {
  struct Entry {
    CLI::Option* option;
    std::function<void(json&)> apply;
  };
  std::vector<Entry> entries;

  template <class T>
  void add(CLI::App& app, const std::string& flag, const std::string& key, T& storage,
           const std::string& help) {
    CLI::Option* o = app.add_option("--" + flag, storage, help);
    if constexpr (std::is_same_v<T, std::vector<std::string>> ||
                  std::is_same_v<T, std::vector<std::size_t>>) {
      o->delimiter(',');
    }
    entries.push_back({o, [key, &storage](json& j) { j[key] = storage; }});
  }
  void add_flag(CLI::App& app, const std::string& flag, const std::string& key, bool& storage,
                const std::string& help) {
    CLI::Option* o = app.add_flag("--" + flag, storage, help);
    entries.push_back({o, [key, &storage](json& j) { j[key] = storage; }});
  }
};

struct RawFlags {
  std::string dataset, data_dir, model, arch, mode, bound, coverage, config, out;
  std::size_t train_limit = 0, test_limit = 0, epochs = 0, batch_size = 0, iterations = 0,
              jobs = 1;
  double lr = 0, alpha = 0, beta = 0, step = 0, dmax = 0, coverage_fraction = 0;
  bool per_class = false, mga_anchor = false;
  std::vector<std::string> measure, synth;
  std::vector<std::size_t> k;
  std::uint64_t seed = 0;
};

enum Group : unsigned {
  kData = 1,
  kTrain = 2,
  kModel = 4,
  kAnalysis = 8,
  kSelect = 16,
  kSynth = 32,
  kEval = 64,
};

void register_flags(CLI::App& app, FlagTable& t, RawFlags& f, unsigned groups) {
  app.add_option("--config", f.config, "JSON file with run settings; flags override it");
  app.add_option("--out", f.out, "Output directory (default neuropath-out)");
  app.add_option("--jobs", f.jobs, "Worker threads for per-input stages")->check(CLI::PositiveNumber);
  t.add(app, "seed", "seed", f.seed, "Seed for initialization and shuffling");
  if (groups & kData) {
    t.add(app, "dataset", "dataset", f.dataset, "mnist or cifar10");
    t.add(app, "data-dir", "data_dir", f.data_dir, "Directory with the dataset files");
    t.add(app, "test-limit", "test_limit", f.test_limit, "Use only the first N test samples");
  }
  if (groups & kTrain) {
    t.add(app, "train-limit", "train_limit", f.train_limit, "Use only the first N training samples");
    t.add(app, "arch", "arch", f.arch, "Reference model name or layer spec like \"8 * <20>, <10>\"");
    t.add(app, "epochs", "epochs", f.epochs, "Training epochs");
    t.add(app, "batch-size", "batch_size", f.batch_size, "Mini-batch size");
    t.add(app, "lr", "lr", f.lr, "SGD learning rate");
  }
  if (groups & kModel) {
    t.add(app, "model", "model", f.model, "Model directory or manifest (default <out>/model)");
  }
  if (groups & kAnalysis) {
    t.add(app, "alpha", "alpha", f.alpha, "Criticality coefficient in (0,1]");
    t.add(app, "beta", "beta", f.beta, "Activation threshold");
    t.add_flag(app, "per-class", "per_class", f.per_class, "Localize and synthesize per class");
  }
  if (groups & kSelect) {
    t.add(app, "measure", "measure", f.measure, "tarantula, ochiai, barinel (comma separated)");
    t.add(app, "k", "k", f.k, "Suspicious neurons per layer (comma separated)");
    t.add(app, "mode", "mode", f.mode, "pathway or neuron");
  }
  if (groups & kSynth) {
    t.add(app, "synth", "synth", f.synth, "ga, mga (comma separated)");
    t.add(app, "step", "step", f.step, "Gradient step size");
    t.add(app, "dmax", "dmax", f.dmax, "Maximum allowed distance");
    t.add(app, "bound", "bound", f.bound, "step: dmax limits every step; ball: dmax limits the total");
    t.add(app, "iterations", "iterations", f.iterations, "Synthesis iterations");
    t.add_flag(app, "mga-anchor", "mga_anchor", f.mga_anchor,
               "Penalize drift of earlier-stage targets in MGA");
  }
  if (groups & kEval) {
    t.add(app, "coverage", "coverage", f.coverage, "pathway, all or fraction");
    t.add(app, "coverage-fraction", "coverage_fraction", f.coverage_fraction,
          "Share of targets that must be active for --coverage fraction");
  }
}

RunConfig resolve(const FlagTable& t, const RawFlags& f, const CLI::App& sub) {
  json j = to_json(RunConfig{});
  RunConfig defaults;
  fs::path out = defaults.out;
  std::size_t jobs = defaults.jobs;
  if (!f.config.empty()) {
    json file;
    try {
      file = read_json(f.config);
    } catch (const Error& e) {
      throw UsageError(std::string("--config: ") + e.what());
    }
    if (file.is_object()) {
      if (file.contains("out")) {
        out = file["out"].get<std::string>();
        file.erase("out");
      }
      if (file.contains("jobs")) {
        jobs = file["jobs"].get<std::size_t>();
        file.erase("jobs");
      }
    }
    merge_json(j, file, "--config '" + f.config + "'");
  }
  for (const auto& e : t.entries) {
    if (e.option->count() > 0) e.apply(j);
  }
  RunConfig cfg = from_json(j);
  if (sub.count("--out") > 0) out = f.out;
  if (sub.count("--jobs") > 0) jobs = f.jobs;
  cfg.out = out;
  cfg.jobs = jobs;
  cfg.validate();
  return cfg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural pathway fault localization toolkit", "neuropath"};
  app.require_subcommand(1);
  RawFlags flags;

  struct Command {
    std::string name;
    std::string help;
    unsigned groups;
    std::function<void(const RunConfig&)> action;
    CLI::App* app = nullptr;
    FlagTable table;
  };
  std::vector<Command> commands;
  commands.push_back({"train", "Train a model and save it under <out>/model", kData | kTrain | kModel,
                      [&](const RunConfig& c) { train_stage(c, err); }, nullptr, {}});
  commands.push_back({"localize", "Accumulate hit spectra and write spectrum CSV",
                      kData | kModel | kAnalysis | kSelect,
                      [&](const RunConfig& c) { localize_stage(c, err); }, nullptr, {}});
  commands.push_back({"synthesize", "Synthesize inputs activating the suspicious neurons",
                      kData | kModel | kAnalysis | kSelect | kSynth,
                      [&](const RunConfig& c) { synthesize_stage(c, err); }, nullptr, {}});
  commands.push_back({"evaluate", "Write report JSON and plot data",
                      kData | kModel | kAnalysis | kSelect | kSynth | kEval,
                      [&](const RunConfig& c) { evaluate_stage(c, err); }, nullptr, {}});
  commands.push_back({"pipeline", "train (unless --model), localize, synthesize, evaluate",
                      kData | kTrain | kModel | kAnalysis | kSelect | kSynth | kEval,
                      [&](const RunConfig& c) {
                        if (c.model.empty()) train_stage(c, err);
                        localize_stage(c, err);
                        synthesize_stage(c, err);
                        evaluate_stage(c, err);
                      },
                      nullptr,
                      {}});
  for (auto& c : commands) {
    c.app = app.add_subcommand(c.name, c.help);
    register_flags(*c.app, c.table, flags, c.groups);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    for (auto& c : commands) {
      if (c.app->parsed()) {
        c.action(resolve(c.table, flags, *c.app));
        break;
      }
    }
  } catch (const UsageError& e) {
    err << "neuropath: usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "neuropath: numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    err << "neuropath: error: " << e.what() << "\n";
    return kDataOrModel;
  }
  return kOk;
}

}  // namespace neuropath::cli

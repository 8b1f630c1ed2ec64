// svmp: pooling, baselines, classification and checks from the command line.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svmp/config.hpp"
#include "svmp/grad.hpp"
#include "svmp/io.hpp"
#include "svmp/negbag.hpp"
#include "svmp/pipeline.hpp"

namespace fs = std::filesystem;
using namespace svmp;

namespace {

std::string fmt(double v, int digits = 9) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

// ---- gen-negatives ----------------------------------------------------------

struct GenNegativesArgs {
  std::string manifest;
  std::string corpus;
  long long count = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen_negatives(const GenNegativesArgs& a) {
  NegativeBag neg;
  if (!a.corpus.empty()) {
    const NegativeBag corpus = io::read_negative(a.corpus);
    const Index count = a.count > 0 ? static_cast<Index>(a.count) : std::min<Index>(corpus.size(), 50);
    neg = negbag::sample_corpus(corpus, count, a.seed);
  } else {
    if (a.manifest.empty()) throw Error(ErrorKind::kInvalidArgument, "gen-negatives needs --from-manifest or --corpus");
    const io::LoadedDataset data = io::load_manifest(a.manifest);
    Index longest = 0;
    for (const auto& bag : data.bags) longest = std::max(longest, bag.size());
    const auto [mean, sd] = negbag::estimate_moments(data.bags);
    negbag::NoiseSpec spec;
    spec.mean = mean;
    spec.std = sd;
    spec.count = a.count > 0 ? static_cast<Index>(a.count) : negbag::default_negative_count(longest);
    spec.seed = a.seed;
    neg = negbag::gen_noise(spec);
  }
  io::write_negative(neg, a.out);
  std::cout << "wrote " << neg.size() << " x " << neg.dim() << " negatives to " << a.out << "\n";
  return 0;
}

// ---- pool -------------------------------------------------------------------

struct PoolArgs {
  std::string manifest;
  std::string neg;
  std::string algo;
  std::optional<double> eta;
  std::optional<double> c1;
  std::optional<double> c2;
  std::string kernel;
  std::string config_file;
  std::vector<std::string> settings;
  std::string out;
  std::string report;
  int jobs = 1;
};

config::CliConfig resolve_config(const std::string& file, const std::vector<std::string>& settings) {
  config::CliConfig cfg = file.empty() ? config::CliConfig{} : config::load(file);
  for (const auto& s : settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kParse, "--set expects key=value, got '" + s + "'");
    config::apply(cfg, s.substr(0, eq), s.substr(eq + 1), "--set: ");
  }
  return cfg;
}

int run_pool(const PoolArgs& a) {
  config::CliConfig cfg = resolve_config(a.config_file, a.settings);
  if (!a.algo.empty()) cfg.algorithm = parse_algorithm(a.algo);
  if (a.eta) cfg.pooling.eta = *a.eta;
  if (a.c1) cfg.pooling.c1 = *a.c1;
  if (a.c2) cfg.pooling.c2 = *a.c2;
  if (!a.kernel.empty()) {
    if (a.kernel == "none") {
      cfg.kernel.reset();
    } else {
      if (!cfg.kernel) cfg.kernel.emplace();
      cfg.kernel->kernel = kermap::parse_kernel(a.kernel);
    }
  }

  const io::LoadedDataset data = io::load_manifest(a.manifest);
  const NegativeBag neg = io::read_negative(a.neg);
  pipeline::PoolOptions options{cfg.algorithm, cfg.kernel, a.jobs};
  const pipeline::PoolDatasetResult result =
      pipeline::pool_dataset(data.bags, data.labels, data.class_names, neg, cfg.pooling, options);

  io::write_descriptors(result.set, a.out);
  const std::string report = a.report.empty() ? a.out + ".feasibility.csv" : a.report;
  std::string csv = "sequence_id,feasible,objective,iterations\n";
  int feasible = 0;
  int failed = 0;
  for (const auto& r : result.records) {
    if (r.ok) {
      csv += r.sequence_id + "," + (r.feasible ? "1" : "0") + "," + fmt(r.objective, 17) + "," +
             std::to_string(r.iterations) + "\n";
      feasible += r.feasible;
    } else {
      csv += r.sequence_id + ",error,nan,0\n";
      ++failed;
      std::cerr << "warning: " << r.sequence_id << ": " << one_line(r.error) << "\n";
    }
  }
  io::write_text(csv, report);
  std::cout << "pooled " << result.set.size() << " of " << result.records.size() << " bags with "
            << to_string(cfg.algorithm) << " (" << feasible << " feasible, " << failed << " failed)\n"
            << "descriptors: " << a.out << "\nreport: " << report << "\n";
  return 0;
}

// ---- baseline / combine -----------------------------------------------------

int run_baseline(const std::string& manifest, const std::string& method, bool raw, const std::string& out) {
  const io::LoadedDataset data = io::load_manifest(manifest);
  const pipeline::LabeledDescriptorSet set = pipeline::baseline_dataset(
      data.bags, data.labels, data.class_names, pipeline::parse_baseline(method), !raw);
  io::write_descriptors(set, out);
  std::cout << "wrote " << set.size() << " " << method << "-pool descriptors to " << out << "\n";
  return 0;
}

int run_combine(const std::vector<std::string>& inputs, const std::string& out) {
  if (inputs.size() < 2) throw Error(ErrorKind::kInvalidArgument, "combine needs at least two --desc inputs");
  pipeline::LabeledDescriptorSet set = io::read_descriptors(inputs.front());
  for (std::size_t k = 1; k < inputs.size(); ++k) set = pipeline::concatenate(set, io::read_descriptors(inputs[k]));
  io::write_descriptors(set, out);
  std::cout << "wrote " << set.size() << " x " << set.dim() << " combined descriptors to " << out << "\n";
  return 0;
}

// ---- train / eval -----------------------------------------------------------

int run_train(const std::string& desc, double c, int jobs, const std::string& out) {
  const pipeline::LabeledDescriptorSet set = io::read_descriptors(desc);
  const pipeline::MulticlassModel model = pipeline::train_classifier(set, c, jobs);
  io::write_model(model, out);
  std::cout << "trained " << model.num_classes() << " one-vs-rest classifiers on " << set.size()
            << " descriptors; model: " << out << "\n";
  return 0;
}

fs::path csv_sibling(const fs::path& report) {
  fs::path p = report;
  if (p.extension() == ".csv") p.replace_extension(".txt");
  else p += ".csv";
  return p;
}

int run_eval(const std::string& desc, const std::string& model_path, const std::string& report) {
  const pipeline::LabeledDescriptorSet set = io::read_descriptors(desc);
  const pipeline::MulticlassModel model = io::read_model(model_path);
  const pipeline::Evaluation ev = pipeline::evaluate(model, set);

  std::ostringstream text;
  text << "accuracy " << fmt(ev.accuracy, 6) << " (" << ev.correct << "/" << ev.total << ")\n";
  text << "confusion (rows = true class, columns = predicted)\n";
  text << std::setw(10) << "";
  for (const auto& name : model.class_names) text << std::setw(8) << name;
  text << "\n";
  for (Index t = 0; t < ev.confusion.rows(); ++t) {
    text << std::setw(10) << model.class_names[static_cast<std::size_t>(t)];
    for (Index p = 0; p < ev.confusion.cols(); ++p) text << std::setw(8) << ev.confusion(t, p);
    text << "\n";
  }

  std::string csv = "metric,true_class,predicted_class,value\n";
  csv += "accuracy,,," + fmt(ev.accuracy, 17) + "\n";
  csv += "correct,,," + std::to_string(ev.correct) + "\n";
  csv += "total,,," + std::to_string(ev.total) + "\n";
  for (Index t = 0; t < ev.confusion.rows(); ++t) {
    for (Index p = 0; p < ev.confusion.cols(); ++p) {
      csv += "confusion," + model.class_names[static_cast<std::size_t>(t)] + "," +
             model.class_names[static_cast<std::size_t>(p)] + "," + std::to_string(ev.confusion(t, p)) + "\n";
    }
  }

  std::cout << text.str();
  if (!report.empty()) {
    const fs::path csv_path = fs::path(report).extension() == ".csv" ? fs::path(report) : csv_sibling(report);
    const fs::path text_path = fs::path(report).extension() == ".csv" ? csv_sibling(report) : fs::path(report);
    io::write_text(text.str(), text_path);
    io::write_text(csv, csv_path);
  }
  return 0;
}

// ---- gradcheck --------------------------------------------------------------

int run_gradcheck_cmd(const grad::GradcheckOptions& opts) {
  const grad::GradcheckReport report = grad::run_gradcheck(opts);
  std::cout << "case,dim,points,active,lambda,max_rel_error,passed\n";
  for (std::size_t k = 0; k < report.cases.size(); ++k) {
    const auto& c = report.cases[k];
    std::cout << k << "," << c.dim << "," << c.points << "," << c.active << "," << fmt(c.lambda, 6) << ","
              << fmt(c.max_rel_error, 3) << "," << (c.passed ? 1 : 0) << "\n";
  }
  std::cout << (report.all_passed ? "PASS" : "FAIL") << " " << report.cases.size() << " instances, worst "
            << fmt(report.worst_error, 3) << ", tol " << fmt(opts.tol, 3) << ", redrawn " << report.rejected << "\n";
  return report.all_passed ? 0 : 1;
}

// ---- synth ------------------------------------------------------------------

int run_synth(const std::string& spec_file, const std::vector<std::string>& settings, const std::string& out_dir,
              double train_fraction) {
  const config::CliConfig cfg = resolve_config(spec_file, settings);
  const pipeline::SyntheticDataset data = pipeline::make_synthetic(cfg.synthetic);
  const fs::path dir = out_dir;
  fs::create_directories(dir / "bags");
  std::vector<io::ManifestEntry> entries;
  for (std::size_t i = 0; i < data.bags.size(); ++i) {
    const fs::path rel = fs::path("bags") / (data.bags[i].sequence_id + ".svmp");
    io::write_bag(data.bags[i], dir / rel);
    entries.push_back({rel, data.labels[i], 0});
  }
  io::write_manifest(entries, dir / "manifest.txt");
  const auto [train, test] = pipeline::stratified_split(data.labels, train_fraction, cfg.synthetic.seed);
  std::vector<io::ManifestEntry> part;
  for (Index i : train) part.push_back(entries[static_cast<std::size_t>(i)]);
  io::write_manifest(part, dir / "train.txt");
  part.clear();
  for (Index i : test) part.push_back(entries[static_cast<std::size_t>(i)]);
  io::write_manifest(part, dir / "test.txt");
  std::cout << "wrote " << data.bags.size() << " sequences (" << train.size() << " train, " << test.size()
            << " test) to " << dir.string() << "\n";
  return 0;
}

// ---- bench ------------------------------------------------------------------

struct BenchArgs {
  std::string manifest;
  std::string neg;
  std::vector<std::string> algos{"tune", "alt", "ordered", "enum"};
  std::string config_file;
  std::vector<std::string> settings;
  std::optional<double> eta;
  int limit = 0;
  std::string csv;
};

int run_bench(const BenchArgs& a) {
  config::CliConfig cfg = resolve_config(a.config_file, a.settings);
  if (a.eta) cfg.pooling.eta = *a.eta;
  io::LoadedDataset data = io::load_manifest(a.manifest);
  if (a.limit > 0 && static_cast<std::size_t>(a.limit) < data.bags.size()) data.bags.resize(static_cast<std::size_t>(a.limit));
  const NegativeBag neg = io::read_negative(a.neg);

  std::ostringstream table;
  std::string csv = "algorithm,sequences,feasible,total_seconds,ms_per_sequence\n";
  table << std::left << std::setw(20) << "algorithm" << std::right << std::setw(10) << "sequences" << std::setw(10)
        << "feasible" << std::setw(14) << "ms/sequence" << "\n";
  for (const auto& name : a.algos) {
    const Algorithm algo = parse_algorithm(name);
    int done = 0;
    int feasible = 0;
    double seconds = 0.0;
    bool skipped = false;
    for (const auto& bag : data.bags) {
      if (algo == Algorithm::kEnumerate && bag.size() > cfg.pooling.enumeration_cap) {
        skipped = true;
        break;
      }
      const auto start = std::chrono::steady_clock::now();
      const mil::PoolResult r = pipeline::pool_bag(bag, neg, cfg.pooling, algo);
      seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      ++done;
      feasible += r.feasible;
    }
    table << std::left << std::setw(20) << to_string(algo) << std::right;
    if (skipped) {
      table << "  skipped: bags exceed enumeration_cap = " << cfg.pooling.enumeration_cap << "\n";
      continue;
    }
    const double ms = done > 0 ? 1e3 * seconds / done : 0.0;
    table << std::setw(10) << done << std::setw(10) << feasible << std::setw(14) << fmt(ms, 4) << "\n";
    csv += std::string(to_string(algo)) + "," + std::to_string(done) + "," + std::to_string(feasible) + "," +
           fmt(seconds, 6) + "," + fmt(ms, 6) + "\n";
  }
  std::cout << table.str();
  if (!a.csv.empty()) io::write_text(csv, a.csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"svmp: SVM pooling of feature sequences"};
  app.require_subcommand(1);

  GenNegativesArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-negatives", "Write a negative bag from noise or a corpus sample");
  gen_cmd->add_option("--from-manifest", gen.manifest, "Manifest whose bags set the noise mean and deviation");
  gen_cmd->add_option("--corpus", gen.corpus, "Sample rows from this feature file instead of noise");
  gen_cmd->add_option("--count", gen.count, "Rows to write (default max(30, longest bag), or 50 from a corpus)");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output feature file")->required();

  PoolArgs pool;
  auto* pool_cmd = app.add_subcommand("pool", "Compute SVMP descriptors for every bag in a manifest");
  pool_cmd->add_option("--manifest", pool.manifest, "Manifest of bags")->required();
  pool_cmd->add_option("--neg", pool.neg, "Negative bag file")->required();
  pool_cmd->add_option("--algo", pool.algo, "enum | alt | tune | ordered");
  pool_cmd->add_option("--eta", pool.eta, "Minimum fraction of frames classified positive");
  pool_cmd->add_option("--c1", pool.c1, "Regularization weight");
  pool_cmd->add_option("--c2", pool.c2, "Order penalty weight (ordered only)");
  pool_cmd->add_option("--kernel", pool.kernel, "none | chi2 | intersection explicit feature map");
  pool_cmd->add_option("--config", pool.config_file, "key = value configuration file");
  pool_cmd->add_option("--set", pool.settings, "Override a configuration key (key=value), repeatable");
  pool_cmd->add_option("--jobs", pool.jobs, "Bags pooled concurrently")->check(CLI::PositiveNumber);
  pool_cmd->add_option("--report", pool.report, "Feasibility CSV (default OUT.feasibility.csv)");
  pool_cmd->add_option("--out", pool.out, "Descriptor file")->required();

  std::string base_manifest;
  std::string base_method = "avg";
  std::string base_out;
  bool base_raw = false;
  auto* base_cmd = app.add_subcommand("baseline", "Average or max pooling descriptors");
  base_cmd->add_option("--manifest", base_manifest, "Manifest of bags")->required();
  base_cmd->add_option("--method", base_method, "avg | max");
  base_cmd->add_flag("--no-normalize", base_raw, "Keep descriptors unscaled");
  base_cmd->add_option("--out", base_out, "Descriptor file")->required();

  std::vector<std::string> comb_in;
  std::string comb_out;
  auto* comb_cmd = app.add_subcommand("combine", "Concatenate descriptor sets over the same sequences");
  comb_cmd->add_option("--desc", comb_in, "Descriptor file, repeatable")->required();
  comb_cmd->add_option("--out", comb_out, "Descriptor file")->required();

  std::string train_desc;
  double train_c = 1.0;
  int train_jobs = 1;
  std::string train_out;
  auto* train_cmd = app.add_subcommand("train", "Train one-vs-rest linear SVMs on descriptors");
  train_cmd->add_option("--desc", train_desc, "Descriptor file")->required();
  train_cmd->add_option("--c", train_c, "SVM cost");
  train_cmd->add_option("--jobs", train_jobs, "Classes trained concurrently")->check(CLI::PositiveNumber);
  train_cmd->add_option("--out", train_out, "Model file")->required();

  std::string eval_desc;
  std::string eval_model;
  std::string eval_report;
  auto* eval_cmd = app.add_subcommand("eval", "Accuracy and confusion of a model on descriptors");
  eval_cmd->add_option("--desc", eval_desc, "Descriptor file")->required();
  eval_cmd->add_option("--model", eval_model, "Model file")->required();
  eval_cmd->add_option("--report", eval_report, "Text report path; a CSV twin is written beside it");

  grad::GradcheckOptions gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Compare the pooling-layer Jacobian with finite differences");
  gc_cmd->add_option("--seed", gc.seed, "Random seed");
  gc_cmd->add_option("--instances", gc.instances, "Number of instances")->check(CLI::PositiveNumber);
  gc_cmd->add_option("--tol", gc.tol, "Maximum relative error");
  gc_cmd->add_option("--step", gc.h, "Finite-difference step");

  std::string synth_spec;
  std::vector<std::string> synth_settings;
  std::string synth_dir;
  double synth_train = 0.7;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset with manifests");
  synth_cmd->add_option("--spec-file", synth_spec, "key = value synthetic spec");
  synth_cmd->add_option("--set", synth_settings, "Override a spec key (key=value), repeatable");
  synth_cmd->add_option("--train-fraction", synth_train, "Stratified training fraction");
  synth_cmd->add_option("--out-dir", synth_dir, "Output directory")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Per-sequence pooling time for each algorithm");
  bench_cmd->add_option("--manifest", bench.manifest, "Manifest of bags")->required();
  bench_cmd->add_option("--neg", bench.neg, "Negative bag file")->required();
  bench_cmd->add_option("--algos", bench.algos, "Algorithms to time")->delimiter(',');
  bench_cmd->add_option("--eta", bench.eta, "Minimum fraction of frames classified positive");
  bench_cmd->add_option("--config", bench.config_file, "key = value configuration file");
  bench_cmd->add_option("--set", bench.settings, "Override a configuration key (key=value), repeatable");
  bench_cmd->add_option("--limit", bench.limit, "Time only the first N bags");
  bench_cmd->add_option("--csv", bench.csv, "Also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    std::cerr << failing->help();
    return 2;
  }

  try {
    if (*gen_cmd) return run_gen_negatives(gen);
    if (*pool_cmd) return run_pool(pool);
    if (*base_cmd) return run_baseline(base_manifest, base_method, base_raw, base_out);
    if (*comb_cmd) return run_combine(comb_in, comb_out);
    if (*train_cmd) return run_train(train_desc, train_c, train_jobs, train_out);
    if (*eval_cmd) return run_eval(eval_desc, eval_model, eval_report);
    if (*gc_cmd) return run_gradcheck_cmd(gc);
    if (*synth_cmd) return run_synth(synth_spec, synth_settings, synth_dir, synth_train);
    if (*bench_cmd) return run_bench(bench);
  } catch (const Error& e) {
    std::cerr << "svmp: error: " << to_string(e.kind()) << ": " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "svmp: error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 1;
}

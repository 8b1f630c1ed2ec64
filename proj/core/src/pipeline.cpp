#include "svmp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "svmp/ordered.hpp"
#include "svmp/svm.hpp"

namespace svmp::pipeline {
namespace {

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Work is claimed
// through a shared counter; each index writes only its own output slot.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_nonempty(const FeatureBag& bag, const char* what) {
  if (bag.size() < 1 || bag.dim() < 1) throw Error(ErrorKind::kEmptyInput, std::string(what) + ": empty bag");
}

void check_labels(std::size_t bags, const std::vector<int>& labels, const std::vector<std::string>& names) {
  if (labels.size() != bags) {
    throw Error(ErrorKind::kDimensionMismatch, "label count differs from bag count");
  }
  for (int l : labels) {
    if (l < 1 || l > static_cast<int>(names.size())) {
      std::ostringstream os;
      os << "class id " << l << " outside 1.." << names.size();
      throw Error(ErrorKind::kInvalidArgument, os.str());
    }
  }
}

Vector unit_stacked(const Vector& v, bool normalize) {
  if (!normalize) return v;
  const double norm = v.norm();
  return norm > 0.0 ? Vector(v / norm) : v;
}

}  // namespace

Vector avg_pool(const FeatureBag& bag) {
  check_nonempty(bag, "avg_pool");
  return bag.features.colwise().mean().transpose();
}

Vector max_pool(const FeatureBag& bag) {
  check_nonempty(bag, "max_pool");
  return bag.features.colwise().maxCoeff().transpose();
}

const char* to_string(Baseline method) { return method == Baseline::kAvg ? "avg" : "max"; }

Baseline parse_baseline(std::string_view name) {
  if (name == "avg") return Baseline::kAvg;
  if (name == "max") return Baseline::kMax;
  throw Error(ErrorKind::kInvalidArgument, "unknown baseline method '" + std::string(name) + "'");
}

void validate(const LabeledDescriptorSet& set) {
  if (static_cast<std::size_t>(set.size()) != set.labels.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "descriptor set: row count differs from label count");
  }
  if (!set.sequence_ids.empty() && set.sequence_ids.size() != set.labels.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "descriptor set: sequence id count differs from label count");
  }
  if (!set.descriptors.allFinite()) throw Error(ErrorKind::kNonFinite, "descriptor set: non-finite entry");
  for (int l : set.labels) {
    if (l < 1 || l > set.num_classes()) {
      std::ostringstream os;
      os << "descriptor set: class id " << l << " outside 1.." << set.num_classes();
      throw Error(ErrorKind::kInvalidArgument, os.str());
    }
  }
}

std::pair<std::vector<int>, std::vector<std::string>> remap_labels(const std::vector<long long>& raw) {
  std::map<long long, int> ids;
  for (long long l : raw) {
    if (l < 0) throw Error(ErrorKind::kInvalidArgument, "labels must be nonnegative");
    ids.emplace(l, 0);
  }
  std::vector<std::string> names;
  int next = 1;
  for (auto& [label, id] : ids) {
    id = next++;
    names.push_back(std::to_string(label));
  }
  std::vector<int> out;
  out.reserve(raw.size());
  for (long long l : raw) out.push_back(ids.at(l));
  return {out, names};
}

mil::PoolResult pool_bag(const FeatureBag& bag, const NegativeBag& neg, const PoolingConfig& config,
                         Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kEnumerate: return mil::pool_enumerate(bag, neg, config);
    case Algorithm::kAlternating: return mil::pool_alternating(bag, neg, config);
    case Algorithm::kParamTuning: return mil::pool_param_tuning(bag, neg, config);
    case Algorithm::kOrdered: return ordered::pool_ordered(bag, neg, config);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown algorithm");
}

PoolDatasetResult pool_dataset(const std::vector<FeatureBag>& bags, const std::vector<int>& labels,
                               const std::vector<std::string>& class_names, const NegativeBag& neg,
                               const PoolingConfig& config, const PoolOptions& options) {
  config.validate();
  check_labels(bags.size(), labels, class_names);
  if (bags.empty()) throw Error(ErrorKind::kEmptyInput, "pool_dataset: no bags");
  if (options.jobs < 1) throw Error(ErrorKind::kInvalidArgument, "jobs must be >= 1");
  const NegativeBag mapped_neg = options.kernel ? kermap::map_negative(neg, *options.kernel) : neg;
  validate(mapped_neg);

  std::vector<BagRecord> records(bags.size());
  std::vector<Vector> rows(bags.size());
  parallel_for(bags.size(), options.jobs, [&](std::size_t i) {
    BagRecord& rec = records[i];
    rec.sequence_id = bags[i].sequence_id;
    try {
      const FeatureBag bag = options.kernel ? kermap::map_bag(bags[i], *options.kernel) : bags[i];
      const mil::PoolResult r = pool_bag(bag, mapped_neg, config, options.algorithm);
      const SvmpDescriptor d = config.normalize_descriptor ? normalize_descriptor(r.descriptor) : r.descriptor;
      rows[i] = d.stacked();
      rec.ok = true;
      rec.feasible = r.feasible;
      rec.objective = r.objective;
      rec.iterations = r.descriptor.meta.iterations;
      rec.eta_achieved = r.descriptor.meta.eta_achieved;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });

  PoolDatasetResult out;
  out.records = std::move(records);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < bags.size(); ++i) {
    if (out.records[i].ok) kept.push_back(i);
  }
  if (kept.empty()) {
    throw Error(ErrorKind::kSolverFailure,
                "pool_dataset: all " + std::to_string(bags.size()) + " bags failed; first error: " +
                    out.records.front().error);
  }
  out.set.class_names = class_names;
  out.set.descriptors.resize(static_cast<Index>(kept.size()), rows[kept.front()].size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.set.descriptors.row(static_cast<Index>(k)) = rows[kept[k]].transpose();
    out.set.labels.push_back(labels[kept[k]]);
    out.set.sequence_ids.push_back(bags[kept[k]].sequence_id);
  }
  return out;
}

LabeledDescriptorSet baseline_dataset(const std::vector<FeatureBag>& bags, const std::vector<int>& labels,
                                      const std::vector<std::string>& class_names, Baseline method,
                                      bool normalize) {
  check_labels(bags.size(), labels, class_names);
  if (bags.empty()) throw Error(ErrorKind::kEmptyInput, "baseline_dataset: no bags");
  LabeledDescriptorSet out;
  out.class_names = class_names;
  out.labels = labels;
  const Index p = bags.front().dim();
  out.descriptors.resize(static_cast<Index>(bags.size()), p + 1);
  for (std::size_t i = 0; i < bags.size(); ++i) {
    if (bags[i].dim() != p) throw Error(ErrorKind::kDimensionMismatch, "baseline_dataset: bags differ in dimension");
    Vector v(p + 1);
    v.head(p) = method == Baseline::kAvg ? avg_pool(bags[i]) : max_pool(bags[i]);
    v(p) = 1.0;
    out.descriptors.row(static_cast<Index>(i)) = unit_stacked(v, normalize).transpose();
    out.sequence_ids.push_back(bags[i].sequence_id);
  }
  return out;
}

LabeledDescriptorSet concatenate(const LabeledDescriptorSet& a, const LabeledDescriptorSet& b) {
  if (a.labels != b.labels || a.size() != b.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "concatenate: descriptor sets cover different sequences");
  }
  LabeledDescriptorSet out = a;
  out.descriptors.resize(a.size(), a.dim() + b.dim());
  out.descriptors << a.descriptors, b.descriptors;
  return out;
}

LabeledDescriptorSet subset(const LabeledDescriptorSet& set, const std::vector<Index>& rows) {
  LabeledDescriptorSet out;
  out.class_names = set.class_names;
  out.descriptors.resize(static_cast<Index>(rows.size()), set.dim());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Index r = rows[k];
    if (r < 0 || r >= set.size()) throw Error(ErrorKind::kInvalidArgument, "subset: row index out of range");
    out.descriptors.row(static_cast<Index>(k)) = set.descriptors.row(r);
    out.labels.push_back(set.labels[static_cast<std::size_t>(r)]);
    if (!set.sequence_ids.empty()) out.sequence_ids.push_back(set.sequence_ids[static_cast<std::size_t>(r)]);
  }
  return out;
}

MulticlassModel train_classifier(const LabeledDescriptorSet& set, double c, int jobs) {
  validate(set);
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::kInvalidArgument, "classifier c must be positive");
  const int d = set.num_classes();
  if (d < 2) throw Error(ErrorKind::kInvalidArgument, "training needs at least 2 classes");
  std::vector<Index> counts(static_cast<std::size_t>(d), 0);
  for (int l : set.labels) ++counts[static_cast<std::size_t>(l - 1)];
  for (int k = 0; k < d; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      throw Error(ErrorKind::kEmptyInput, "class '" + set.class_names[static_cast<std::size_t>(k)] +
                                              "' has no training samples");
    }
  }

  MulticlassModel model;
  model.class_names = set.class_names;
  model.weights.resize(d, set.dim());
  model.biases.resize(d);
  parallel_for(static_cast<std::size_t>(d), jobs, [&](std::size_t k) {
    svm::SvmProblem prob;
    prob.points = set.descriptors;
    prob.labels.resize(set.size());
    for (Index i = 0; i < set.size(); ++i) {
      prob.labels(i) = set.labels[static_cast<std::size_t>(i)] == static_cast<int>(k) + 1 ? 1.0 : -1.0;
    }
    prob.c = c;
    const svm::SvmSolution sol = svm::solve(prob);
    model.weights.row(static_cast<Index>(k)) = sol.w.transpose();
    model.biases(static_cast<Index>(k)) = sol.b;
  });
  return model;
}

int predict(const MulticlassModel& model, const Eigen::Ref<const Vector>& descriptor) {
  if (descriptor.size() != model.dim()) {
    std::ostringstream os;
    os << "predict: descriptor has dimension " << descriptor.size() << " but the model expects " << model.dim();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  const Vector scores = model.weights * descriptor + model.biases;
  Index best = 0;
  for (Index k = 1; k < scores.size(); ++k) {
    if (scores(k) > scores(best)) best = k;
  }
  return static_cast<int>(best) + 1;
}

Evaluation evaluate(const MulticlassModel& model, const LabeledDescriptorSet& set) {
  validate(set);
  const int d = model.num_classes();
  if (set.num_classes() > d) throw Error(ErrorKind::kDimensionMismatch, "evaluate: set has more classes than the model");
  Evaluation ev;
  ev.confusion.setZero(d, d);
  for (Index i = 0; i < set.size(); ++i) {
    const int truth = set.labels[static_cast<std::size_t>(i)];
    const int guess = predict(model, set.descriptors.row(i).transpose());
    ++ev.confusion(truth - 1, guess - 1);
    ev.correct += (truth == guess);
  }
  ev.total = set.size();
  ev.accuracy = ev.total > 0 ? static_cast<double>(ev.correct) / static_cast<double>(ev.total) : 0.0;
  return ev;
}

void SyntheticSpec::validate() const {
  if (classes < 1 || sequences_per_class < 1 || n_frames < 1 || p < 1) {
    throw Error(ErrorKind::kInvalidArgument, "synthetic spec: counts must be positive");
  }
  if (!(signal_fraction > 0.0) || signal_fraction > 1.0) {
    throw Error(ErrorKind::kInvalidArgument, "synthetic spec: signal_fraction must be in (0, 1]");
  }
  if (!(noise_std > 0.0) || !(signal_strength > 3.0) || !(background_scale > 0.0) || !(background_tail >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "synthetic spec: noise_std and background_scale must be positive, signal_strength > 3, "
                "background_tail >= 0");
  }
}

SyntheticDataset make_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index p = spec.p;
  const Index n = spec.n_frames;
  const double sigma = spec.noise_std;
  const Index n_signal =
      std::clamp<Index>(static_cast<Index>(std::lround(spec.signal_fraction * static_cast<double>(n))), 1, n);

  SyntheticDataset out;
  out.directions.resize(spec.classes, p);
  for (int k = 0; k < spec.classes; ++k) {
    Vector u(p);
    do {
      for (Index j = 0; j < p; ++j) u(j) = normal(rng);
    } while (u.norm() == 0.0);
    out.directions.row(k) = (u / u.norm()).transpose();
  }
  for (int k = 1; k <= spec.classes; ++k) out.class_names.push_back(std::to_string(k));

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (int k = 0; k < spec.classes; ++k) {
    const Vector u = out.directions.row(k).transpose();
    for (int s = 0; s < spec.sequences_per_class; ++s) {
      FeatureBag bag;
      bag.sequence_id = "c" + std::to_string(k + 1) + "_s" + std::to_string(s);
      bag.features.resize(n, p);
      std::iota(order.begin(), order.end(), Index{0});
      for (Index q = 0; q < n_signal; ++q) {
        std::uniform_int_distribution<Index> pick(q, n - 1);
        std::swap(order[static_cast<std::size_t>(q)], order[static_cast<std::size_t>(pick(rng))]);
      }
      std::vector<bool> is_signal(static_cast<std::size_t>(n), false);
      for (Index q = 0; q < n_signal; ++q) is_signal[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])] = true;

      Vector x(p);
      for (Index t = 0; t < n; ++t) {
        if (is_signal[static_cast<std::size_t>(t)]) {
          do {
            for (Index j = 0; j < p; ++j) x(j) = spec.signal_strength * sigma * u(j) + sigma * normal(rng);
          } while (x.dot(u) < 3.0 * sigma);
        } else {
          const double scale = spec.background_scale * sigma * std::exp(spec.background_tail * normal(rng));
          for (Index j = 0; j < p; ++j) x(j) = scale * normal(rng);
        }
        bag.features.row(t) = x.transpose();
      }
      out.bags.push_back(std::move(bag));
      out.labels.push_back(k + 1);
    }
  }
  return out;
}

std::pair<std::vector<Index>, std::vector<Index>> stratified_split(const std::vector<int>& labels,
                                                                   double train_fraction,
                                                                   std::uint64_t seed) {
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "train fraction must be in (0, 1)");
  }
  std::map<int, std::vector<Index>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(static_cast<Index>(i));
  std::mt19937_64 rng(seed);
  std::vector<Index> train;
  std::vector<Index> test;
  for (auto& [label, members] : by_class) {
    for (std::size_t q = members.size(); q > 1; --q) {
      std::uniform_int_distribution<std::size_t> pick(0, q - 1);
      std::swap(members[q - 1], members[pick(rng)]);
    }
    const auto take = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(members.size())));
    train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    test.insert(test.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

}  // namespace svmp::pipeline

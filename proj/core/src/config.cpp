#include "svmp/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "svmp/io.hpp"

namespace svmp::config {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& where, const std::string& key, const std::string& value,
                            const char* expected) {
  throw Error(ErrorKind::kParse, where + "value '" + value + "' for '" + key + "' is not " + expected);
}

double to_double(const std::string& where, const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) bad_value(where, key, value, "a number");
  return v;
}

template <typename Int>
Int to_int(const std::string& where, const std::string& key, const std::string& value) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) bad_value(where, key, value, "an integer");
  return v;
}

bool to_bool(const std::string& where, const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(where, key, value, "a boolean");
}

using Setter = std::function<void(CliConfig&, const std::string&, const std::string&, const std::string&)>;

kermap::KernelMapConfig& kernel_of(CliConfig& c) {
  if (!c.kernel) c.kernel.emplace();
  return *c.kernel;
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = [] {
    std::vector<std::pair<std::string, Setter>> t;
    auto dbl = [&t](const char* name, auto member) {
      t.emplace_back(name, [member](CliConfig& c, const std::string& w, const std::string& k, const std::string& v) {
        c.pooling.*member = to_double(w, k, v);
      });
    };
    auto num = [&t](const char* name, auto member) {
      t.emplace_back(name, [member](CliConfig& c, const std::string& w, const std::string& k, const std::string& v) {
        c.pooling.*member = to_int<int>(w, k, v);
      });
    };
    dbl("eta", &PoolingConfig::eta);
    dbl("c1", &PoolingConfig::c1);
    dbl("c1_init", &PoolingConfig::c1_init);
    dbl("c1_multiplier", &PoolingConfig::c1_multiplier);
    dbl("c1_max", &PoolingConfig::c1_max);
    dbl("c2", &PoolingConfig::c2);
    dbl("delta", &PoolingConfig::delta);
    dbl("lambda_layer", &PoolingConfig::lambda_layer);
    dbl("solver_tol", &PoolingConfig::solver_tol);
    num("max_solver_epochs", &PoolingConfig::max_solver_epochs);
    num("max_outer_iters", &PoolingConfig::max_outer_iters);
    dbl("convergence_threshold", &PoolingConfig::convergence_threshold);
    num("enumeration_cap", &PoolingConfig::enumeration_cap);
    num("ordered_max_iters", &PoolingConfig::ordered_max_iters);
    t.emplace_back("pair_mode", [](CliConfig& c, const std::string& w, const std::string& k, const std::string& v) {
      if (v == "all") {
        c.pooling.pair_mode = PairMode::kAllPairs;
      } else if (v == "consecutive") {
        c.pooling.pair_mode = PairMode::kConsecutive;
      } else {
        bad_value(w, k, v, "'all' or 'consecutive'");
      }
    });
    t.emplace_back("ordered_solver", [](CliConfig& c, const std::string& w, const std::string& k, const std::string& v) {
      if (v == "dual") {
        c.pooling.ordered_solver = OrderedSolver::kDualCoordinate;
      } else if (v == "gd") {
        c.pooling.ordered_solver = OrderedSolver::kGradientDescent;
      } else {
        bad_value(w, k, v, "'dual' or 'gd'");
      }
    });
    t.emplace_back("normalize_descriptor",
                   [](CliConfig& c, const std::string& w, const std::string& k, const std::string& v) {
                     c.pooling.normalize_descriptor = to_bool(w, k, v);
                   });
    t.emplace_back("seed", [](CliConfig& c, const std::string& w, const std::string& k, const std::string& v) {
      c.pooling.seed = to_int<std::uint64_t>(w, k, v);
      c.synthetic.seed = c.pooling.seed;
    });
    t.emplace_back("algorithm", [](CliConfig& c, const std::string& w, const std::string&, const std::string& v) {
      try {
        c.algorithm = parse_algorithm(v);
      } catch (const Error& e) {
        throw Error(ErrorKind::kParse, w + e.what());
      }
    });
    t.emplace_back("kernel", [](CliConfig& c, const std::string& w, const std::string&, const std::string& v) {
      if (v == "none") {
        c.kernel.reset();
        return;
      }
      try {
        kernel_of(c).kernel = kermap::parse_kernel(v);
      } catch (const Error& e) {
        throw Error(ErrorKind::kParse, w + e.what());
      }
    });
    t.emplace_back("order", [](CliConfig& c, const std::string& w, const std::string& k, const std::string& v) {
      kernel_of(c).order = to_int<int>(w, k, v);
    });
    t.emplace_back("period", [](CliConfig& c, const std::string& w, const std::string& k, const std::string& v) {
      kernel_of(c).period = to_double(w, k, v);
    });
    auto syn_int = [&t](const char* name, int pipeline::SyntheticSpec::*member) {
      t.emplace_back(name, [member](CliConfig& c, const std::string& w, const std::string& k, const std::string& v) {
        c.synthetic.*member = to_int<int>(w, k, v);
      });
    };
    auto syn_dbl = [&t](const char* name, double pipeline::SyntheticSpec::*member) {
      t.emplace_back(name, [member](CliConfig& c, const std::string& w, const std::string& k, const std::string& v) {
        c.synthetic.*member = to_double(w, k, v);
      });
    };
    syn_int("classes", &pipeline::SyntheticSpec::classes);
    syn_int("sequences_per_class", &pipeline::SyntheticSpec::sequences_per_class);
    syn_int("n_frames", &pipeline::SyntheticSpec::n_frames);
    syn_int("p", &pipeline::SyntheticSpec::p);
    syn_dbl("signal_fraction", &pipeline::SyntheticSpec::signal_fraction);
    syn_dbl("noise_std", &pipeline::SyntheticSpec::noise_std);
    syn_dbl("signal_strength", &pipeline::SyntheticSpec::signal_strength);
    syn_dbl("background_scale", &pipeline::SyntheticSpec::background_scale);
    syn_dbl("background_tail", &pipeline::SyntheticSpec::background_tail);
    return t;
  }();
  return table;
}

}  // namespace

std::vector<KeyValue> parse_key_values(const std::string& text, const std::string& origin) {
  std::vector<KeyValue> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse, origin + ":" + std::to_string(line) + ": expected 'key = value', got '" + body + "'");
    }
    KeyValue kv{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line};
    if (kv.key.empty()) throw Error(ErrorKind::kParse, origin + ":" + std::to_string(line) + ": empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

void apply(CliConfig& config, const std::string& key, const std::string& value, const std::string& where) {
  for (const auto& [name, set] : setters()) {
    if (name == key) {
      set(config, where, key, value);
      return;
    }
  }
  throw Error(ErrorKind::kInvalidArgument, where + "unknown key '" + key + "'");
}

void apply_text(CliConfig& config, const std::string& text, const std::string& origin) {
  for (const auto& kv : parse_key_values(text, origin)) {
    apply(config, kv.key, kv.value, origin + ":" + std::to_string(kv.line) + ": ");
  }
}

CliConfig load(const std::filesystem::path& path) {
  CliConfig config;
  apply_text(config, io::read_text(path), path.string());
  return config;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& entry : setters()) k.push_back(entry.first);
    return k;
  }();
  return keys;
}

}  // namespace svmp::config

#include "svmp/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace svmp::io {
namespace {

void put_u32(std::vector<char>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFFu));
}

std::uint32_t get_u32(const std::vector<char>& in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + static_cast<std::size_t>(k)])) << (8 * k);
  }
  return v;
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  return std::vector<char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_bytes(const std::vector<char>& bytes, const fs::path& path) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::kIo, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot rename '" + tmp.string() + "': " + ec.message());
}

std::string located(const fs::path& path, int line, const std::string& msg) {
  return path.string() + ":" + std::to_string(line) + ": " + msg;
}

double parse_double(std::string_view field, const fs::path& path, int line, std::size_t column) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw Error(ErrorKind::kParse, located(path, line, "column " + std::to_string(column) + ": cannot parse '" +
                                                           std::string(field) + "' as a number"));
  }
  if (std::isnan(v)) {
    throw Error(ErrorKind::kNanEntry, located(path, line, "column " + std::to_string(column) + " is NaN"));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

bool is_csv(const fs::path& path) { return path.extension() == ".csv"; }

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

}  // namespace

std::vector<char> encode_matrix(const Matrix& m) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (static_cast<std::uint64_t>(m.rows()) > kMax || static_cast<std::uint64_t>(m.cols()) > kMax) {
    throw Error(ErrorKind::kInvalidArgument, "matrix too large for the feature file format");
  }
  std::vector<char> out;
  out.reserve(kHeaderBytes + 4 * static_cast<std::size_t>(m.size()));
  for (char ch : kMagic) out.push_back(ch);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(m(r, c))));
  }
  return out;
}

Matrix decode_matrix(const std::vector<char>& bytes, const std::string& origin) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::kBadMagic, origin + ": bad magic at byte offset 0 (expected \"SVMP\")");
  }
  if (bytes.size() < kHeaderBytes) {
    std::ostringstream os;
    os << origin << ": truncated header: expected " << kHeaderBytes << " bytes, got " << bytes.size();
    throw Error(ErrorKind::kTruncated, os.str());
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kVersion) {
    std::ostringstream os;
    os << origin << ": unsupported version " << version << " at byte offset 4 (expected " << kVersion << ")";
    throw Error(ErrorKind::kBadVersion, os.str());
  }
  const std::uint64_t rows = get_u32(bytes, 8);
  const std::uint64_t cols = get_u32(bytes, 12);
  const std::uint64_t expected = 4 * rows * cols;
  const std::uint64_t actual = bytes.size() - kHeaderBytes;
  if (actual != expected) {
    std::ostringstream os;
    os << origin << ": " << (actual < expected ? "truncated payload" : "payload size mismatch") << ": expected "
       << expected << " bytes, got " << actual << " (payload starts at byte offset " << kHeaderBytes << ")";
    throw Error(actual < expected ? ErrorKind::kTruncated : ErrorKind::kParse, os.str());
  }
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::size_t offset = kHeaderBytes;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c, offset += 4) {
      const float v = std::bit_cast<float>(get_u32(bytes, offset));
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << origin << ": " << (std::isnan(v) ? "NaN" : "infinite") << " entry at byte offset " << offset
           << " (row " << r << ", column " << c << ")";
        throw Error(ErrorKind::kNanEntry, os.str());
      }
      m(r, c) = static_cast<double>(v);
    }
  }
  return m;
}

Matrix read_matrix(const fs::path& path) { return decode_matrix(read_bytes(path), path.string()); }

void write_matrix(const Matrix& m, const fs::path& path) { write_bytes(encode_matrix(m), path); }

Matrix read_csv_matrix(const fs::path& path) {
  const std::vector<std::string> lines = lines_of(read_text(path));
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  for (const auto& line : lines) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t col = 0;
    for (std::string_view f : split(line, ',')) row.push_back(parse_double(f, path, line_no, col++));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::kParse, located(path, line_no, "expected " + std::to_string(rows.front().size()) +
                                                                 " columns, got " + std::to_string(row.size())));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::kEmptyInput, path.string() + ": no rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return m;
}

void write_csv_matrix(const Matrix& m, const fs::path& path) {
  std::string text;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) text += ',';
      text += format_double(m(r, c));
    }
    text += '\n';
  }
  write_text(text, path);
}

FeatureBag read_bag(const fs::path& path) {
  FeatureBag bag{is_csv(path) ? read_csv_matrix(path) : read_matrix(path), path.stem().string()};
  return bag;
}

void write_bag(const FeatureBag& bag, const fs::path& path) {
  if (is_csv(path)) {
    write_csv_matrix(bag.features, path);
  } else {
    write_matrix(bag.features, path);
  }
}

NegativeBag read_negative(const fs::path& path) {
  NegativeBag neg;
  neg.features = is_csv(path) ? read_csv_matrix(path) : read_matrix(path);
  return neg;
}

void write_negative(const NegativeBag& neg, const fs::path& path) {
  if (is_csv(path)) {
    write_csv_matrix(neg.features, path);
  } else {
    write_matrix(neg.features, path);
  }
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  const std::vector<std::string> lines = lines_of(read_text(path));
  const fs::path base = path.parent_path();
  std::vector<ManifestEntry> out;
  int line_no = 0;
  for (const auto& line : lines) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0) {
      throw Error(ErrorKind::kParse, located(path, line_no, "expected 'path,label'"));
    }
    ManifestEntry e;
    e.line = line_no;
    const std::string label = line.substr(comma + 1);
    const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), e.label);
    if (ec != std::errc() || ptr != label.data() + label.size() || e.label < 0) {
      throw Error(ErrorKind::kParse, located(path, line_no, "label '" + label + "' is not a nonnegative integer"));
    }
    const fs::path entry = line.substr(0, comma);
    e.path = entry.is_absolute() ? entry : base / entry;
    if (!fs::is_regular_file(e.path)) {
      throw Error(ErrorKind::kIo, located(path, line_no, "cannot resolve '" + entry.string() + "'"));
    }
    out.push_back(std::move(e));
  }
  if (out.empty()) throw Error(ErrorKind::kEmptyInput, path.string() + ": manifest lists no bags");
  return out;
}

void write_manifest(const std::vector<ManifestEntry>& entries, const fs::path& path) {
  std::string text;
  for (const auto& e : entries) text += e.path.generic_string() + "," + std::to_string(e.label) + "\n";
  write_text(text, path);
}

LoadedDataset load_manifest(const fs::path& path) {
  const std::vector<ManifestEntry> entries = read_manifest(path);
  LoadedDataset out;
  std::vector<long long> raw;
  for (const auto& e : entries) {
    try {
      out.bags.push_back(read_bag(e.path));
    } catch (const Error& err) {
      throw Error(err.kind(), located(path, e.line, err.what()));
    }
    raw.push_back(e.label);
  }
  std::tie(out.labels, out.class_names) = pipeline::remap_labels(raw);
  return out;
}

fs::path labels_path(const fs::path& descriptor_path) {
  fs::path p = descriptor_path;
  p += ".labels.csv";
  return p;
}

void write_descriptors(const pipeline::LabeledDescriptorSet& set, const fs::path& path) {
  pipeline::validate(set);
  std::string text = "#classes";
  for (const auto& name : set.class_names) {
    if (name.find_first_of(",\n") != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "class name '" + name + "' contains a comma or newline");
    }
    text += "," + name;
  }
  text += "\n";
  for (std::size_t i = 0; i < set.labels.size(); ++i) {
    const std::string id = set.sequence_ids.empty() ? std::to_string(i) : set.sequence_ids[i];
    const int label = set.labels[i];
    text += id + "," + std::to_string(label) + "," + set.class_names[static_cast<std::size_t>(label - 1)] + "\n";
  }
  write_matrix(set.descriptors, path);
  write_text(text, labels_path(path));
}

pipeline::LabeledDescriptorSet read_descriptors(const fs::path& path) {
  pipeline::LabeledDescriptorSet set;
  set.descriptors = read_matrix(path);
  const fs::path side = labels_path(path);
  const std::vector<std::string> lines = lines_of(read_text(side));
  if (lines.empty() || lines.front().rfind("#classes", 0) != 0) {
    throw Error(ErrorKind::kParse, located(side, 1, "expected '#classes,...' header"));
  }
  const auto header = split(lines.front(), ',');
  for (std::size_t k = 1; k < header.size(); ++k) set.class_names.emplace_back(header[k]);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    const int line_no = static_cast<int>(n) + 1;
    if (line.empty()) continue;
    const std::size_t c2 = line.rfind(',');
    const std::size_t c1 = c2 == std::string::npos || c2 == 0 ? std::string::npos : line.rfind(',', c2 - 1);
    if (c1 == std::string::npos) {
      throw Error(ErrorKind::kParse, located(side, line_no, "expected 'sequence_id,class_id,class_name'"));
    }
    int label = 0;
    const auto [ptr, ec] = std::from_chars(line.data() + c1 + 1, line.data() + c2, label);
    if (ec != std::errc() || ptr != line.data() + c2) {
      throw Error(ErrorKind::kParse, located(side, line_no, "bad class id"));
    }
    set.sequence_ids.push_back(line.substr(0, c1));
    set.labels.push_back(label);
  }
  if (static_cast<Index>(set.labels.size()) != set.descriptors.rows()) {
    std::ostringstream os;
    os << side.string() << ": " << set.labels.size() << " labels for " << set.descriptors.rows() << " descriptors";
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  pipeline::validate(set);
  return set;
}

void write_model(const pipeline::MulticlassModel& model, const fs::path& path) {
  std::ostringstream os;
  os << std::hexfloat;
  os << "svmp-model 1\n" << "classes " << model.num_classes() << "\n" << "dim " << model.dim() << "\n";
  for (int k = 0; k < model.num_classes(); ++k) {
    const std::string& name = model.class_names.at(static_cast<std::size_t>(k));
    if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "class name '" + name + "' is empty or contains whitespace");
    }
    os << "class " << name << " " << model.biases(k);
    for (Index j = 0; j < model.dim(); ++j) os << " " << model.weights(k, j);
    os << "\n";
  }
  write_text(os.str(), path);
}

pipeline::MulticlassModel read_model(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string tag;
  int version = 0;
  int classes = 0;
  Index dim = 0;
  std::string tag_c;
  std::string tag_d;
  if (!(in >> tag >> version) || tag != "svmp-model" || version != 1) {
    throw Error(ErrorKind::kBadMagic, path.string() + ": not an svmp model file (version 1)");
  }
  if (!(in >> tag_c >> classes >> tag_d >> dim) || tag_c != "classes" || tag_d != "dim" || classes < 1 || dim < 1) {
    throw Error(ErrorKind::kParse, path.string() + ": malformed model header");
  }
  pipeline::MulticlassModel model;
  model.weights.resize(classes, dim);
  model.biases.resize(classes);
  // strtod, not operator>>, because libstdc++ streams do not parse hexfloat.
  auto next_number = [&](const char* what) {
    std::string token;
    if (!(in >> token)) throw Error(ErrorKind::kTruncated, path.string() + ": model file ends early reading " + what);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::kParse, path.string() + ": bad number '" + token + "' in " + what);
    }
    return v;
  };
  for (int k = 0; k < classes; ++k) {
    std::string name;
    if (!(in >> tag >> name) || tag != "class") {
      throw Error(ErrorKind::kParse, path.string() + ": expected class line " + std::to_string(k + 1));
    }
    model.class_names.push_back(name);
    model.biases(k) = next_number("bias");
    for (Index j = 0; j < dim; ++j) model.weights(k, j) = next_number("weights");
  }
  return model;
}

std::string read_text(const fs::path& path) {
  const std::vector<char> bytes = read_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text(const std::string& text, const fs::path& path) {
  write_bytes(std::vector<char>(text.begin(), text.end()), path);
}

}  // namespace svmp::io

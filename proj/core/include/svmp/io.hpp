#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "svmp/core.hpp"
#include "svmp/pipeline.hpp"

namespace svmp::io {

namespace fs = std::filesystem;

/// Binary feature file: "SVMP", u32 version, u32 rows, u32 cols, then
/// rows * cols float32 values, row-major, everything little-endian.
inline constexpr char kMagic[4] = {'S', 'V', 'M', 'P'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 16;

/// Entries are stored as float32; writing a matrix that is not exactly
/// representable rounds to nearest.
std::vector<char> encode_matrix(const Matrix& m);
Matrix decode_matrix(const std::vector<char>& bytes, const std::string& origin = "<memory>");

Matrix read_matrix(const fs::path& path);
void write_matrix(const Matrix& m, const fs::path& path);

/// One row per line, comma separated decimals.
Matrix read_csv_matrix(const fs::path& path);
void write_csv_matrix(const Matrix& m, const fs::path& path);

/// Dispatches on extension: ".csv" is text, anything else binary. The
/// sequence id is the file stem.
FeatureBag read_bag(const fs::path& path);
void write_bag(const FeatureBag& bag, const fs::path& path);

NegativeBag read_negative(const fs::path& path);
void write_negative(const NegativeBag& neg, const fs::path& path);

struct ManifestEntry {
  fs::path path;  // resolved against the manifest's directory
  long long label = 0;
  int line = 0;
};

/// "path,label" per line, no header; blank lines are skipped. The last comma
/// separates the label, so paths may contain commas.
std::vector<ManifestEntry> read_manifest(const fs::path& path);
void write_manifest(const std::vector<ManifestEntry>& entries, const fs::path& path);

struct LoadedDataset {
  std::vector<FeatureBag> bags;
  std::vector<int> labels;
  std::vector<std::string> class_names;
};

/// Reads every bag listed in a manifest and remaps labels to 1..d.
LoadedDataset load_manifest(const fs::path& path);

/// Descriptors go to `path` in the binary format; labels go to the sidecar
/// labels_path(path) as "sequence_id,class_id,class_name" lines.
fs::path labels_path(const fs::path& descriptor_path);
void write_descriptors(const pipeline::LabeledDescriptorSet& set, const fs::path& path);
pipeline::LabeledDescriptorSet read_descriptors(const fs::path& path);

/// Text model file with hexadecimal floats so that weights round-trip exactly.
void write_model(const pipeline::MulticlassModel& model, const fs::path& path);
pipeline::MulticlassModel read_model(const fs::path& path);

std::string read_text(const fs::path& path);
// Writes via a temporary file in the same directory, then renames.
void write_text(const std::string& text, const fs::path& path);

}  // namespace svmp::io

#pragma once

#include "topo/dataset.hpp"
#include "topo/scoring.hpp"

#include <filesystem>
#include <string>

namespace topo {

// Cloud files: "TPC1", u16 version (1), u32 rows, u32 cols, then rows*cols
// float32 values, row-major, all little-endian. Coordinates are rounded to
// float32 on write.
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_cloud(const std::filesystem::path& path);

// Numeric table, one row per line, separated by commas (or whitespace).
// Blank lines and lines starting with '#' are skipped; a first line that
// does not parse as numbers is taken as a header.
PointCloud import_csv(const std::filesystem::path& path);

// Manifest JSON (schema "topo-disentangle/1") next to its cloud files;
// cloud paths are stored relative to the manifest's directory.
void write_dataset(const ConditionedDataset& dataset, const std::filesystem::path& manifest);
ConditionedDataset read_dataset(const std::filesystem::path& manifest);

// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

// Canonical JSON (sorted keys, shortest round-trip numbers), so equal
// reports serialize to equal bytes.
std::string report_json(const ScoreReport& report, const ScoreConfig& config);

std::string matrix_csv(const Matrix& m);

// Binary PGM (P5, maxval 255) with one cell x cell block per entry of a
// [0, 1] similarity matrix; darker is more similar.
std::string heatmap_pgm(const Matrix& similarities, std::size_t cell = 16);

}  // namespace topo

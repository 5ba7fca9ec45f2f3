#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ghostproj/basis.hpp"
#include "ghostproj/correlate.hpp"
#include "ghostproj/image.hpp"
#include "ghostproj/schemes.hpp"

namespace ghostproj {

/// Full-precision CSV carries the quantitative contract; PGM is a scaled
/// 8-bit view for quick inspection.

void write_image_csv(const std::filesystem::path& path, const Image& image);
Image read_image_csv(const std::filesystem::path& path);

/// One "index,value" row per element under a header line.
void write_sequence_csv(const std::filesystem::path& path, const std::string& value_name,
                        const std::vector<double>& values);
std::vector<double> read_sequence_csv(const std::filesystem::path& path);

void write_plan_csv(const std::filesystem::path& path, const ExposurePlan& plan);
ExposurePlan read_plan_csv(const std::filesystem::path& path);

struct PgmScale {
    double lo = 0.0;
    double hi = 1.0;
};

/// 8-bit PGM, min-max scaled; the scaling is returned so the manifest can
/// record it.
PgmScale write_image_pgm(const std::filesystem::path& path, const Image& image);

/// Flat key=value lines; '#' starts a comment. Order-preserving.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const KeyValues& values);
const std::string* find_value(const KeyValues& values, const std::string& key);

/// key=value summary plus a plain index list file (one k per line).
void write_selection(const std::filesystem::path& summary_path,
                     const std::filesystem::path& index_path, const FilterSelection& sel);

/// Mask stack export: mask_NNNNNN.csv or .pgm per mask plus a basis.meta
/// sidecar with the spec fields. `count` caps how many masks are written.
void export_basis(const std::filesystem::path& dir, const RandomBasis& basis,
                  std::uint64_t count, bool as_pgm = false);
BasisSpec read_basis_meta(const std::filesystem::path& meta_path);
std::vector<Image> import_masks_csv(const std::filesystem::path& dir);

} // namespace ghostproj

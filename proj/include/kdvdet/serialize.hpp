#pragma once
// JSON persistence for scattering data (format version 1), CSV writers for
// coefficient and field sweeps, and the content-addressed cache key.

#include <string>
#include <vector>

#include "kdvdet/potential.hpp"
#include "kdvdet/scattering.hpp"

namespace kdv {

std::string scattering_to_json(const ScatteringData& d);
ScatteringData scattering_from_json(const std::string& text);

void save_scattering(const std::string& path, const ScatteringData& d);
ScatteringData load_scattering(const std::string& path);

// FNV-1a over the canonical potential description and the k-grid parameters,
// as a fixed-width hex string.
std::string scatter_cache_key(const Potential& q, const KGridParams& grid);

// CSV layout: '#' metadata lines, a header row, then %.17g data rows.
void write_coefficients_csv(const std::string& path, const ScatteringData& d);
void write_field_csv(const std::string& path, const std::vector<double>& xs,
                     const std::vector<std::vector<double>>& columns,
                     const std::vector<std::string>& names,
                     const std::vector<std::string>& meta);

}  // namespace kdv

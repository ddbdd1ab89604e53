#include "kdvdet/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kdv {

namespace {

using nlohmann::json;

json complex_arrays(const std::vector<Complex>& v) {
  json re = json::array(), im = json::array();
  for (const Complex& z : v) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

std::vector<Complex> complex_from(const json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != im.size()) throw NumericalError("scattering json: re/im length mismatch");
  std::vector<Complex> v(re.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = Complex(re[i].get<double>(), im[i].get<double>());
  return v;
}

json data_to_json(const ScatteringData& d) {
  json j;
  j["source"] = d.source;
  j["applied_shift"] = d.applied_shift;
  j["kgrid"] = {{"k_min", d.kgrid.k_min}, {"k_max", d.kgrid.k_max}, {"n_half", d.kgrid.n_half}};
  json states = json::array();
  for (const BoundState& b : d.states) states.push_back({{"kappa", b.kappa}, {"c", b.c}});
  j["states"] = std::move(states);
  j["grid"] = {{"k", d.grid.k},
               {"R", complex_arrays(d.grid.R)},
               {"T", complex_arrays(d.grid.T)},
               {"L", complex_arrays(d.grid.L)},
               {"unitarity_defect", d.grid.unitarity_defect}};
  if (d.mirror) j["mirror"] = data_to_json(*d.mirror);
  return j;
}

ScatteringData data_from_json(const json& j) {
  ScatteringData d;
  d.source = j.at("source").get<std::string>();
  d.applied_shift = j.at("applied_shift").get<double>();
  d.kgrid.k_min = j.at("kgrid").at("k_min").get<double>();
  d.kgrid.k_max = j.at("kgrid").at("k_max").get<double>();
  d.kgrid.n_half = j.at("kgrid").at("n_half").get<int>();
  for (const auto& s : j.at("states"))
    d.states.push_back({s.at("kappa").get<double>(), s.at("c").get<double>()});
  const auto& g = j.at("grid");
  d.grid.k = g.at("k").get<std::vector<double>>();
  d.grid.R = complex_from(g.at("R"));
  d.grid.T = complex_from(g.at("T"));
  d.grid.L = complex_from(g.at("L"));
  d.grid.unitarity_defect = g.at("unitarity_defect").get<double>();
  if (d.grid.R.size() != d.grid.k.size() || d.grid.T.size() != d.grid.k.size() ||
      d.grid.L.size() != d.grid.k.size())
    throw NumericalError("scattering json: column length mismatch");
  if (j.contains("mirror"))
    d.mirror = std::make_shared<const ScatteringData>(data_from_json(j.at("mirror")));
  return d;
}

}  // namespace

std::string scattering_to_json(const ScatteringData& d) {
  json j = data_to_json(d);
  j["version"] = 2;
  return j.dump(1);
}

ScatteringData scattering_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("version").get<int>() != 2)
    throw NumericalError("scattering json: unsupported version");
  return data_from_json(j);
}

void save_scattering(const std::string& path, const ScatteringData& d) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw NumericalError("save_scattering: cannot open " + path);
  f << scattering_to_json(d) << "\n";
  if (!f.good()) throw NumericalError("save_scattering: write failed for " + path);
}

ScatteringData load_scattering(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw NumericalError("load_scattering: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return scattering_from_json(ss.str());
}

std::string scatter_cache_key(const Potential& q, const KGridParams& grid) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "|k=[%.17g,%.17g]x%d", grid.k_min, grid.k_max, grid.n_half);
  std::uint64_t h = fnv1a64(q.canonical() + buf);
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, h);
  return hex;
}

void write_coefficients_csv(const std::string& path, const ScatteringData& d) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw NumericalError("write_coefficients_csv: cannot open " + path);
  std::fprintf(f, "# source=%s\n", d.source.c_str());
  std::fprintf(f, "# applied_shift=%.17g\n", d.applied_shift);
  std::fprintf(f, "# unitarity_defect=%.17g\n", d.grid.unitarity_defect);
  for (const BoundState& b : d.states)
    std::fprintf(f, "# bound_state kappa=%.17g c=%.17g\n", b.kappa, b.c);
  std::fprintf(f, "k,Re_R,Im_R,Re_T,Im_T,Re_L,Im_L\n");
  for (std::size_t i = 0; i < d.grid.k.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", d.grid.k[i],
                 d.grid.R[i].real(), d.grid.R[i].imag(), d.grid.T[i].real(), d.grid.T[i].imag(),
                 d.grid.L[i].real(), d.grid.L[i].imag());
  if (std::fclose(f) != 0) throw NumericalError("write_coefficients_csv: close failed");
}

void write_field_csv(const std::string& path, const std::vector<double>& xs,
                     const std::vector<std::vector<double>>& columns,
                     const std::vector<std::string>& names,
                     const std::vector<std::string>& meta) {
  if (columns.size() != names.size())
    throw NumericalError("write_field_csv: column/name count mismatch");
  for (const auto& c : columns)
    if (c.size() != xs.size()) throw NumericalError("write_field_csv: column length mismatch");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw NumericalError("write_field_csv: cannot open " + path);
  for (const std::string& m : meta) std::fprintf(f, "# %s\n", m.c_str());
  std::fprintf(f, "x");
  for (const std::string& n : names) std::fprintf(f, ",%s", n.c_str());
  std::fprintf(f, "\n");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::fprintf(f, "%.17g", xs[i]);
    for (const auto& c : columns) std::fprintf(f, ",%.17g", c[i]);
    std::fprintf(f, "\n");
  }
  if (std::fclose(f) != 0) throw NumericalError("write_field_csv: close failed");
}

}  // namespace kdv

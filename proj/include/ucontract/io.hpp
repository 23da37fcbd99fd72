#pragma once

// Interchange formats: versioned JSON for measures, plans and traces; CSV
// for traces; a little-endian binary container for complex matrices with a
// JSON sidecar recording seed lineage.

#include <json.hpp>

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ucontract/circle_measure.hpp"
#include "ucontract/error.hpp"
#include "ucontract/homotopy.hpp"
#include "ucontract/matrix_model.hpp"
#include "ucontract/transport.hpp"

namespace ucontract {

using Json = nlohmann::json;

inline constexpr int kMeasureFormatVersion = 1;
inline constexpr int kMatrixFormatVersion = 1;

/// Shortest round-trip decimal form; identical bytes for identical doubles.
inline std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw NumericalError("failed to format double");
  return std::string(buf.data(), end);
}

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- CircleMeasure ----------------------------------------------------------

inline Json to_json(const CircleMeasure& mu) {
  Json atoms = Json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"angle", a.angle}, {"weight", a.weight}});
  return {{"version", kMeasureFormatVersion}, {"atoms", atoms}};
}

inline CircleMeasure measure_from_json(const Json& j) {
  if (!j.contains("version") || j.at("version").get<int>() != kMeasureFormatVersion) {
    throw InvalidArgument("unsupported circle measure format version");
  }
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms")) atoms.push_back({a.at("angle").get<double>(), a.at("weight").get<double>()});
  return CircleMeasure(std::move(atoms));
}

// ---- TransportPlan ----------------------------------------------------------

inline Json to_json(const TransportPlan& plan) {
  Json pairs = Json::array();
  for (const auto& p : plan.pairs) pairs.push_back(Json::array({p.source, p.target, p.mass}));
  return {{"pairs", pairs}, {"cost", plan.cost}};
}

inline TransportPlan plan_from_json(const Json& j) {
  TransportPlan plan;
  for (const auto& p : j.at("pairs")) {
    plan.pairs.push_back({p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>(), p.at(2).get<double>()});
  }
  plan.cost = j.at("cost").get<double>();
  return plan;
}

// ---- HomotopyTrace ----------------------------------------------------------

inline std::string trace_csv(const HomotopyTrace& trace) {
  std::string out = "t,dist_to_haar,norm_to_identity,schedule_s\n";
  for (const auto& s : trace.samples) {
    out += format_double(s.t) + "," + format_double(s.dist_to_haar) + "," + format_double(s.norm_to_identity) + "," +
           format_double(s.schedule_s) + "\n";
  }
  return out;
}

inline Json to_json(const HomotopyTrace& trace) {
  Json samples = Json::array();
  for (const auto& s : trace.samples) {
    samples.push_back({{"t", s.t},
                       {"dist_to_haar", s.dist_to_haar},
                       {"norm_to_identity", s.norm_to_identity},
                       {"schedule_s", s.schedule_s}});
  }
  return {{"metadata", {{"N", trace.n}, {"seed", trace.seed}, {"grid", trace.grid}, {"label", trace.label}}},
          {"samples", samples}};
}

inline HomotopyTrace trace_from_json(const Json& j) {
  HomotopyTrace trace;
  const auto& meta = j.at("metadata");
  trace.n = meta.at("N").get<std::size_t>();
  trace.seed = meta.at("seed").get<std::uint64_t>();
  trace.grid = meta.at("grid").get<std::size_t>();
  trace.label = meta.at("label").get<std::string>();
  for (const auto& s : j.at("samples")) {
    trace.samples.push_back({s.at("t").get<double>(), s.at("dist_to_haar").get<double>(),
                             s.at("norm_to_identity").get<double>(), s.at("schedule_s").get<double>()});
  }
  return trace;
}

// ---- Files ------------------------------------------------------------------

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---- Matrix container -------------------------------------------------------
//
// Layout: "UCMX" magic, u32 version, u64 rows, u64 cols, then rows*cols
// complex entries in row-major order as (re, im) pairs of little-endian
// IEEE-754 doubles.

namespace detail {

template <class T>
void put_le(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little, "container writer assumes a little-endian host");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("matrix container is truncated");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace detail

inline void write_matrix(const std::filesystem::path& path, const Matrix& m, const Json& lineage) {
  std::string bytes = "UCMX";
  detail::put_le<std::uint32_t>(bytes, kMatrixFormatVersion);
  detail::put_le<std::uint64_t>(bytes, static_cast<std::uint64_t>(m.rows()));
  detail::put_le<std::uint64_t>(bytes, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      detail::put_le<double>(bytes, m(i, j).real());
      detail::put_le<double>(bytes, m(i, j).imag());
    }
  }
  write_text(path, bytes);
  Json sidecar = {{"format", "UCMX"},
                  {"version", kMatrixFormatVersion},
                  {"rows", m.rows()},
                  {"cols", m.cols()},
                  {"lineage", lineage}};
  write_text(std::filesystem::path(path.string() + ".json"), sidecar.dump(2) + "\n");
}

inline Matrix read_matrix(const std::filesystem::path& path) {
  const std::string bytes = read_text(path);
  if (bytes.size() < 4 || bytes.compare(0, 4, "UCMX") != 0) throw IoError("not a UCMX matrix container");
  std::size_t pos = 4;
  const auto version = detail::get_le<std::uint32_t>(bytes, pos);
  if (version != kMatrixFormatVersion) throw IoError("unsupported UCMX version " + std::to_string(version));
  const auto rows = detail::get_le<std::uint64_t>(bytes, pos);
  const auto cols = detail::get_le<std::uint64_t>(bytes, pos);
  if (rows * cols * 16 != bytes.size() - pos) throw IoError("matrix container size does not match its header");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = detail::get_le<double>(bytes, pos);
      const double im = detail::get_le<double>(bytes, pos);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

inline Json read_matrix_lineage(const std::filesystem::path& path) {
  return Json::parse(read_text(std::filesystem::path(path.string() + ".json"))).at("lineage");
}

}  // namespace ucontract

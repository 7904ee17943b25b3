#include "jcs/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace jcs::io {

namespace {

using json = nlohmann::ordered_json;

json header(const char* format) {
  json j;
  j["format"] = format;
  j["version"] = kVersion;
  return j;
}

void expect_format(const json& j, const char* format) {
  if (!j.is_object()) throw FormatError("expected a JSON object");
  if (j.value("format", "") != format)
    throw FormatError(std::string("expected format '") + format + "', found '" +
                      j.value("format", "") + "'");
  if (j.value("version", "") != kVersion)
    throw FormatError(std::string("unsupported version '") + j.value("version", "") + "' (expected " +
                      kVersion + ")");
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Shape is explicit because 0 x n and n x 0 matrices serialize alike.
Mat matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw FormatError(what + ": expected " + std::to_string(rows) + " rows");
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw FormatError(what + ": expected " + std::to_string(cols) + " columns in row " + std::to_string(r));
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& e = row[c];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw FormatError(what + ": entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

json real_part(const Mat& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(imag ? m(r, c).imag() : m(r, c).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat from_parts(const json& re, const json& im, int rows, int cols, const std::string& what) {
  auto part = [&](const json& j) {
    Eigen::MatrixXd out(rows, cols);
    if (!j.is_array() || static_cast<int>(j.size()) != rows) throw FormatError(what + ": bad row count");
    for (int r = 0; r < rows; ++r) {
      if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) throw FormatError(what + ": bad column count");
      for (int c = 0; c < cols; ++c) out(r, c) = j[r][c].get<double>();
    }
    return out;
  };
  Mat m(rows, cols);
  m.real() = part(re);
  m.imag() = part(im);
  return m;
}

MultiIndex index_from_json(const json& j, int n, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw FormatError(what + ": multi-index must have length " + std::to_string(n));
  MultiIndex t;
  for (const auto& v : j) t.push_back(v.get<int>());
  return t;
}

json series_entries(const TruncatedOperatorSeries& s) {
  json out = json::array();
  for (const auto& [t, c] : s.coefficients()) out.push_back({t, real_part(c, false), real_part(c, true)});
  return out;
}

void fill_series(TruncatedOperatorSeries& s, const json& entries, const std::string& what) {
  if (!entries.is_array()) throw FormatError(what + ": coefficients must be an array");
  for (const auto& e : entries) {
    if (!e.is_array() || e.size() != 3) throw FormatError(what + ": entries are [multi-index, re, im]");
    s.set(index_from_json(e[0], s.n(), what), from_parts(e[1], e[2], s.rows(), s.cols(), what));
  }
}

json symmetry_to_json(const CanonicalSymmetry& j) { return matrix_to_json(j.matrix()); }

json system_to_json(const SystemBundle& b) {
  const auto& s = b.system;
  json j = header("jcs-system");
  j["N"] = s.n();
  j["dims"] = {{"x", s.dx()}, {"u", s.du()}, {"y", s.dy()}};
  for (const auto& [key, mats] : {std::pair<const char*, const std::vector<Mat>*>{"A", &s.a()},
                                  {"B", &s.b()},
                                  {"C", &s.c()},
                                  {"D", &s.d()}}) {
    json arr = json::array();
    for (const auto& m : *mats) arr.push_back(matrix_to_json(m));
    j[key] = std::move(arr);
  }
  if (b.j) j["J"] = symmetry_to_json(*b.j);
  json meta = json::object();
  if (!s.name.empty()) meta["name"] = s.name;
  if (b.seed) meta["seed"] = *b.seed;
  j["metadata"] = std::move(meta);
  return j;
}

SystemBundle system_from_json(const json& j) {
  expect_format(j, "jcs-system");
  SystemBundle b;
  const int n = j.at("N").get<int>();
  const auto& dims = j.at("dims");
  const int dx = dims.at("x").get<int>(), du = dims.at("u").get<int>(), dy = dims.at("y").get<int>();
  if (n < 1 || dx < 0 || du < 0 || dy < 0) throw FormatError("system: invalid N or dimensions");
  auto tuple = [&](const char* key, int rows, int cols) {
    const auto& arr = j.at(key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
      throw FormatError(std::string("system: '") + key + "' must hold N matrices");
    std::vector<Mat> out;
    for (int k = 0; k < n; ++k)
      out.push_back(matrix_from_json(arr[k], rows, cols, std::string("system ") + key + "[" + std::to_string(k) + "]"));
    return out;
  };
  b.system = MultiparametricSystem(tuple("A", dx, dx), tuple("B", dx, du), tuple("C", dy, dx), tuple("D", dy, du));
  if (j.contains("J") && !j["J"].is_null()) b.j = CanonicalSymmetry(matrix_from_json(j["J"], dx, dx, "system J"));
  if (j.contains("metadata")) {
    const auto& meta = j["metadata"];
    if (meta.contains("name")) b.system.name = meta["name"].get<std::string>();
    if (meta.contains("seed")) b.seed = meta["seed"].get<std::uint64_t>();
  }
  return b;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed bundle: ") + e.what());
  }
}

}  // namespace

std::string write_system(const SystemBundle& bundle) { return system_to_json(bundle).dump(2) + "\n"; }

SystemBundle read_system(const std::string& text) {
  const auto j = parse(text);
  return guarded([&] { return system_from_json(j); });
}

std::string write_series(const TruncatedOperatorSeries& series) {
  json j = header("jcs-series");
  j["N"] = series.n();
  j["degree"] = series.degree();
  j["rows"] = series.rows();
  j["cols"] = series.cols();
  j["coefficients"] = series_entries(series);
  if (series.tail.kind == SeriesTail::Kind::geometric)
    j["tail"] = {{"kind", "geometric"}, {"rho", series.tail.rho}, {"magnitude", series.tail.magnitude}};
  return j.dump(2) + "\n";
}

TruncatedOperatorSeries read_series(const std::string& text) {
  const auto j = parse(text);
  return guarded([&] {
    expect_format(j, "jcs-series");
    TruncatedOperatorSeries s(j.at("N").get<int>(), j.at("degree").get<int>(), j.at("rows").get<int>(),
                              j.at("cols").get<int>());
    fill_series(s, j.at("coefficients"), "series");
    if (j.contains("tail")) {
      const auto& t = j["tail"];
      if (t.at("kind").get<std::string>() != "geometric") throw FormatError("series: unknown tail kind");
      s.tail.kind = SeriesTail::Kind::geometric;
      s.tail.rho = t.at("rho").get<std::vector<double>>();
      s.tail.magnitude = t.at("magnitude").get<double>();
    }
    return s;
  });
}

std::string write_decomposition(const AglerDecomposition& dec) {
  json j = header("jcs-decomposition");
  j["N"] = dec.n;
  j["cols"] = dec.cols;
  j["epsilon"] = dec.epsilon;
  json blocks = json::array();
  for (int k = 0; k < dec.n; ++k)
    blocks.push_back({{"m_plus", dec.m_plus[k]}, {"m_minus", dec.m_minus[k]}, {"coefficients", series_entries(dec.f[k])}});
  j["blocks"] = std::move(blocks);
  j["certificate"] = {{"r", dec.radius},
                      {"d", dec.degree},
                      {"eta", dec.eta()},
                      {"eta_constant", dec.eta_constant},
                      {"exact", dec.exact}};
  return j.dump(2) + "\n";
}

AglerDecomposition read_decomposition(const std::string& text) {
  const auto j = parse(text);
  return guarded([&] {
    expect_format(j, "jcs-decomposition");
    AglerDecomposition dec;
    dec.n = j.at("N").get<int>();
    dec.cols = j.at("cols").get<int>();
    dec.epsilon = j.at("epsilon").get<double>();
    const auto& cert = j.at("certificate");
    dec.radius = cert.at("r").get<double>();
    dec.degree = cert.at("d").get<int>();
    dec.eta_constant = cert.value("eta_constant", 0.0);
    dec.exact = cert.value("exact", false);
    const auto& blocks = j.at("blocks");
    if (!blocks.is_array() || static_cast<int>(blocks.size()) != dec.n)
      throw FormatError("decomposition: expected N blocks");
    for (int k = 0; k < dec.n; ++k) {
      const auto& b = blocks[k];
      dec.m_plus.push_back(b.at("m_plus").get<int>());
      dec.m_minus.push_back(b.at("m_minus").get<int>());
      TruncatedOperatorSeries s(dec.n, dec.degree, dec.dim(k), dec.cols);
      fill_series(s, b.at("coefficients"), "decomposition block " + std::to_string(k));
      dec.f.push_back(std::move(s));
    }
    return dec;
  });
}

DilationBundle to_bundle(const DilationResult& res) {
  DilationBundle b;
  b.dilation.system = res.alpha_tilde;
  b.dilation.j = res.j;
  b.x_offset = res.x_offset;
  b.k0_dim = res.k0_dim;
  b.aux_dim = res.aux_dim;
  b.tol = res.tol;
  b.defects = res.defects;
  b.failed = res.failed;
  return b;
}

std::string write_dilation(const DilationBundle& bundle) {
  json j = header("jcs-dilation");
  j["system"] = system_to_json(bundle.dilation);
  j["x_offset"] = bundle.x_offset;
  j["k0_dim"] = bundle.k0_dim;
  j["aux_dim"] = bundle.aux_dim;
  j["tol"] = bundle.tol;
  json defects = json::object();
  for (const auto& [k, v] : bundle.defects) defects[k] = v;
  j["defects"] = std::move(defects);
  j["failed"] = bundle.failed;
  return j.dump(2) + "\n";
}

DilationBundle read_dilation(const std::string& text) {
  const auto j = parse(text);
  return guarded([&] {
    expect_format(j, "jcs-dilation");
    DilationBundle b;
    b.dilation = system_from_json(j.at("system"));
    b.x_offset = j.at("x_offset").get<int>();
    b.k0_dim = j.value("k0_dim", 0);
    b.aux_dim = j.value("aux_dim", 0);
    b.tol = j.value("tol", 0.0);
    if (j.contains("defects"))
      for (const auto& [k, v] : j["defects"].items()) b.defects[k] = v.get<double>();
    if (j.contains("failed")) b.failed = j["failed"].get<std::vector<std::string>>();
    return b;
  });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
  if (!out) throw FormatError("write to '" + path + "' failed");
}

}  // namespace jcs::io

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "jcs/agler.hpp"
#include "jcs/dilation.hpp"
#include "jcs/io.hpp"
#include "jcs/lattice.hpp"
#include "jcs/realize.hpp"
#include "jcs/transfer.hpp"

namespace jcs::cli {

namespace {

using json = nlohmann::ordered_json;

struct Config {
  double tol = 1e-8;
  double truncation_tol = 1e-6;
  std::vector<std::string> stage_tol;
  bool json = false;
  std::uint64_t seed = 7;
  int degree = -1;
  double radius = 0.5;
  int samples = 100;
  int levels = 10;
  double epsilon = 0.0;
  std::string at;
  std::string out;

  std::vector<std::string> files;
  std::string input = "impulse";
  bool conjugate = false;
  std::string decomposition;
  bool exact = false;
  int decomposition_degree = 20;
  bool allow_large = false;
  int n = 2;
  int dx = 2;
  int du = 1;
  int negative = 0;
  std::string example;

  std::map<std::string, double> overrides;
};

class UsageError : public Error {
public:
  using Error::Error;
};

bool truncation_stage(const std::string& s) {
  return s == "lin-tf" || s == "lin-tf-chain" || s == "transfer-coincidence";
}

double tolerance_for(const Config& cfg, const std::string& stage) {
  if (auto it = cfg.overrides.find(stage); it != cfg.overrides.end()) return it->second;
  if (stage == "coefficient-match") return 1e-12;
  if (stage == "sample-match") return 1e-5;
  return truncation_stage(stage) ? cfg.truncation_tol : cfg.tol;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string fmt_entry(cplx v) {
  auto one = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    std::string s = buf;
    if (s.find_first_of(".eni") == std::string::npos) s += ".0";
    return s;
  };
  if (v.imag() == 0.0) return one(v.real());
  std::string im = one(std::abs(v.imag()));
  return one(v.real()) + (v.imag() < 0 ? "-" : "+") + im + "i";
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

std::string matrix_text(const Mat& m) {
  std::ostringstream os;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << "  [";
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? ", " : "") << fmt_entry(m(r, c));
    os << "]\n";
  }
  return os.str();
}

std::string index_text(const MultiIndex& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

/// Accumulates checked residuals, plain facts and tables for one command.
class Report {
public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  void check(const std::string& stage, double residual, double tol) {
    const bool pass = residual <= tol;
    checks_.push_back({stage, residual, tol, pass});
    if (!pass) failed_.push_back(stage);
  }
  void info(const std::string& key, json value, std::string text = {}) {
    info_[key] = value;
    info_text_.emplace_back(key, text.empty() ? (value.is_string() ? value.get<std::string>() : value.dump())
                                              : text);
  }
  void table(const std::string& name, std::vector<std::string> header, std::vector<std::vector<std::string>> rows,
             json data) {
    tables_.push_back({name, std::move(header), std::move(rows)});
    data_[name] = std::move(data);
  }
  void block(const std::string& name, const std::string& text, json data) {
    blocks_.emplace_back(name, text);
    data_[name] = std::move(data);
  }
  const std::vector<std::string>& failed() const { return failed_; }
  int exit_code() const { return failed_.empty() ? kOk : kResidualFailure; }

  void emit(std::ostream& out, std::ostream& err, bool as_json) const {
    if (as_json) {
      json j;
      j["command"] = command_;
      j["info"] = info_;
      j["data"] = data_;
      json checks = json::array();
      for (const auto& c : checks_)
        checks.push_back({{"stage", c.stage}, {"residual", c.residual}, {"tolerance", c.tol}, {"pass", c.pass}});
      j["checks"] = checks;
      j["failed"] = failed_;
      j["status"] = failed_.empty() ? "ok" : "fail";
      out << j.dump(2) << "\n";
    } else {
      out << "jcs " << command_ << "\n";
      for (const auto& [k, v] : info_text_) out << "  " << k << ": " << v << "\n";
      for (const auto& [name, text] : blocks_) out << "\n" << name << "\n" << text;
      for (const auto& t : tables_) print_table(out, t);
      if (!checks_.empty()) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& c : checks_) rows.push_back({c.stage, fmt(c.residual), fmt(c.tol), c.pass ? "ok" : "FAIL"});
        print_table(out, {"checks", {"stage", "residual", "tolerance", "status"}, rows});
      }
      out << "\nstatus: " << (failed_.empty() ? "ok" : "fail") << "\n";
    }
    for (const auto& c : checks_)
      if (!c.pass)
        err << "jcs " << command_ << ": stage '" << c.stage << "' failed: residual " << fmt(c.residual)
            << " > tolerance " << fmt(c.tol) << "\n";
  }

private:
  struct Check {
    std::string stage;
    double residual;
    double tol;
    bool pass;
  };
  struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
  };

  static void print_table(std::ostream& out, const Table& t) {
    std::vector<std::size_t> w(t.header.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = t.header[i].size();
    for (const auto& r : t.rows)
      for (std::size_t i = 0; i < r.size() && i < w.size(); ++i) w[i] = std::max(w[i], r[i].size());
    auto line = [&](const std::vector<std::string>& cells) {
      out << " ";
      for (std::size_t i = 0; i < w.size(); ++i) {
        const std::string& c = i < cells.size() ? cells[i] : std::string();
        out << " " << c << std::string(w[i] - c.size(), ' ');
      }
      out << "\n";
    };
    out << "\n" << t.name << "\n";
    line(t.header);
    for (const auto& r : t.rows) line(r);
  }

  std::string command_;
  json info_ = json::object();
  json data_ = json::object();
  std::vector<std::pair<std::string, std::string>> info_text_;
  std::vector<std::pair<std::string, std::string>> blocks_;
  std::vector<Table> tables_;
  std::vector<Check> checks_;
  std::vector<std::string> failed_;
};

cplx parse_complex(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw UsageError("empty coordinate");
  auto number = [&](const std::string& part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw UsageError("cannot parse '" + s + "' as a complex number");
    }
    if (used != part.size()) throw UsageError("cannot parse '" + s + "' as a complex number");
    return v;
  };
  if (s.back() != 'i' && s.back() != 'j') return number(s);
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  if (split == std::string::npos) return cplx(0.0, number(body));
  return cplx(number(body.substr(0, split)), number(body.substr(split)));
}

Point parse_point(const std::string& text, int n) {
  Point z;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) z.push_back(parse_complex(item));
  if (z.size() == 1 && n > 1) z.assign(n, z[0]);
  if (static_cast<int>(z.size()) != n)
    throw UsageError("--at expects " + std::to_string(n) + " comma-separated coordinates");
  return z;
}

io::SystemBundle load_system(const std::string& path) {
  try {
    return io::read_system(io::read_file(path));
  } catch (const io::FormatError&) {
    throw;
  } catch (const Error& e) {
    throw io::FormatError(path + ": " + e.what());
  }
}

CanonicalSymmetry bundle_symmetry(const io::SystemBundle& b) {
  return b.j ? *b.j : CanonicalSymmetry::identity(b.system.dx());
}

std::string signature_text(const CanonicalSymmetry& j) {
  return "(+" + std::to_string(j.positive()) + ", -" + std::to_string(j.negative()) + ")";
}

void system_info(Report& rep, const MultiparametricSystem& sys, const CanonicalSymmetry& j) {
  if (!sys.name.empty()) rep.info("name", sys.name);
  rep.info("N", sys.n());
  rep.info("dims", {{"x", sys.dx()}, {"u", sys.du()}, {"y", sys.dy()}},
           "x=" + std::to_string(sys.dx()) + " u=" + std::to_string(sys.du()) + " y=" + std::to_string(sys.dy()));
  rep.info("J signature", {j.positive(), j.negative()}, signature_text(j));
}

std::vector<Point> torus_samples(int n, int count, Rng& rng) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.torus_point(n));
  return out;
}

// ---------------------------------------------------------------------------

int cmd_check(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto b = load_system(cfg.files.at(0));
  const auto j = bundle_symmetry(b);
  Report rep("check");
  system_info(rep, b.system, j);
  const auto d = jconservativity_defect(b.system, j);
  rep.check("r1", d.r1, tolerance_for(cfg, "r1"));
  rep.check("r2", d.r2, tolerance_for(cfg, "r2"));
  rep.check("r3", d.r3, tolerance_for(cfg, "r3"));
  rep.check("r4", d.r4, tolerance_for(cfg, "r4"));
  rep.check("torus-coefficients", torus_coefficient_defects(b.system, j).max(),
            tolerance_for(cfg, "torus-coefficients"));
  Rng rng(cfg.seed);
  rep.check("torus", torus_check(b.system, j, torus_samples(b.system.n(), cfg.samples, rng)),
            tolerance_for(cfg, "torus"));
  rep.emit(out, err, cfg.json);
  return rep.exit_code();
}

int cmd_simulate(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto b = load_system(cfg.files.at(0));
  const auto j = bundle_symmetry(b);
  const auto sys = cfg.conjugate ? conjugate_system(b.system) : b.system;
  if (cfg.levels < 1) throw UsageError("--levels must be at least 1");
  const int n = sys.n();
  LatticeSignal x0(n, sys.dx()), u(n, sys.du());
  const MultiIndex origin(n, 0);
  if (cfg.input == "impulse") {
    if (sys.du() > 0) u.set(origin, Vec::Unit(sys.du(), 0));
  } else if (cfg.input == "random") {
    Rng rng(cfg.seed);
    x0.set(origin, rng.complex_vector(sys.dx()));
    if (n >= 2) x0.set(shifted(unit_index(n, 0), 1, -1), rng.complex_vector(sys.dx()));
    for (int lv = 0; lv < cfg.levels; ++lv)
      for (const auto& t : indices_of_degree(n, lv)) u.set(t, rng.complex_vector(sys.du()));
  } else {
    throw UsageError("--input must be 'impulse' or 'random'");
  }
  const auto traj = simulate(sys, x0, u, cfg.levels);
  const auto energy = energy_balance_report(traj, j);

  Report rep("simulate");
  system_info(rep, sys, j);
  rep.info("input", cfg.input);
  rep.info("conjugate", cfg.conjugate);
  std::vector<std::vector<std::string>> rows;
  json data = json::array();
  for (const auto& e : energy.levels) {
    rows.push_back({std::to_string(e.n), fmt(e.state), fmt(e.input), fmt(e.output), fmt(e.residual)});
    data.push_back({{"level", e.n}, {"state", e.state}, {"input", e.input}, {"output", e.output},
                    {"residual", e.residual}});
  }
  rep.table("energy", {"level", "state", "input", "output", "balance residual"}, rows, data);
  rep.check("energy-balance", energy.max_residual, tolerance_for(cfg, "energy-balance"));
  rep.emit(out, err, cfg.json);
  return rep.exit_code();
}

int cmd_transfer(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto b = load_system(cfg.files.at(0));
  const auto& sys = b.system;
  if (cfg.at.empty() && cfg.degree < 0) throw UsageError("transfer needs --at or --degree");
  Report rep("transfer");
  system_info(rep, sys, bundle_symmetry(b));
  if (!cfg.at.empty()) {
    const Point z = parse_point(cfg.at, sys.n());
    const Mat th = eval_transfer(sys, z);
    json zj = json::array();
    std::string ztext;
    for (std::size_t i = 0; i < z.size(); ++i) {
      zj.push_back({z[i].real(), z[i].imag()});
      ztext += (i ? ", " : "") + fmt_entry(z[i]);
    }
    rep.info("z", zj, ztext);
    rep.block("theta(z)", matrix_text(th), matrix_json(th));
  }
  if (cfg.degree >= 0) {
    if (cfg.degree < 1) throw UsageError("--degree must be at least 1");
    const auto series = taylor_coefficients(sys, cfg.degree, TaylorMethod::recursive);
    std::vector<std::vector<std::string>> rows;
    json data = json::array();
    for (const auto& [t, c] : series.coefficients()) {
      std::string entries;
      for (Eigen::Index r = 0; r < c.rows(); ++r)
        for (Eigen::Index k = 0; k < c.cols(); ++k) entries += (entries.empty() ? "" : " ") + fmt_entry(c(r, k));
      rows.push_back({index_text(t), entries});
      data.push_back({{"index", t}, {"coefficient", matrix_json(c)}});
    }
    rep.table("taylor coefficients", {"index", "entries (row-major)"}, rows, data);
    if (cfg.degree <= kWordDegreeCap) {
      const auto words = taylor_coefficients(sys, cfg.degree, TaylorMethod::words);
      double diff = 0.0;
      for (const auto& [t, c] : series.coefficients()) diff = std::max(diff, op_norm(c - words.coefficient(t)));
      rep.check("taylor-methods", diff, tolerance_for(cfg, "taylor-methods"));
    }
    if (!cfg.out.empty()) io::write_file(cfg.out, io::write_series(series));
  }
  rep.emit(out, err, cfg.json);
  return rep.exit_code();
}

AglerDecomposition make_decomposition(const Config& cfg, const std::vector<Mat>& g, int default_degree) {
  if (cfg.exact) return conservative_decomposition(g);
  const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : minimal_constructive_epsilon(g);
  const int degree = cfg.degree > 0 ? cfg.degree : default_degree;
  return construct_pencil_decomposition(g, eps, degree, cfg.radius);
}

int cmd_decompose(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto b = load_system(cfg.files.at(0));
  const auto padded = pad_io(b.system);
  const auto g = system_operators(padded);
  Rng rng(cfg.seed);
  const auto bounds = epsilon_bounds(g, torus_samples(padded.n(), cfg.samples, rng));
  const auto dec = make_decomposition(cfg, g, 12);
  const auto pairs = random_pairs(dec.n, cfg.samples, dec.radius, rng);

  Report rep("decompose");
  system_info(rep, b.system, bundle_symmetry(b));
  rep.info("epsilon bounds", {bounds.lower, bounds.upper}, "[" + fmt(bounds.lower) + ", " + fmt(bounds.upper) + "]");
  rep.info("epsilon", dec.epsilon, fmt(dec.epsilon));
  rep.info("degree", dec.degree);
  rep.info("radius", dec.radius, fmt(dec.radius));
  rep.info("exact", dec.exact);
  rep.info("eta", dec.eta(), fmt(dec.eta()));
  json blocks = json::array();
  std::string btext;
  for (int k = 0; k < dec.n; ++k) {
    blocks.push_back({dec.m_plus[k], dec.m_minus[k]});
    btext += (k ? " " : "") + std::string("(+") + std::to_string(dec.m_plus[k]) + ", -" +
             std::to_string(dec.m_minus[k]) + ")";
  }
  rep.info("blocks", blocks, btext);

  const auto kc = verify_kernel_identity(g, dec, pairs);
  rep.check("kernel-identity", kc.residual, cfg.overrides.count("kernel-identity") ? cfg.overrides.at("kernel-identity") : kc.bound);
  const auto zi = derived_zero_identities(dec, pairs);
  rep.check("zero-identities", zi.max(), tolerance_for(cfg, "zero-identities"));
  const auto ti = transform_identities(dec, g, pairs);
  rep.check("transform-identities", ti.max(),
            cfg.overrides.count("transform-identities") ? cfg.overrides.at("transform-identities") : kc.bound);
  if (!cfg.out.empty()) io::write_file(cfg.out, io::write_decomposition(dec));
  rep.emit(out, err, cfg.json);
  return rep.exit_code();
}

int cmd_dilate(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto b = load_system(cfg.files.at(0));
  const auto padded = pad_io(b.system);
  const auto g = system_operators(padded);
  AglerDecomposition dec;
  if (!cfg.decomposition.empty()) {
    try {
      dec = io::read_decomposition(io::read_file(cfg.decomposition));
    } catch (const io::FormatError&) {
      throw;
    } catch (const Error& e) {
      throw io::FormatError(cfg.decomposition + ": " + e.what());
    }
  } else {
    dec = make_decomposition(cfg, g, 24);
  }

  DilationOptions opt;
  opt.tol = cfg.tol;
  opt.truncation_tol = cfg.truncation_tol;
  opt.samples = cfg.samples;
  opt.seed = cfg.seed;
  opt.throw_on_failure = false;
  const auto res = build_dilation(b.system, dec, opt);

  Report rep("dilate");
  system_info(rep, b.system, bundle_symmetry(b));
  rep.info("epsilon", dec.epsilon, fmt(dec.epsilon));
  rep.info("degree", dec.degree);
  rep.info("K0 dim", res.k0_dim);
  rep.info("dilation dims", {{"x", res.alpha_tilde.dx()}, {"u", res.alpha_tilde.du()}, {"y", res.alpha_tilde.dy()}},
           "x=" + std::to_string(res.alpha_tilde.dx()) + " u=" + std::to_string(res.alpha_tilde.du()) +
               " y=" + std::to_string(res.alpha_tilde.dy()));
  rep.info("dilation J signature", {res.j.positive(), res.j.negative()}, signature_text(res.j));
  rep.info("x offset", res.x_offset);
  for (const auto& [stage, value] : res.defects) rep.check(stage, value, tolerance_for(cfg, stage));
  if (!cfg.out.empty()) {
    auto bundle = io::to_bundle(res);
    bundle.dilation.system.name = b.system.name.empty() ? "dilation" : b.system.name + "-dilation";
    bundle.failed = rep.failed();
    io::write_file(cfg.out, io::write_dilation(bundle));
  }
  rep.emit(out, err, cfg.json);
  return rep.exit_code();
}

int cmd_realize(const Config& cfg, std::ostream& out, std::ostream& err) {
  TruncatedOperatorSeries theta;
  try {
    theta = io::read_series(io::read_file(cfg.files.at(0)));
  } catch (const io::FormatError&) {
    throw;
  } catch (const Error& e) {
    throw io::FormatError(cfg.files.at(0) + ": " + e.what());
  }
  const int d = cfg.degree > 0 ? cfg.degree : theta.degree();
  RealizationOptions opt;
  opt.tol = cfg.tol;
  opt.coefficient_tol = tolerance_for(cfg, "coefficient-match");
  opt.sample_tol = tolerance_for(cfg, "sample-match");
  opt.decomposition_degree = cfg.decomposition_degree;
  opt.radius = cfg.radius;
  opt.epsilon = cfg.epsilon;
  opt.samples = cfg.samples;
  opt.seed = cfg.seed;
  opt.allow_large_degree = cfg.allow_large;
  opt.throw_on_failure = false;
  const auto res = jconservative_realization(theta, d, opt);

  Report rep("realize");
  rep.info("N", theta.n());
  rep.info("degree", d);
  rep.info("decomposition degree", cfg.decomposition_degree);
  rep.info("epsilon", res.epsilon, fmt(res.epsilon));
  rep.info("shift-register state dim", res.shift_register.dx());
  rep.info("realization dims", {{"x", res.system.dx()}, {"u", res.system.du()}, {"y", res.system.dy()}},
           "x=" + std::to_string(res.system.dx()) + " u=" + std::to_string(res.system.du()) +
               " y=" + std::to_string(res.system.dy()));
  rep.info("J signature", {res.j.positive(), res.j.negative()}, signature_text(res.j));
  std::vector<std::vector<std::string>> rows;
  json data = json::array();
  for (const auto& [t, r] : res.coefficient_residuals) {
    rows.push_back({index_text(t), fmt(r)});
    data.push_back({{"index", t}, {"residual", r}});
  }
  rep.table("coefficient match", {"index", "residual"}, rows, data);
  for (const auto& [stage, value] : res.defects) {
    const auto it = res.tolerances.find(stage);
    const double tol = cfg.overrides.count(stage) || it == res.tolerances.end() ? tolerance_for(cfg, stage)
                                                                              : it->second;
    rep.check(stage, value, tol);
  }
  if (!cfg.out.empty()) {
    io::SystemBundle bundle{res.system, res.j, cfg.seed};
    io::write_file(cfg.out, io::write_system(bundle));
  }
  rep.emit(out, err, cfg.json);
  return rep.exit_code();
}

int cmd_verify_dilation(const Config& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.files.size() != 2) throw UsageError("verify-dilation expects SYSTEM and DILATION files");
  const auto b = load_system(cfg.files[0]);
  io::DilationBundle dil;
  try {
    dil = io::read_dilation(io::read_file(cfg.files[1]));
  } catch (const io::FormatError&) {
    throw;
  } catch (const Error& e) {
    throw io::FormatError(cfg.files[1] + ": " + e.what());
  }
  if (!dil.dilation.j) throw io::FormatError(cfg.files[1] + ": dilation bundle carries no J");
  const auto sys = pad_io(b.system);
  Rng rng(cfg.seed);
  std::vector<Point> samples;
  for (int i = 0; i < cfg.samples; ++i) samples.push_back(rng.polydisk_point(sys.n(), cfg.radius));
  const auto vr = verify_dilation(sys, dil.dilation.system, *dil.dilation.j, samples, dil.x_offset);

  Report rep("verify-dilation");
  system_info(rep, b.system, bundle_symmetry(b));
  rep.info("dilation state dim", dil.dilation.system.dx());
  rep.info("x offset", dil.x_offset);
  rep.check("compression", vr.compression, tolerance_for(cfg, "compression"));
  rep.check("transfer-coincidence", vr.transfer, tolerance_for(cfg, "transfer-coincidence"));
  rep.check("dilation-conservativity", vr.conservativity, tolerance_for(cfg, "dilation-conservativity"));
  rep.emit(out, err, cfg.json);
  return rep.exit_code();
}

int cmd_gen(const Config& cfg, std::ostream& out, std::ostream& err) {
  MultiparametricSystem sys;
  CanonicalSymmetry j = CanonicalSymmetry::identity(0);
  if (cfg.example == "hyperbolic" || cfg.example == "matrix-unit") {
    sys = cfg.example == "hyperbolic" ? hyperbolic_example() : matrix_unit_example();
    j = cfg.example == "hyperbolic" ? CanonicalSymmetry::diagonal({-1}) : CanonicalSymmetry::identity(sys.dx());
  } else if (!cfg.example.empty()) {
    throw UsageError("--example must be 'hyperbolic' or 'matrix-unit'");
  } else {
    if (cfg.negative < 0 || cfg.negative > cfg.dx) throw UsageError("--negative must lie in [0, dx]");
    j = CanonicalSymmetry::standard(cfg.dx - cfg.negative, cfg.negative);
    sys = random_jconservative(cfg.n, cfg.dx, cfg.du, cfg.seed, j);
  }
  const auto d = jconservativity_defect(sys, j);
  const std::string text = io::write_system({sys, j, cfg.seed});
  if (cfg.out.empty() || cfg.out == "-") {
    // The bundle itself goes to stdout; the check summary to stderr.
    out << text;
    if (d.max() > tolerance_for(cfg, "conservativity")) {
      err << "jcs gen: stage 'conservativity' failed: residual " << fmt(d.max()) << "\n";
      return kResidualFailure;
    }
    return kOk;
  }
  io::write_file(cfg.out, text);
  Report rep("gen");
  system_info(rep, sys, j);
  rep.info("seed", cfg.seed);
  rep.info("out", cfg.out);
  rep.check("conservativity", d.max(), tolerance_for(cfg, "conservativity"));
  rep.emit(out, err, cfg.json);
  return rep.exit_code();
}

void parse_overrides(Config& cfg) {
  for (const auto& item : cfg.stage_tol) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--stage-tol expects STAGE=VALUE, got '" + item + "'");
    try {
      cfg.overrides[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--stage-tol value in '" + item + "' is not a number");
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Multiparametric J-conservative systems: checks, simulation, dilation and realization", "jcs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--tol", cfg.tol, "Tolerance for exact residuals")->capture_default_str();
  app.add_option("--truncation-tol", cfg.truncation_tol, "Tolerance for degree-truncation residuals")
      ->capture_default_str();
  app.add_option("--stage-tol", cfg.stage_tol, "Per-stage override STAGE=VALUE (repeatable)")->allow_extra_args(false);
  app.add_flag("--json", cfg.json, "Emit a JSON report");
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--degree", cfg.degree, "Series or decomposition degree");
  app.add_option("--radius", cfg.radius, "Certified polydisk radius")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Number of random samples")->capture_default_str();
  app.add_option("--levels", cfg.levels, "Simulation levels")->capture_default_str();
  app.add_option("--epsilon", cfg.epsilon, "Decomposition scale (0 selects the constructive minimum)");
  app.add_option("--at", cfg.at, "Evaluation point z1,z2,... (entries like 0.5 or 0.3-0.1i)");
  app.add_option("--out", cfg.out, "Output file");

  auto* check = app.add_subcommand("check", "Conservativity defects and torus check");
  check->add_option("system", cfg.files, "System bundle")->required()->expected(1);
  auto* sim = app.add_subcommand("simulate", "Lattice run with energy-balance report");
  sim->add_option("system", cfg.files, "System bundle")->required()->expected(1);
  sim->add_option("--input", cfg.input, "impulse or random")->capture_default_str();
  sim->add_flag("--conjugate", cfg.conjugate, "Simulate the conjugate system");
  auto* tf = app.add_subcommand("transfer", "Evaluate the transfer function or its Taylor coefficients");
  tf->add_option("system", cfg.files, "System bundle")->required()->expected(1);
  auto* dec = app.add_subcommand("decompose", "Certified kernel decomposition of the pencil");
  dec->add_option("system", cfg.files, "System bundle")->required()->expected(1);
  dec->add_flag("--exact", cfg.exact, "Constant decomposition for Hilbert-conservative tuples");
  auto* dil = app.add_subcommand("dilate", "Build a J-conservative dilation");
  dil->add_option("system", cfg.files, "System bundle")->required()->expected(1);
  dil->add_option("--decomposition", cfg.decomposition, "Decomposition bundle to use");
  dil->add_flag("--exact", cfg.exact, "Constant decomposition for Hilbert-conservative tuples");
  auto* rz = app.add_subcommand("realize", "Realize a truncated series as a J-conservative system");
  rz->add_option("series", cfg.files, "Series file")->required()->expected(1);
  rz->add_option("--decomposition-degree", cfg.decomposition_degree, "Degree of the pencil decomposition")
      ->capture_default_str();
  rz->add_flag("--allow-large-degree", cfg.allow_large, "Lift the degree cap for N >= 3");
  auto* vd = app.add_subcommand("verify-dilation", "Verify a dilation bundle against a system");
  vd->add_option("files", cfg.files, "System bundle and dilation bundle")->required()->expected(2);
  auto* gen = app.add_subcommand("gen", "Random J-conservative system");
  gen->add_option("--n", cfg.n, "Number of variables N")->capture_default_str();
  gen->add_option("--dx", cfg.dx, "State dimension")->capture_default_str();
  gen->add_option("--du", cfg.du, "Input/output dimension")->capture_default_str();
  gen->add_option("--negative", cfg.negative, "Negative index of J")->capture_default_str();
  gen->add_option("--example", cfg.example, "Emit a built-in system instead: hyperbolic or matrix-unit");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "jcs: " << e.what() << "\n";
    return kParseError;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    parse_overrides(cfg);
    if (cfg.samples < 1) throw UsageError("--samples must be positive");
    if (!(cfg.radius > 0.0 && cfg.radius < 1.0)) throw UsageError("--radius must lie in (0, 1)");
    if (name == "check") return cmd_check(cfg, out, err);
    if (name == "simulate") return cmd_simulate(cfg, out, err);
    if (name == "transfer") return cmd_transfer(cfg, out, err);
    if (name == "decompose") return cmd_decompose(cfg, out, err);
    if (name == "dilate") return cmd_dilate(cfg, out, err);
    if (name == "realize") return cmd_realize(cfg, out, err);
    if (name == "verify-dilation") return cmd_verify_dilation(cfg, out, err);
    if (name == "gen") return cmd_gen(cfg, out, err);
  } catch (const UsageError& e) {
    err << "jcs " << name << ": " << e.what() << "\n";
    return kParseError;
  } catch (const io::FormatError& e) {
    err << "jcs " << name << ": " << e.what() << "\n";
    return kParseError;
  } catch (const StageFailure& e) {
    err << "jcs " << name << ": " << e.what() << "\n";
    return kResidualFailure;
  } catch (const Error& e) {
    err << "jcs " << name << ": " << e.what() << "\n";
    return kResidualFailure;
  }
  return kParseError;
}

}  // namespace jcs::cli

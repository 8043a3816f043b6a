#include "qgs/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "qgs/error.hpp"

namespace qgs {

namespace {

using Json = nlohmann::ordered_json;

Json num(double x) { return round12(x); }

Json number_array(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path + ": " + what);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

double get_double(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

long get_int(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<long>();
}

bool get_bool(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_boolean()) fail(path + "." + key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

const Json& get_array(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_array()) fail(path + "." + key, "expected an array");
  return v;
}

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

Json band_structure_json(const BandStructure& bs) {
  Json j;
  j["alpha"] = num(bs.alpha);
  j["zmax"] = num(bs.zmax);
  j["floor"] = num(bs.floor);
  j["dirichlet"] = number_array(bs.dirichlet);
  Json bands = Json::array();
  for (std::size_t k = 0; k < bs.bands.size(); ++k) {
    const Band& b = bs.bands[k];
    bands.push_back({{"index", k}, {"lower", num(b.lower)}, {"upper", num(b.upper)}, {"partial", b.partial}});
  }
  j["bands"] = std::move(bands);
  Json gaps = Json::array();
  for (const Gap& g : bs.gaps) {
    gaps.push_back({{"index", g.index},
                    {"lower", num(g.lower)},
                    {"upper", num(g.upper)},
                    {"mu", num(g.mu)},
                    {"closed", g.closed}});
  }
  j["gaps"] = std::move(gaps);
  return j;
}

BandStructure band_structure_parse(const Json& j, const std::string& path) {
  BandStructure bs;
  bs.alpha = get_double(j, "alpha", path);
  bs.zmax = get_double(j, "zmax", path);
  bs.floor = get_double(j, "floor", path);
  const Json& mu = get_array(j, "dirichlet", path);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!mu[i].is_number()) fail(indexed(path + ".dirichlet", i), "expected a number");
    bs.dirichlet.push_back(mu[i].get<double>());
  }
  const Json& bands = get_array(j, "bands", path);
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const std::string p = indexed(path + ".bands", i);
    bs.bands.push_back({get_double(bands[i], "lower", p), get_double(bands[i], "upper", p),
                        get_bool(bands[i], "partial", p)});
  }
  const Json& gaps = get_array(j, "gaps", path);
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const std::string p = indexed(path + ".gaps", i);
    Gap g;
    g.index = static_cast<std::size_t>(get_int(gaps[i], "index", p));
    g.lower = get_double(gaps[i], "lower", p);
    g.upper = get_double(gaps[i], "upper", p);
    g.mu = get_double(gaps[i], "mu", p);
    g.closed = get_bool(gaps[i], "closed", p);
    bs.gaps.push_back(g);
  }
  return bs;
}

Json parse_text(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

double round12(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string band_structure_to_json(const BandStructure& bs) { return dump(band_structure_json(bs)); }

BandStructure band_structure_from_json(std::string_view text) { return band_structure_parse(parse_text(text), "$"); }

std::string spectrum_report_to_json(const SpectrumReport& r) {
  const bool lattice = r.mode == SpectrumMode::Lattice;
  Json j;
  j["mode"] = lattice ? "lattice" : "finite";
  if (lattice) j["lattice_dimension"] = r.lattice_dimension;
  j["zmax"] = num(r.zmax);
  j["bands"] = band_structure_json(r.bands_used);

  Json discrete = Json::array();
  for (const EigenvalueCluster& c : r.discrete) discrete.push_back({{"lambda", num(c.value)}, {"mult", c.multiplicity}});
  j["discrete"] = std::move(discrete);

  Json points = Json::array();
  for (const SpectrumPoint& p : r.points) {
    points.push_back({{"z", num(p.z)},
                      {"mult", p.multiplicity},
                      {"lambda", num(p.lambda)},
                      {"band", p.band},
                      {"coincident", p.coincident},
                      {"type", "disc"}});
  }
  j["points"] = std::move(points);

  Json intervals = Json::array();
  for (const SpectrumInterval& iv : r.intervals) {
    intervals.push_back({{"lower", num(iv.lower)},
                         {"upper", num(iv.upper)},
                         {"band", iv.band},
                         {"partial", iv.partial},
                         {"type", "ess"}});
  }
  j["intervals"] = std::move(intervals);

  Json sigma0 = Json::array();
  for (const Sigma0Entry& e : r.sigma0) {
    Json s = {{"mu", num(e.mu)}, {"status", to_string(e.status)}, {"reason", e.reason}, {"mult", e.multiplicity}};
    if (lattice && e.status == Sigma0Status::Present) s["type"] = "pp";
    sigma0.push_back(std::move(s));
  }
  j["sigma0"] = std::move(sigma0);

  Json gaps = Json::array();
  for (const Interval& g : r.gaps) gaps.push_back({{"lower", num(g.lower)}, {"upper", num(g.upper)}});
  j["gaps"] = std::move(gaps);
  return dump(j);
}

SpectrumReport spectrum_report_from_json(std::string_view text) {
  const Json j = parse_text(text);
  SpectrumReport r;
  const std::string mode = get_string(j, "mode", "$");
  if (mode == "lattice") {
    r.mode = SpectrumMode::Lattice;
    r.lattice_dimension = static_cast<int>(get_int(j, "lattice_dimension", "$"));
  } else if (mode != "finite") {
    fail("$.mode", "expected 'finite' or 'lattice'");
  }
  r.zmax = get_double(j, "zmax", "$");
  r.bands_used = band_structure_parse(field(j, "bands", "$"), "$.bands");

  const Json& discrete = get_array(j, "discrete", "$");
  for (std::size_t i = 0; i < discrete.size(); ++i) {
    const std::string p = indexed("$.discrete", i);
    r.discrete.push_back({get_double(discrete[i], "lambda", p), static_cast<int>(get_int(discrete[i], "mult", p))});
  }
  const Json& points = get_array(j, "points", "$");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string p = indexed("$.points", i);
    SpectrumPoint pt;
    pt.z = get_double(points[i], "z", p);
    pt.multiplicity = static_cast<int>(get_int(points[i], "mult", p));
    pt.lambda = get_double(points[i], "lambda", p);
    pt.band = static_cast<std::size_t>(get_int(points[i], "band", p));
    pt.coincident = get_bool(points[i], "coincident", p);
    r.points.push_back(pt);
  }
  const Json& intervals = get_array(j, "intervals", "$");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const std::string p = indexed("$.intervals", i);
    r.intervals.push_back({get_double(intervals[i], "lower", p), get_double(intervals[i], "upper", p),
                           static_cast<std::size_t>(get_int(intervals[i], "band", p)),
                           get_bool(intervals[i], "partial", p)});
  }
  const Json& sigma0 = get_array(j, "sigma0", "$");
  for (std::size_t i = 0; i < sigma0.size(); ++i) {
    const std::string p = indexed("$.sigma0", i);
    Sigma0Entry e;
    e.mu = get_double(sigma0[i], "mu", p);
    e.status = sigma0_status_from(get_string(sigma0[i], "status", p));
    e.reason = get_string(sigma0[i], "reason", p);
    e.multiplicity = static_cast<int>(get_int(sigma0[i], "mult", p));
    r.sigma0.push_back(std::move(e));
  }
  const Json& gaps = get_array(j, "gaps", "$");
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const std::string p = indexed("$.gaps", i);
    r.gaps.push_back({get_double(gaps[i], "lower", p), get_double(gaps[i], "upper", p)});
  }
  return r;
}

std::string comparison_to_json(const ComparisonReport& cmp, const std::optional<ConvergenceDiagnostic>& conv,
                               const SpectrumReport& refined) {
  Json j;
  j["z_cut"] = num(cmp.z_cut);
  j["tol_rel"] = num(cmp.tol_rel);
  j["success"] = cmp.success();
  j["max_relative_mismatch"] = num(cmp.max_relative_mismatch);
  Json matched = Json::array();
  for (const MatchedPair& m : cmp.matched) {
    matched.push_back({{"theory", num(m.theory)}, {"oracle", num(m.oracle)}, {"relative_error", num(m.relative_error)}});
  }
  j["matched"] = std::move(matched);
  j["unmatched_theory"] = number_array(cmp.unmatched_theory);
  j["unmatched_oracle"] = number_array(cmp.unmatched_oracle);
  if (conv) {
    j["convergence"] = {{"coarse_N", conv->coarse_elements},
                        {"fine_N", conv->fine_elements},
                        {"max_relative_shift", num(conv->max_relative_shift)},
                        {"estimated_relative_error", num(conv->estimated_relative_error)}};
  }
  Json sigma0 = Json::array();
  for (const Sigma0Entry& e : refined.sigma0) {
    if (e.mu > cmp.z_cut) continue;
    sigma0.push_back({{"mu", num(e.mu)}, {"status", to_string(e.status)}, {"reason", e.reason}, {"mult", e.multiplicity}});
  }
  j["sigma0"] = std::move(sigma0);
  return dump(j);
}

std::string discrete_spectrum_to_json(const std::vector<EigenvalueCluster>& spectrum) {
  Json a = Json::array();
  for (const EigenvalueCluster& c : spectrum) a.push_back({{"lambda", num(c.value)}, {"mult", c.multiplicity}});
  return dump(Json{{"eigenvalues", std::move(a)}});
}

std::string dirichlet_to_json(const std::vector<double>& mu) { return dump(Json{{"dirichlet", number_array(mu)}}); }

std::string sweep_to_json(const std::vector<double>& z, const std::vector<double>& eta) {
  Json a = Json::array();
  for (std::size_t i = 0; i < z.size(); ++i) a.push_back({{"z", num(z[i])}, {"eta", num(eta[i])}});
  return dump(Json{{"samples", std::move(a)}});
}

std::string sweep_to_csv(const std::vector<double>& z, const std::vector<double>& eta) {
  std::ostringstream out;
  out << "z,eta\n";
  for (std::size_t i = 0; i < z.size(); ++i) out << format_number(z[i]) << ',' << format_number(eta[i]) << '\n';
  return out.str();
}

std::string dirichlet_to_csv(const std::vector<double>& mu) {
  std::ostringstream out;
  out << "k,mu\n";
  for (std::size_t k = 0; k < mu.size(); ++k) out << k << ',' << format_number(mu[k]) << '\n';
  return out.str();
}

std::string band_structure_to_csv(const BandStructure& bs) {
  std::ostringstream out;
  out << "kind,index,lower,upper,flag\n";
  for (std::size_t k = 0; k < bs.bands.size(); ++k) {
    const Band& b = bs.bands[k];
    out << "band," << k << ',' << format_number(b.lower) << ',' << format_number(b.upper) << ','
        << (b.partial ? "partial" : "") << '\n';
  }
  for (const Gap& g : bs.gaps) {
    out << "gap," << g.index << ',' << format_number(g.lower) << ',' << format_number(g.upper) << ','
        << (g.closed ? "closed" : "open") << '\n';
  }
  for (std::size_t k = 0; k < bs.dirichlet.size(); ++k) {
    out << "dirichlet," << k << ',' << format_number(bs.dirichlet[k]) << ',' << format_number(bs.dirichlet[k])
        << ",\n";
  }
  return out.str();
}

std::string discrete_spectrum_to_csv(const std::vector<EigenvalueCluster>& spectrum) {
  std::ostringstream out;
  out << "lambda,multiplicity\n";
  for (const EigenvalueCluster& c : spectrum) out << format_number(c.value) << ',' << c.multiplicity << '\n';
  return out.str();
}

std::string spectrum_report_to_csv(const SpectrumReport& r) {
  std::ostringstream out;
  out << "kind,lower,upper,multiplicity,lambda,band,label\n";
  for (const SpectrumPoint& p : r.points) {
    out << "point," << format_number(p.z) << ',' << format_number(p.z) << ',' << p.multiplicity << ','
        << format_number(p.lambda) << ',' << p.band << ',' << (p.coincident ? "coincident" : "disc") << '\n';
  }
  for (const SpectrumInterval& iv : r.intervals) {
    out << "interval," << format_number(iv.lower) << ',' << format_number(iv.upper) << ",,," << iv.band << ','
        << (iv.partial ? "partial" : "ess") << '\n';
  }
  for (const Sigma0Entry& e : r.sigma0) {
    out << "sigma0," << format_number(e.mu) << ',' << format_number(e.mu) << ',' << e.multiplicity << ",,,"
        << to_string(e.status) << '\n';
  }
  for (const Interval& g : r.gaps) {
    out << "gap," << format_number(g.lower) << ',' << format_number(g.upper) << ",,,,\n";
  }
  return out.str();
}

std::string comparison_to_csv(const ComparisonReport& cmp) {
  std::ostringstream out;
  out << "kind,theory,oracle,relative_error\n";
  for (const MatchedPair& m : cmp.matched) {
    out << "matched," << format_number(m.theory) << ',' << format_number(m.oracle) << ','
        << format_number(m.relative_error) << '\n';
  }
  for (double t : cmp.unmatched_theory) out << "unmatched_theory," << format_number(t) << ",,\n";
  for (double o : cmp.unmatched_oracle) out << "unmatched_oracle,," << format_number(o) << ",\n";
  return out.str();
}

}  // namespace qgs

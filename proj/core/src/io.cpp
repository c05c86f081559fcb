#include "transverse/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "transverse/error.hpp"

namespace transverse {

namespace {

using nlohmann::json;

constexpr const char* kModule = "cli_io";

// JSON has no literal for non-finite values; they travel as strings.
json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double num(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw FormatError(kModule, "expected a number, found \"" + s + "\"");
  }
  return j.get<double>();
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> nums(const json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(num(x));
  return v;
}

json vec(const Eigen::VectorXd& v) {
  return nums(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vec(const json& j) {
  const auto v = nums(j);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat(const Eigen::MatrixXd& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"data", vec(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(m.data(), m.size())))}};
}

Eigen::MatrixXd mat(const json& j) {
  const Eigen::Index r = j.at("rows").get<Eigen::Index>();
  const Eigen::Index c = j.at("cols").get<Eigen::Index>();
  const Eigen::VectorXd d = vec(j.at("data"));
  if (d.size() != r * c) throw FormatError(kModule, "matrix data size does not match its shape");
  return Eigen::Map<const Eigen::MatrixXd>(d.data(), r, c);
}

json cplx(std::complex<double> z) { return json::array({num(z.real()), num(z.imag())}); }

std::complex<double> cplx(const json& j) { return {num(j.at(0)), num(j.at(1))}; }

json cplxs(const std::vector<std::complex<double>>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(cplx(z));
  return a;
}

std::vector<std::complex<double>> cplxs(const json& j) {
  std::vector<std::complex<double>> v;
  for (const auto& z : j) v.push_back(cplx(z));
  return v;
}

// ---- payloads -------------------------------------------------------------

json to_j(const ProblemParams& p) {
  return {{"alpha", num(p.alpha)}, {"omega", num(p.omega)}, {"period", num(p.period)},
          {"tau", num(p.tau)}, {"parity", to_string(p.parity)}};
}

ProblemParams params_from(const json& j) {
  ProblemParams p;
  p.alpha = num(j.at("alpha"));
  p.omega = num(j.at("omega"));
  p.period = num(j.at("period"));
  p.tau = num(j.at("tau"));
  p.parity = parity_from_string(j.at("parity").get<std::string>());
  return p;
}

json to_j(const WaveProfile& w) {
  return {{"id", w.id()},
          {"params", to_j(w.params)},
          {"modes", w.phi.size()},
          {"phi", vec(w.phi.values())},
          {"multiplier", num(w.multiplier)},
          {"ode_residual_norm", num(w.ode_residual_norm)},
          {"functional_value", num(w.functional_value)},
          {"constraint_value", num(w.constraint_value)},
          {"fundamental_period", num(w.fundamental_period)},
          {"descent_iterations", w.descent_iterations},
          {"newton_steps", w.newton_steps},
          {"warnings", w.warnings}};
}

WaveProfile wave_from(const json& j) {
  const ProblemParams p = params_from(j.at("params"));
  const int modes = j.at("modes").get<int>();
  const Eigen::VectorXd values = vec(j.at("phi"));
  if (values.size() != modes) throw FormatError(kModule, "phi has " + std::to_string(values.size()) +
                                                             " samples, expected " + std::to_string(modes));
  WaveProfile w{.params = p, .phi = RealField(PeriodicGrid(p.period, modes), values, p.parity)};
  w.multiplier = num(j.at("multiplier"));
  w.ode_residual_norm = num(j.at("ode_residual_norm"));
  w.functional_value = num(j.at("functional_value"));
  w.constraint_value = num(j.at("constraint_value"));
  w.fundamental_period = num(j.at("fundamental_period"));
  w.descent_iterations = j.at("descent_iterations").get<int>();
  w.newton_steps = j.at("newton_steps").get<int>();
  w.warnings = j.at("warnings").get<std::vector<std::string>>();
  return w;
}

json to_j(const SpectrumSummary& s) {
  json j = {{"label", s.label},
            {"eigenvalues", nums(s.eigenvalues)},
            {"n_negative", s.n_negative},
            {"kernel_dimension", s.kernel_dimension},
            {"zero_tolerance", num(s.zero_tolerance)},
            {"ambiguous", s.ambiguous}};
  if (s.lowest_eigenvectors.size() > 0) j["lowest_eigenvectors"] = mat(s.lowest_eigenvectors);
  return j;
}

SpectrumSummary spectrum_from(const json& j) {
  SpectrumSummary s;
  s.label = j.at("label").get<std::string>();
  s.eigenvalues = nums(j.at("eigenvalues"));
  s.n_negative = j.at("n_negative").get<int>();
  s.kernel_dimension = j.at("kernel_dimension").get<int>();
  s.zero_tolerance = num(j.at("zero_tolerance"));
  s.ambiguous = j.at("ambiguous").get<bool>();
  if (j.contains("lowest_eigenvectors")) s.lowest_eigenvectors = mat(j.at("lowest_eigenvectors"));
  return s;
}

json to_j(const PropositionReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"pass", c.passed}, {"expected", c.expected}, {"observed", c.observed}});
  return {{"wave_id", r.wave_id},         {"parity", to_string(r.parity)},
          {"within_hypotheses", r.within_hypotheses}, {"notes", r.notes},
          {"checks", checks},             {"pass", r.passed()}};
}

PropositionReport propositions_from(const json& j) {
  PropositionReport r;
  r.wave_id = j.at("wave_id").get<std::string>();
  r.parity = parity_from_string(j.at("parity").get<std::string>());
  r.within_hypotheses = j.at("within_hypotheses").get<bool>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  for (const auto& c : j.at("checks")) {
    r.checks.push_back({c.at("name").get<std::string>(), c.at("pass").get<bool>(),
                        c.at("expected").get<std::string>(), c.at("observed").get<std::string>()});
  }
  return r;
}

json to_j(const HypothesisCheck& h) { return {{"pass", h.passed}, {"details", h.details}}; }

HypothesisCheck check_from(const json& j) {
  return {j.at("pass").get<bool>(), j.at("details").get<std::string>()};
}

json to_j(const HypothesisReport& r) {
  json h0 = to_j(r.h0);
  h0["max_asymmetry"] = num(r.max_asymmetry);
  json h1 = to_j(r.h1);
  h1["lambda0"] = num(r.lambda0);
  h1["K"] = num(r.K);
  h1["beta"] = num(r.beta);
  h1["verified_grid"] = nums(r.h1_kappas);
  json h3 = to_j(r.h3);
  h3["monotonicity_margin"] = num(r.monotonicity_margin);
  h3["derivative_min"] = num(r.derivative_min);
  json h4 = to_j(r.h4);
  h4["n_negative_S0"] = r.n_negative_S0;
  h4["simplicity_gap"] = num(r.simplicity_gap);
  return {{"wave_id", r.wave_id}, {"sector", to_string(r.sector)},
          {"zero_tolerance", num(r.zero_tolerance)},
          {"h0", h0}, {"h1", h1}, {"h2", to_j(r.h2)}, {"h3", h3}, {"h4", h4},
          {"overall", r.overall()}};
}

HypothesisReport hypotheses_from(const json& j) {
  HypothesisReport r;
  r.wave_id = j.at("wave_id").get<std::string>();
  r.sector = sector_from_string(j.at("sector").get<std::string>());
  r.zero_tolerance = num(j.at("zero_tolerance"));
  const json& h0 = j.at("h0");
  r.h0 = check_from(h0);
  r.max_asymmetry = num(h0.at("max_asymmetry"));
  const json& h1 = j.at("h1");
  r.h1 = check_from(h1);
  r.lambda0 = num(h1.at("lambda0"));
  r.K = num(h1.at("K"));
  r.beta = num(h1.at("beta"));
  r.h1_kappas = nums(h1.at("verified_grid"));
  r.h2 = check_from(j.at("h2"));
  const json& h3 = j.at("h3");
  r.h3 = check_from(h3);
  r.monotonicity_margin = num(h3.at("monotonicity_margin"));
  r.derivative_min = num(h3.at("derivative_min"));
  const json& h4 = j.at("h4");
  r.h4 = check_from(h4);
  r.n_negative_S0 = h4.at("n_negative_S0").get<int>();
  r.simplicity_gap = num(h4.at("simplicity_gap"));
  return r;
}

json to_j(const StabilityScan& s) {
  json records = json::array();
  for (const auto& r : s.records) {
    records.push_back({{"kappa", num(r.kappa)},
                       {"max_real_part", num(r.max_real_part)},
                       {"num_unstable_modes", r.num_unstable_modes},
                       {"leading_lambda", cplx(r.leading_lambda)},
                       {"eigenvalues", cplxs(r.eigenvalues)},
                       {"leading_v1", vec(r.leading_v1)},
                       {"leading_v2", vec(r.leading_v2)},
                       {"product_mismatch", num(r.product_mismatch)},
                       {"symmetry_defect", num(r.symmetry_defect)}});
  }
  return {{"wave_id", s.wave_id},
          {"sector", to_string(s.sector)},
          {"kappa_values", nums(s.kappa_values)},
          {"band_edges", nums(s.band_edges)},
          {"unstable", s.unstable},
          {"max_growth", num(s.max_growth)},
          {"kappa_at_max", num(s.kappa_at_max)},
          {"verdict", s.verdict()},
          {"records", records}};
}

StabilityScan scan_from(const json& j) {
  StabilityScan s;
  s.wave_id = j.at("wave_id").get<std::string>();
  s.sector = sector_from_string(j.at("sector").get<std::string>());
  s.kappa_values = nums(j.at("kappa_values"));
  s.band_edges = nums(j.at("band_edges"));
  s.unstable = j.at("unstable").get<bool>();
  s.max_growth = num(j.at("max_growth"));
  s.kappa_at_max = num(j.at("kappa_at_max"));
  for (const auto& rj : j.at("records")) {
    ScanRecord r;
    r.kappa = num(rj.at("kappa"));
    r.max_real_part = num(rj.at("max_real_part"));
    r.num_unstable_modes = rj.at("num_unstable_modes").get<int>();
    r.leading_lambda = cplx(rj.at("leading_lambda"));
    r.eigenvalues = cplxs(rj.at("eigenvalues"));
    r.leading_v1 = vec(rj.at("leading_v1"));
    r.leading_v2 = vec(rj.at("leading_v2"));
    r.product_mismatch = num(rj.at("product_mismatch"));
    r.symmetry_defect = num(rj.at("symmetry_defect"));
    s.records.push_back(std::move(r));
  }
  return s;
}

json to_j(const GrowthMeasurement& g) {
  return {{"kappa", num(g.kappa)},
          {"fitted_rate", num(g.fitted_rate)},
          {"fit_residual", num(g.fit_residual)},
          {"scanner_lambda", num(g.scanner_lambda)},
          {"relative_gap", num(g.relative_gap)},
          {"accepted", g.accepted()},
          {"window_start", num(g.window_start)},
          {"window_end", num(g.window_end)},
          {"window_complete", g.window_complete},
          {"time_step", num(g.time_step)},
          {"times", nums(g.times)},
          {"norms", nums(g.norms)}};
}

GrowthMeasurement growth_from(const json& j) {
  GrowthMeasurement g;
  g.kappa = num(j.at("kappa"));
  g.fitted_rate = num(j.at("fitted_rate"));
  g.fit_residual = num(j.at("fit_residual"));
  g.scanner_lambda = num(j.at("scanner_lambda"));
  g.relative_gap = num(j.at("relative_gap"));
  g.window_start = num(j.at("window_start"));
  g.window_end = num(j.at("window_end"));
  g.window_complete = j.at("window_complete").get<bool>();
  g.time_step = num(j.at("time_step"));
  g.times = nums(j.at("times"));
  g.norms = nums(j.at("norms"));
  if (g.times.size() != g.norms.size()) throw FormatError(kModule, "times and norms differ in length");
  return g;
}

json to_j(const GridDoubling& d) {
  std::vector<double> deltas;
  for (std::size_t i = 0; i < d.coarse.size() && i < d.fine.size(); ++i)
    deltas.push_back(std::abs(d.fine[i] - d.coarse[i]));
  return {{"modes", d.modes}, {"coarse", nums(d.coarse)}, {"fine", nums(d.fine)},
          {"deltas", nums(deltas)}, {"max_delta", num(d.max_delta)}};
}

GridDoubling doubling_from(const json& j) {
  GridDoubling d;
  d.modes = j.at("modes").get<int>();
  d.coarse = nums(j.at("coarse"));
  d.fine = nums(j.at("fine"));
  d.max_delta = num(j.at("max_delta"));
  return d;
}

json to_j(const PipelineReport& p) {
  json j = {{"verdict", p.verdict},
            {"wave", to_j(p.wave)},
            {"lcal_spectrum", to_j(p.lcal)},
            {"propositions", to_j(p.propositions)},
            {"hypotheses", to_j(p.hypotheses)},
            {"scan", to_j(p.scan)},
            {"grid_doubling", to_j(p.doubling)}};
  if (p.target_amplitude) j["target_amplitude"] = num(*p.target_amplitude);
  if (p.growth) j["growth"] = to_j(*p.growth);
  return j;
}

PipelineReport pipeline_from(const json& j) {
  PipelineReport p{.wave = wave_from(j.at("wave"))};
  p.verdict = j.at("verdict").get<std::string>();
  p.lcal = spectrum_from(j.at("lcal_spectrum"));
  p.propositions = propositions_from(j.at("propositions"));
  p.hypotheses = hypotheses_from(j.at("hypotheses"));
  p.scan = scan_from(j.at("scan"));
  p.doubling = doubling_from(j.at("grid_doubling"));
  if (j.contains("target_amplitude")) p.target_amplitude = num(j.at("target_amplitude"));
  if (j.contains("growth")) p.growth = growth_from(j.at("growth"));
  return p;
}

// ---- envelope -------------------------------------------------------------

std::string wrap(const char* type, json payload) {
  json j = {{"schema_version", kSchemaVersion}, {"type", type}, {"payload", std::move(payload)}};
  return j.dump(2) + "\n";
}

json parse_envelope(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(kModule, "corrupted JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version") || !j.contains("type") || !j.contains("payload"))
    throw FormatError(kModule, "not a record envelope {schema_version, type, payload}");
  if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion)
    throw FormatError(kModule, "unsupported schema_version " + j["schema_version"].dump() +
                                   " (this build reads version " + std::to_string(kSchemaVersion) + ")");
  return j;
}

template <class F>
auto unwrap(const std::string& text, const char* type, F&& from) {
  json j = parse_envelope(text);
  const auto found = j["type"].get<std::string>();
  if (found != type) throw FormatError(kModule, "expected a " + std::string(type) + " record, found " + found);
  try {
    return from(j["payload"]);
  } catch (const json::exception& e) {
    throw FormatError(kModule, std::string("malformed ") + type + " payload: " + e.what());
  } catch (const ParameterError& e) {
    throw FormatError(kModule, std::string("invalid ") + type + " payload: " + e.what());
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize(const WaveProfile& r) { return wrap("WaveProfile", to_j(r)); }
std::string serialize(const SpectrumSummary& r) { return wrap("SpectrumSummary", to_j(r)); }
std::string serialize(const PropositionReport& r) { return wrap("PropositionReport", to_j(r)); }
std::string serialize(const HypothesisReport& r) { return wrap("HypothesisReport", to_j(r)); }
std::string serialize(const StabilityScan& r) { return wrap("StabilityScan", to_j(r)); }
std::string serialize(const GrowthMeasurement& r) { return wrap("GrowthMeasurement", to_j(r)); }
std::string serialize(const GridDoubling& r) { return wrap("GridDoubling", to_j(r)); }
std::string serialize(const PipelineReport& r) { return wrap("PipelineReport", to_j(r)); }

WaveProfile parse_wave(const std::string& t) { return unwrap(t, "WaveProfile", wave_from); }
SpectrumSummary parse_spectrum(const std::string& t) { return unwrap(t, "SpectrumSummary", spectrum_from); }
PropositionReport parse_propositions(const std::string& t) {
  return unwrap(t, "PropositionReport", propositions_from);
}
HypothesisReport parse_hypotheses(const std::string& t) {
  return unwrap(t, "HypothesisReport", hypotheses_from);
}
StabilityScan parse_scan(const std::string& t) { return unwrap(t, "StabilityScan", scan_from); }
GrowthMeasurement parse_growth(const std::string& t) { return unwrap(t, "GrowthMeasurement", growth_from); }
GridDoubling parse_grid_doubling(const std::string& t) { return unwrap(t, "GridDoubling", doubling_from); }
PipelineReport parse_pipeline(const std::string& t) { return unwrap(t, "PipelineReport", pipeline_from); }

std::string record_type(const std::string& text) { return parse_envelope(text)["type"].get<std::string>(); }

std::string eigenvalues_csv(const SpectrumSummary& s) {
  std::string out = "index,eigenvalue\n";
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    out += std::to_string(i) + "," + g17(s.eigenvalues[i]) + "\n";
  return out;
}

std::string scan_csv(const StabilityScan& s) {
  std::string out = "kappa,max_real_part,num_unstable_modes,leading_lambda_re,leading_lambda_im\n";
  for (const auto& r : s.records) {
    out += g17(r.kappa) + "," + g17(r.max_real_part) + "," + std::to_string(r.num_unstable_modes) + "," +
           g17(r.leading_lambda.real()) + "," + g17(r.leading_lambda.imag()) + "\n";
  }
  return out;
}

std::string growth_csv(const GrowthMeasurement& g) {
  std::string out = "t,norm\n";
  for (std::size_t i = 0; i < g.times.size(); ++i) out += g17(g.times[i]) + "," + g17(g.norms[i]) + "\n";
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError(kModule, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParameterError(kModule, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw ParameterError(kModule, "write to '" + path + "' failed");
}

}  // namespace transverse

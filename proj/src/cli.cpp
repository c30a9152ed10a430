// Copyright 2026 The qrb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrb/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "qrb/channels.hpp"
#include "qrb/clifford.hpp"
#include "qrb/qudit_algebra.hpp"

namespace qrb::cli {

namespace fs = std::filesystem;

SpecError::SpecError(std::size_t line, std::string field, const std::string& message)
    : InvalidArgument("line " + std::to_string(line) + (field.empty() ? "" : ", field '" + field + "'") + ": " +
                      message),
      line_(line),
      field_(std::move(field)) {}

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::size_t line = 0;
  std::map<std::string, Entry> entries;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_unsigned(const Entry& e, const std::string& key) {
  T v{};
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw SpecError(e.line, key, "expected a non-negative integer, got '" + e.value + "'");
  return v;
}

double parse_real(const Entry& e, const std::string& key) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw SpecError(e.line, key, "expected a real number, got '" + e.value + "'");
  }
  return v;
}

bool parse_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  throw SpecError(e.line, key, "expected true or false, got '" + e.value + "'");
}

struct ChannelChoice {
  KrausChannel channel;
  std::string label;
};

ChannelChoice parse_channel(const std::string& name, const Section& sec, std::uint32_t d, std::uint32_t n,
                            const fs::path& base_dir) {
  const std::uint32_t dim = ipow(d, n);
  auto model_it = sec.entries.find("model");
  if (model_it == sec.entries.end()) throw SpecError(sec.line, name + ".model", "section needs a model");
  const Entry& model = model_it->second;

  std::map<std::string, bool> allowed{{"model", true}};
  auto need = [&](const std::string& key) -> const Entry& {
    allowed[key] = true;
    auto it = sec.entries.find(key);
    if (it == sec.entries.end()) {
      throw SpecError(model.line, name + "." + key, "model '" + model.value + "' requires " + key);
    }
    return it->second;
  };

  ChannelChoice out{KrausChannel::identity(dim), "identity"};
  if (model.value == "identity" || model.value == "none") {
    // nothing to read
  } else if (model.value == "depolarizing") {
    const Entry& pe = need("p");
    const double p = parse_real(pe, name + ".p");
    try {
      out.channel = depolarizing(p, dim);
    } catch (const InvalidArgument& ex) {
      throw SpecError(pe.line, name + ".p", ex.what());
    }
    out.label = "depolarizing(p=" + format_double(p) + ")";
  } else if (model.value == "over-rotation") {
    const Entry& ae = need("angle");
    const double angle = parse_real(ae, name + ".angle");
    out.channel = over_rotation(angle, d, n);
    out.label = "over-rotation(angle=" + format_double(angle) + ")";
  } else if (model.value == "kraus-file") {
    const Entry& pe = need("path");
    fs::path path = pe.value;
    if (path.is_relative()) path = base_dir / path;
    std::ifstream in(path);
    if (!in) throw SpecError(pe.line, name + ".path", "cannot open '" + path.string() + "'");
    try {
      out.channel = channel_from_json(nlohmann::json::parse(in));
    } catch (const std::exception& ex) {
      throw SpecError(pe.line, name + ".path", std::string("bad Kraus file: ") + ex.what());
    }
    if (out.channel.dim() != dim) {
      throw SpecError(pe.line, name + ".path",
                      "Kraus operators act on dimension " + std::to_string(out.channel.dim()) + ", expected " +
                          std::to_string(dim));
    }
    out.label = "kraus-file(" + pe.value + ")";
  } else {
    throw SpecError(model.line, name + ".model",
                    "unknown model '" + model.value + "' (identity, depolarizing, over-rotation, kraus-file)");
  }
  for (const auto& [key, e] : sec.entries) {
    if (!allowed.count(key)) throw SpecError(e.line, name + "." + key, "not used by model '" + model.value + "'");
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << content;
  if (!os) throw Error("write failed for " + path.string());
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

void print_matrix(std::ostream& out, const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << "  [";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Complex z = m(i, j);
      const double re = std::abs(z.real()) < 1e-12 ? 0.0 : z.real();
      const double im = std::abs(z.imag()) < 1e-12 ? 0.0 : z.imag();
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(4) << re;
      if (im != 0.0) cell << (im < 0 ? "-" : "+") << std::abs(im) << "i";
      out << std::setw(j == 0 ? 8 : 10) << cell.str();
    }
    out << " ]\n";
  }
}

}  // namespace

ExperimentSpec parse_spec(std::string_view text, const fs::path& base_dir) {
  Section top;
  std::map<std::string, Section> sections;
  Section* current = &top;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw SpecError(lineno, "", "unterminated section header");
      const std::string name{trim(line.substr(1, line.size() - 2))};
      if (name != "noise" && name != "spam_prep" && name != "spam_meas") {
        throw SpecError(lineno, name, "unknown section (noise, spam_prep, spam_meas)");
      }
      if (sections.count(name)) throw SpecError(lineno, name, "section given twice");
      current = &sections[name];
      current->line = lineno;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw SpecError(lineno, "", "expected 'key = value'");
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty()) throw SpecError(lineno, "", "missing key before '='");
    if (value.empty()) throw SpecError(lineno, key, "missing value");
    if (current->entries.count(key)) throw SpecError(lineno, key, "given twice");
    current->entries[key] = Entry{value, lineno};
  }

  ExperimentSpec spec;
  RBConfig& c = spec.config;
  const std::map<std::string, int> known{{"qudits", 0},    {"dimension", 0}, {"max_length", 0}, {"sequences", 0},
                                         {"copies", 0},    {"seed", 0},      {"mode", 0},       {"out", 0},
                                         {"plot", 0},      {"log_plot", 0},  {"weighting", 0}};
  for (const auto& [key, e] : top.entries) {
    if (!known.count(key)) throw SpecError(e.line, key, "unknown key");
  }
  auto get = [&](const std::string& key) -> const Entry* {
    auto it = top.entries.find(key);
    return it == top.entries.end() ? nullptr : &it->second;
  };
  auto positive = [&](const std::string& key, std::uint32_t fallback) {
    const Entry* e = get(key);
    if (!e) return fallback;
    const auto v = parse_unsigned<std::uint32_t>(*e, key);
    if (v == 0) throw SpecError(e->line, key, "must be positive");
    return v;
  };

  c.qudits = positive("qudits", 1);
  c.dimension = positive("dimension", 3);
  if (!is_prime(c.dimension)) {
    const Entry* e = get("dimension");
    throw SpecError(e ? e->line : 0, "dimension",
                    std::to_string(c.dimension) + " is not prime; only prime qudit dimensions are supported");
  }
  try {
    if (ipow(c.dimension, c.qudits) > 4096) throw InvalidArgument("");
  } catch (const InvalidArgument&) {
    const Entry* e = get("qudits");
    throw SpecError(e ? e->line : 0, "qudits", "d^n exceeds the dense simulation limit of 4096");
  }
  c.max_length = positive("max_length", 20);
  if (c.max_length < 5) {
    throw SpecError(get("max_length")->line, "max_length", "must be at least 5 so the fit sees four lengths");
  }
  c.sequences = positive("sequences", 100);
  c.copies = positive("copies", 1000);
  if (const Entry* e = get("seed")) c.seed = parse_unsigned<std::uint64_t>(*e, "seed");
  if (const Entry* e = get("mode")) {
    if (e->value == "exact") {
      c.mode = RBMode::exact;
    } else if (e->value == "sampled") {
      c.mode = RBMode::sampled;
    } else {
      throw SpecError(e->line, "mode", "expected sampled or exact, got '" + e->value + "'");
    }
  }
  if (const Entry* e = get("out")) {
    spec.out_dir = e->value;
    if (spec.out_dir.is_relative()) spec.out_dir = base_dir / spec.out_dir;
  }
  if (const Entry* e = get("plot")) spec.emit_plot = parse_bool(*e, "plot");
  if (const Entry* e = get("log_plot")) spec.log_plot = parse_bool(*e, "log_plot");
  if (const Entry* e = get("weighting")) {
    if (e->value == "none") {
      spec.weighting = Weighting::none;
    } else if (e->value == "inverse-variance") {
      spec.weighting = Weighting::inverse_variance;
    } else {
      throw SpecError(e->line, "weighting", "expected none or inverse-variance, got '" + e->value + "'");
    }
  }

  c.noise = KrausChannel::identity(c.hilbert_dim());
  if (auto it = sections.find("noise"); it != sections.end()) {
    auto ch = parse_channel("noise", it->second, c.dimension, c.qudits, base_dir);
    c.noise = std::move(ch.channel);
    spec.noise_label = ch.label;
  }
  if (auto it = sections.find("spam_prep"); it != sections.end()) {
    auto ch = parse_channel("spam_prep", it->second, c.dimension, c.qudits, base_dir);
    c.spam_prep = std::move(ch.channel);
    spec.spam_prep_label = ch.label;
  }
  if (auto it = sections.find("spam_meas"); it != sections.end()) {
    auto ch = parse_channel("spam_meas", it->second, c.dimension, c.qudits, base_dir);
    c.spam_meas = std::move(ch.channel);
    spec.spam_meas_label = ch.label;
  }
  c.validate();
  return spec;
}

ExperimentSpec load_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read spec file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec(text.str(), path.parent_path());
}

RunReport analyze(const RBDataset& data, Weighting weighting) {
  const auto lengths = data.lengths();
  const auto means = data.means();
  const std::uint32_t d = data.config.dimension, n = data.config.qudits;
  const double dim = data.config.hilbert_dim();

  std::vector<double> weights;
  const bool weighted = weighting == Weighting::inverse_variance && data.config.mode == RBMode::sampled;
  if (weighted) weights = inverse_variance_weights(means, data.shots());

  RunReport report;
  try {
    report.fit = weighted ? fit_decay(lengths, means, std::span<const double>(weights)) : fit_decay(lengths, means);
  } catch (const FlatCurveError&) {
    report.identifiable = false;
    double level = 0.0;
    for (double m : means) level += m;
    level /= static_cast<double>(means.size());
    DecayFit& f = report.fit;
    if (level >= 0.5 * (1.0 + 1.0 / dim)) {
      f.p = 1.0;
      f.B0 = 1.0 / dim;
      f.A0 = level - f.B0;
    } else {
      f.p = 0.0;
      f.A0 = 0.0;
      f.B0 = level;
    }
    double ss = 0.0;
    for (double m : means) ss += (m - level) * (m - level);
    f.residual_rms = std::sqrt(ss / static_cast<double>(means.size()));
    f.converged = false;
  }
  report.p_hat = report.fit.p;
  report.r_hat = error_rate_from_p(report.p_hat, d, n);

  const RBConfig& c = data.config;
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["code_version"] = data.code_version;
  j["generated_at"] = utc_timestamp();
  j["dimension"] = d;
  j["qudits"] = n;
  j["mode"] = c.mode == RBMode::exact ? "exact" : "sampled";
  j["seed"] = c.seed;
  j["max_length"] = c.max_length;
  j["sequences"] = c.sequences;
  j["copies"] = c.mode == RBMode::exact ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.copies);
  j["weighting"] = weighted ? "inverse-variance" : "none";
  j["identifiable"] = report.identifiable;
  j["p_hat"] = report.p_hat;
  j["A0_hat"] = report.fit.A0;
  j["B0_hat"] = report.fit.B0;
  j["r_hat"] = report.r_hat;
  j["average_fidelity_hat"] = average_fidelity_from_p(report.p_hat, d, n);
  const double var_p = report.fit.covariance(1, 1);
  j["p_hat_stderr"] = var_p > 0.0 ? std::sqrt(var_p) : 0.0;
  j["r_hat_stderr"] = var_p > 0.0 ? std::sqrt(var_p) * (1.0 - 1.0 / dim) : 0.0;
  j["fit"] = fit_to_json(report.fit);
  report.json = std::move(j);
  return report;
}

std::string render_svg(const RBDataset& data, const RunReport& report, bool log_y) {
  const double W = 640, H = 420, left = 70, right = 20, top = 30, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;
  const auto lengths = data.lengths();
  const auto means = data.means();
  const double xmin = 1.0, xmax = lengths.back() + 1.0;
  const DecayFit& f = report.fit;

  auto value = [&](double v) { return log_y ? v - f.B0 : v; };
  double ylo = 0.0, yhi = 1.0;
  if (log_y) {
    double lo = 1.0, hi = 1e-300;
    for (double m : means) {
      const double v = value(m);
      if (v > 0) lo = std::min(lo, v), hi = std::max(hi, v);
    }
    hi = std::max(hi, f.A0 * f.p);
    if (hi <= 0) hi = 1.0;
    if (lo >= hi) lo = hi / 10;
    ylo = std::floor(std::log10(lo));
    yhi = std::ceil(std::log10(hi));
    if (yhi <= ylo) yhi = ylo + 1;
  }
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double v) {
    const double t = log_y ? (std::log10(v) - ylo) / (yhi - ylo) : (v - ylo) / (yhi - ylo);
    return top + (1.0 - t) * ph;
  };

  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double span = xmax - xmin;
  double step = 1;
  for (double s : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0}) {
    step = s;
    if (span / s <= 10) break;
  }
  for (double x = step * std::ceil(xmin / step); x <= xmax; x += step) {
    os << "<line x1=\"" << sx(x) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(x) << "\" y2=\"" << top + ph + 5
       << "\" stroke=\"black\"/><text x=\"" << sx(x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
       << x << "</text>\n";
  }
  if (log_y) {
    for (double e = ylo; e <= yhi; e += 1) {
      os << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(std::pow(10, e)) << "\" x2=\"" << left << "\" y2=\""
         << sy(std::pow(10, e)) << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << sy(std::pow(10, e)) + 4
         << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double v = i / 5.0;
      os << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(v) << "\" x2=\"" << left << "\" y2=\"" << sy(v)
         << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << sy(v) + 4 << "\" text-anchor=\"end\">" << v
         << "</text>\n";
    }
  }

  os << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
  const int samples = 200;
  for (int i = 0; i <= samples; ++i) {
    const double x = lengths.front() + (lengths.back() - lengths.front()) * i / samples;
    const double v = value(f.model(x));
    if (log_y && v <= 0) continue;
    os << sx(x) << ',' << sy(v) << ' ';
  }
  os << "\"/>\n";
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double v = value(means[i]);
    if (log_y && v <= 0) continue;
    os << "<circle cx=\"" << sx(lengths[i]) << "\" cy=\"" << sy(v) << "\" r=\"3\" fill=\"#2c3e50\"/>\n";
  }

  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">sequence length j</text>\n";
  os << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << (log_y ? "mean survival minus fitted offset" : "mean survival") << "</text>\n";
  os << "<text x=\"" << left + pw << "\" y=\"" << top - 10 << "\" text-anchor=\"end\">d=" << data.config.dimension
     << " n=" << data.config.qudits << "  p=" << fmt(report.p_hat, 6) << "  r=" << fmt(report.r_hat, 4)
     << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

int cmd_run(const fs::path& spec_path, const RunOptions& options, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  try {
    spec = load_spec(spec_path);
    if (options.seed) spec.config.seed = *options.seed;
    if (options.exact) spec.config.mode = RBMode::exact;
    if (options.out_dir) spec.out_dir = *options.out_dir;
    if (options.emit_plot) spec.emit_plot = true;
  } catch (const InvalidArgument& e) {
    err << "qrb run: " << spec_path.string() << ": " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "qrb run: " << e.what() << '\n';
    return kRuntimeFailure;
  }

  try {
    const RBDataset data = run_rb(spec.config);
    const RunReport report = analyze(data, spec.weighting);
    nlohmann::ordered_json fit_json = report.json;
    fit_json["noise"] = spec.noise_label;
    fit_json["spam_prep"] = spec.spam_prep_label.empty() ? nlohmann::ordered_json(nullptr)
                                                         : nlohmann::ordered_json(spec.spam_prep_label);
    fit_json["spam_meas"] = spec.spam_meas_label.empty() ? nlohmann::ordered_json(nullptr)
                                                         : nlohmann::ordered_json(spec.spam_meas_label);

    fs::create_directories(spec.out_dir);
    write_file(spec.out_dir / "dataset.json", dataset_to_json(data).dump(2) + "\n");
    write_file(spec.out_dir / "dataset.csv", dataset_to_csv(data));
    write_file(spec.out_dir / "fit.json", fit_json.dump(2) + "\n");
    if (spec.emit_plot) write_file(spec.out_dir / "decay.svg", render_svg(data, report, spec.log_plot));

    out << "wrote " << (spec.out_dir / "dataset.json").string() << ", dataset.csv, fit.json"
        << (spec.emit_plot ? ", decay.svg" : "") << '\n';
    out << "p_hat = " << fmt(report.p_hat, 10) << "  A0_hat = " << fmt(report.fit.A0, 10)
        << "  B0_hat = " << fmt(report.fit.B0, 10) << '\n';
    if (!report.identifiable) out << "note: decay curve is flat; p is not identifiable from these data\n";
    out << format_double(report.r_hat) << '\n';
    return kOk;
  } catch (const InvalidArgument& e) {
    err << "qrb run: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "qrb run: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

namespace {

void verify_design(std::ostream& out, std::vector<std::string>& failures) {
  Rng rng(2026);
  for (std::uint32_t d : {2u, 3u}) {
    const auto group = enumerate_group(d, 1);
    const double fp = frame_potential(group);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const KrausChannel ch = random_channel(d, d, rng);
      const Superoperator tw = twirl(ch, group);
      const double p = depolarizing_parameter(average_fidelity(ch), d);
      worst = std::max(worst, (tw.matrix() - depolarizing_superoperator(p, d).matrix()).norm());
    }
    out << "Clifford group d=" << d << " n=1: " << group.size() << " elements, frame potential "
        << std::setprecision(15) << fp << ", twirl residual " << std::setprecision(3) << worst << '\n';
    if (std::abs(fp - 2.0) > 1e-9) failures.push_back("frame potential for d=" + std::to_string(d) + " is not 2");
    if (worst > 1e-9) failures.push_back("twirl over d=" + std::to_string(d) + " is not depolarizing");
  }
  std::vector<CMatrix> paulis;
  for (std::uint32_t a = 0; a < 3; ++a) {
    for (std::uint32_t b = 0; b < 3; ++b) paulis.push_back(pauli_to_dense(PauliOperator(3, {a}, {b})));
  }
  const double fp = frame_potential(paulis);
  out << "qutrit Pauli group (9 elements): frame potential " << std::setprecision(15) << fp << " (control, > 2)\n";
  if (!(fp > 2.0 + 1e-9)) failures.push_back("Pauli control does not exceed 2");
}

void verify_counterexample(std::ostream& out, std::vector<std::string>& failures) {
  const CMatrix h = gate(GateKind::F, 2);
  const SymmetricBlock block = symmetric_block(kron(h, h));
  const CMatrix& r = block.sym;
  const CMatrix x = gate(GateKind::X, 3);
  const CMatrix conj = r * x * r.adjoint();
  const CMatrix sandwich = r * x * r;
  out << "R (H x H on the symmetric sector):\n";
  print_matrix(out, r);
  out << "singlet eigenvalue: " << std::setprecision(6) << block.antisym.real() << ", off-diagonal norm "
      << block.offdiag_norm << '\n';
  out << "R X R^dagger:\n";
  print_matrix(out, conj);
  out << "R X R:\n";
  print_matrix(out, sandwich);
  const bool member = pauli_membership(conj, 3, 1).has_value();
  const bool member_sandwich = pauli_membership(sandwich, 3, 1).has_value();
  out << "R X R^dagger in the qutrit Pauli group: " << (member ? "present" : "absent") << '\n';
  out << "R X R in the qutrit Pauli group: " << (member_sandwich ? "present" : "absent") << '\n';
  if (member || member_sandwich) failures.push_back("R maps X into the Pauli group");
  if (block.offdiag_norm > 1e-12) failures.push_back("H x H mixes the symmetric and antisymmetric sectors");
  if (std::abs(block.antisym - Complex(-1.0, 0.0)) > 1e-12) failures.push_back("singlet eigenvalue is not -1");
}

void verify_cardinality(std::ostream& out, std::vector<std::string>& failures) {
  std::vector<std::string> sizes;
  bool all = true;
  for (std::uint32_t d : {2u, 3u, 5u}) {
    const auto group = enumerate_group(d, 1);
    const std::uint64_t expected = clifford_group_order(d, 1);
    out << "d=" << d << " n=1: enumerated " << group.size() << ", d^3(d^2-1) = " << expected << '\n';
    sizes.push_back(std::to_string(group.size()));
    if (group.size() != expected) {
      all = false;
      failures.push_back("group order mismatch for d=" + std::to_string(d));
    }
  }
  out << sizes[0] << ", " << sizes[1] << ", " << sizes[2] << (all ? " - all match" : " - MISMATCH") << '\n';
}

}  // namespace

int cmd_verify(std::string_view suite, std::ostream& out, std::ostream& err) {
  std::vector<std::string> failures;
  try {
    if (suite == "design" || suite == "all") verify_design(out, failures);
    if (suite == "counterexample" || suite == "all") verify_counterexample(out, failures);
    if (suite == "cardinality" || suite == "all") verify_cardinality(out, failures);
    if (suite != "design" && suite != "counterexample" && suite != "cardinality" && suite != "all") {
      err << "qrb verify: unknown suite '" << suite << "' (design, counterexample, cardinality, all)\n";
      return kInvalidInput;
    }
  } catch (const std::exception& e) {
    err << "qrb verify: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  if (!failures.empty()) {
    for (const auto& f : failures) err << "FAILED: " << f << '\n';
    return kVerificationFailure;
  }
  out << "verify " << suite << ": ok\n";
  return kOk;
}

int cmd_enumerate(std::uint32_t d, std::uint32_t n, const std::optional<fs::path>& cache, std::ostream& out,
                  std::ostream& err) {
  try {
    if (!is_prime(d)) throw Unsupported(std::to_string(d) + " is not prime; only prime qudit dimensions are supported");
    std::optional<CliffordGroupTable> group;
    if (cache && fs::exists(*cache)) {
      group.emplace(load_group_cache(*cache));
      if (group->d() != d || group->n() != n) {
        err << "qrb enumerate: cache " << cache->string() << " holds d=" << group->d() << " n=" << group->n() << '\n';
        return kInvalidInput;
      }
      out << "loaded " << cache->string() << '\n';
    } else {
      group.emplace(enumerate_group(d, n));
      if (cache) {
        save_group_cache(*group, *cache);
        out << "wrote " << cache->string() << '\n';
      }
    }
    const std::uint64_t expected = clifford_group_order(d, n);
    out << "d=" << d << " n=" << n << ": " << group->size() << " elements, expected " << expected << '\n';
    if (group->size() != expected) return kVerificationFailure;
    return kOk;
  } catch (const InvalidArgument& e) {
    err << "qrb enumerate: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const SizeError& e) {
    err << "qrb enumerate: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "qrb enumerate: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Qudit randomized benchmarking simulator"};
  app.name("qrb");
  app.require_subcommand(1);

  std::string spec_path;
  std::uint64_t seed = 0;
  RunOptions run_opts;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run an experiment spec and fit the decay");
  run->add_option("spec", spec_path, "experiment spec file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override the spec seed");
  run->add_flag("--exact", run_opts.exact, "infinite-shot evaluation");
  auto* out_opt = run->add_option("--out", out_dir, "output directory");
  run->add_flag("--emit-plot", run_opts.emit_plot, "write decay.svg");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a built-in check");
  verify->add_option("suite", suite, "design, counterexample, cardinality or all")
      ->required()
      ->check(CLI::IsMember({"design", "counterexample", "cardinality", "all"}));

  std::uint32_t d = 0, n = 0;
  std::string cache;
  auto* enumerate = app.add_subcommand("enumerate", "Enumerate a Clifford group");
  enumerate->add_option("d", d, "prime qudit dimension")->required();
  enumerate->add_option("n", n, "number of qudits")->required()->check(CLI::PositiveNumber);
  auto* cache_opt = enumerate->add_option("--cache", cache, "binary group cache to load or write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  if (run->parsed()) {
    if (seed_opt->count()) run_opts.seed = seed;
    if (out_opt->count()) run_opts.out_dir = out_dir;
    return cmd_run(spec_path, run_opts, out, err);
  }
  if (verify->parsed()) return cmd_verify(suite, out, err);
  std::optional<fs::path> cache_path;
  if (cache_opt->count()) cache_path = cache;
  return cmd_enumerate(d, n, cache_path, out, err);
}

}  // namespace qrb::cli

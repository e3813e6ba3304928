#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "kmx/io.hpp"
#include "kmx/linalg.hpp"

namespace kmx::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, sep)) out.push_back(item);
  return out;
}

int parse_sl(const std::string& token) {
  if (token.rfind("sl(", 0) != 0 || token.back() != ')')
    throw Error("cannot parse algebra '" + token + "' (expected sl(n))");
  const int n = std::stoi(token.substr(3, token.size() - 4));
  if (n < 2) throw Error("algebra rank out of range in '" + token + "'");
  return n;
}

Complex parse_scalar(const std::string& s) {
  const std::string t = trim(s);
  if (t.find('j') != std::string::npos) return parse_complex(t);
  return Complex(std::stod(t), 0.0);
}

std::string format_scalar(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12e", x);
  return buf;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("config: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "algebra")
      cfg.algebra = val;
    else if (key == "k_family")
      cfg.k_family = val;
    else if (key == "r_matrix")
      cfg.r_matrix = val;
    else if (key == "spectral_samples")
      cfg.spectral_samples = std::stoi(val);
    else if (key == "seed")
      cfg.seed = static_cast<unsigned>(std::stoul(val));
    else if (key == "tolerance")
      cfg.tolerance = std::stod(val);
    else if (key == "order")
      cfg.order = std::stoi(val);
    else if (key == "output_dir")
      cfg.output_dir = val;
    else
      throw FormatError("config: unknown key '" + key + "'");
  }
  if (cfg.tolerance <= 0) throw FormatError("config: tolerance must be positive");
  if (cfg.order < 1) throw FormatError("config: order must be >= 1");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open config file " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

KMatrix resolve_family(const std::string& address) {
  const auto parts = split(address, ':');
  if (parts.empty()) throw Error("empty K-family address");
  const std::string& kind = parts[0];
  if (kind == "diag") {
    if (parts.size() != 4) throw Error("diag address must be diag:sl(n):p,q:xi=...");
    const int n = parse_sl(parts[1]);
    const auto pq = split(parts[2], ',');
    if (pq.size() != 2) throw Error("diag address needs p,q");
    const int p = std::stoi(pq[0]);
    const int q = std::stoi(pq[1]);
    if (parts[3].rfind("xi=", 0) != 0) throw Error("diag address needs xi=...");
    return diagonal_k(n, p, q, parse_scalar(parts[3].substr(3)));
  }
  if (kind == "twist-const") {
    if (parts.size() != 3) throw Error("twist-const address must be twist-const:sl(n):sym|skew");
    const int n = parse_sl(parts[1]);
    if (parts[2] == "sym") return constant_twisted_k(n, Matrix::Identity(n, n));
    if (parts[2] == "skew") {
      if (n % 2 != 0) throw Error("skew twisted family requires even n");
      Matrix omega = Matrix::Zero(n, n);
      for (int a = 0; a < n / 2; ++a) {
        omega(2 * a, 2 * a + 1) = 1.0;
        omega(2 * a + 1, 2 * a) = -1.0;
      }
      return constant_twisted_k(n, omega);
    }
    throw Error("twist-const variant must be sym or skew");
  }
  if (kind == "nilpotent") {
    if (parts.size() != 3 || parts[2].rfind("k=", 0) != 0) throw Error("nilpotent address must be nilpotent:sl(n):k=...");
    return nilpotent_k(parse_sl(parts[1]), std::stoi(parts[2].substr(2)));
  }
  if (kind == "custom") {
    if (parts.size() != 2 || parts[1].rfind("file=", 0) != 0) throw Error("custom address must be custom:file=PATH");
    return custom_k_from_series(load_series(parts[1].substr(5)));
  }
  throw Error("unknown K-family '" + kind + "'");
}

RMatrix resolve_rmatrix(const std::string& address) {
  const auto parts = split(address, ':');
  if (parts.empty()) throw Error("empty R-matrix address");
  if (parts[0] == "yang" && parts.size() == 2) return yang_r(parse_sl(parts[1]));
  if (parts[0] == "yang-crossed" && parts.size() >= 2) {
    const int n = parse_sl(parts[1]);
    if (parts.size() == 3 && parts[2] != "auto-gamma") throw Error("yang-crossed supports only auto-gamma");
    return crossed_r(yang_r(n), find_crossing(n));
  }
  throw Error("unknown R-matrix '" + address + "'");
}

Complex SpectralSampler::next() {
  std::uniform_real_distribution<double> radius(0.3, 3.0);
  std::uniform_real_distribution<double> angle(0.15, M_PI - 0.15);
  std::uniform_int_distribution<int> sign(0, 1);
  const double th = angle(rng_) * (sign(rng_) ? 1.0 : -1.0);
  return radius(rng_) * Complex(std::cos(th), std::sin(th));
}

std::pair<Complex, Complex> SpectralSampler::next_pair() {
  for (int tries = 0; tries < 256; ++tries) {
    const Complex u = next();
    const Complex v = next();
    if (std::abs(u - v) > 0.1 && std::abs(u + v) > 0.1) return {u, v};
  }
  throw SamplingError("SpectralSampler: could not find a pole-free pair");
}

namespace {

struct ReportSink {
  std::vector<CheckResult> checks;
  std::ostringstream header;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  std::string text() const {
    std::ostringstream os;
    os << header.str();
    for (const auto& c : checks)
      os << "check \"" << c.name << "\" residual=" << format_scalar(c.residual)
         << " tol=" << format_scalar(c.tolerance) << " " << (c.pass ? "PASS" : "FAIL") << "\n";
    os << "all_pass = " << (all_pass() ? "yes" : "no") << "\n";
    return os.str();
  }
};

void write_text(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream os(std::filesystem::path(dir) / name);
  if (!os) throw FormatError("cannot write report to " + dir);
  os << text;
}

}  // namespace

int cmd_verify(const RunConfig& cfg) {
  ReportSink sink;
  sink.header << "command = verify\n";
  try {
    if (cfg.k_family.empty() && !cfg.r_matrix.empty()) {
      const RMatrix R = resolve_rmatrix(cfg.r_matrix);
      sink.header << "r_matrix = " << cfg.r_matrix << "\nseed = " << cfg.seed
                  << "\nsamples = " << cfg.spectral_samples << "\ntolerance = " << format_scalar(cfg.tolerance)
                  << "\n";
      SpectralSampler sampler(cfg.seed);
      double worst = 0.0;
      for (int i = 0; i < cfg.spectral_samples; ++i) {
        const auto [u, v] = sampler.next_pair();
        worst = std::max(worst, ybe_residual(R, R, R, u, v));
      }
      sink.checks.push_back(make_check("Yang-Baxter max residual", worst, cfg.tolerance));
    } else {
      const KMatrix K = resolve_family(cfg.k_family);
      sink.header << "k_family = " << cfg.k_family << "\nseed = " << cfg.seed
                  << "\nsamples = " << cfg.spectral_samples << "\ntolerance = " << format_scalar(cfg.tolerance)
                  << "\n";
      const RMatrixQuad quad = reflection_quad(K);
      SpectralSampler sampler(cfg.seed);
      double worst = 0.0;
      for (int i = 0; i < cfg.spectral_samples; ++i) {
        const auto [u, v] = sampler.next_pair();
        worst = std::max(worst, bybe_residual(quad, K, u, v));
      }
      sink.checks.push_back(make_check("bYBE max residual", worst, cfg.tolerance));

      const Matrix kappa = K.kappa();
      if (K.family == "diag") {
        const Matrix I = Matrix::Identity(kappa.rows(), kappa.cols());
        sink.checks.push_back(make_check("kappa^2 = 1", (kappa * kappa - I).norm(), 1e-12));
      } else if (K.family == "twist-const") {
        double defect = 0.0;
        SpectralSampler s2(cfg.seed + 1);
        for (int i = 0; i < 5; ++i) defect = std::max(defect, crossing_defect(quad.r11, *quad.r12.crossing, s2.next()));
        sink.checks.push_back(make_check("crossing unitarity at searched gamma", defect, cfg.tolerance));
      } else if (K.family == "nilpotent") {
        sink.checks.push_back(make_check("kappa^2 = 0", (kappa * kappa).norm(), 0.0));
        SpectralSampler s2(cfg.seed + 1);
        double unit = 0.0;
        const Matrix I = Matrix::Identity(K.d(), K.d());
        for (int i = 0; i < cfg.spectral_samples; ++i) {
          const Complex u = s2.next();
          unit = std::max(unit, (K.fn.eval(u) * K.fn.eval(-u) + I / (u * u)).norm());
        }
        sink.checks.push_back(make_check("unitarity K(u)K(-u) = -1/u^2", unit, 1e-12));
      }
    }
  } catch (const Error& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return 2;
  }
  const std::string text = sink.text();
  std::cout << text;
  write_text(cfg.output_dir, "verify_report.txt", text);
  return sink.all_pass() ? 0 : 1;
}

int cmd_classify(const RunConfig& cfg) {
  ClassificationReport rep;
  try {
    const KMatrix K = resolve_family(cfg.k_family);
    rep = classify_kmatrix(K);
  } catch (const Error& e) {
    std::cerr << "classify: " << e.what() << "\n";
    return 2;
  }
  const std::string text = report_to_text(rep);
  std::cout << text;
  write_text(cfg.output_dir, "classify_report.txt", text);
  write_text(cfg.output_dir, "classify_report.json", report_to_json(rep));
  return rep.all_pass() ? 0 : 1;
}

int cmd_solve(const RunConfig& cfg) {
  std::ostringstream os;
  PerturbativeResult result;
  try {
    const KMatrix K = resolve_family(cfg.k_family);
    const Matrix kappa = K.kappa();
    if (!is_invertible(kappa)) {
      std::cerr << "solve: kappa is singular (not quasi-classical)\n";
      return 2;
    }
    const RMatrixQuad quad = reflection_quad(K);
    result = perturbative_solve(kappa, quad, cfg.order, cfg.tolerance);
    os << "command = solve\nk_family = " << cfg.k_family << "\norder = " << cfg.order << "\n";
    os << "nullspace_dims =";
    for (int dmm : result.nullspace_dims) os << " " << dmm;
    os << "\n";
    for (size_t r = 0; r < result.particular.size(); ++r)
      os << "particular_norm[" << (r + 1) << "] = " << format_scalar(result.particular[r].norm()) << "\n";
    for (const auto& a : result.anomalies) os << "anomaly: " << a << "\n";
    os << "anomalies = " << result.anomalies.size() << "\n";
  } catch (const NotQuasiClassicalError& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return 2;
  }
  const std::string text = os.str();
  std::cout << text;
  write_text(cfg.output_dir, "solve_report.txt", text);
  return result.anomalies.empty() ? 0 : 1;
}

int cmd_crossing(const RunConfig& cfg) {
  try {
    const int n = parse_sl(cfg.algebra.empty() ? "sl(2)" : cfg.algebra);
    const Complex gamma = find_crossing(n);
    std::cout << "crossing sl(" << n << ") gamma = " << format_complex(gamma) << "\n";
  } catch (const Error& e) {
    std::cerr << "crossing: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cmd_report(const std::string& json_path) {
  std::ifstream is(json_path);
  if (!is) {
    std::cerr << "report: cannot open " << json_path << "\n";
    return 2;
  }
  std::ostringstream buf;
  buf << is.rdbuf();
  try {
    const auto j = nlohmann::json::parse(buf.str());
    std::cout << "family = " << j.value("family", std::string("?")) << "\n";
    std::cout << "quasi_classical = " << (j.value("quasi_classical", false) ? "yes" : "no") << "\n";
    std::cout << "twist_class = " << j.value("twist_class", std::string("?")) << "\n";
    if (j.contains("residual_algebra")) {
      std::cout << "residual_algebra.dim = " << j["residual_algebra"].value("dim", -1) << "\n";
      std::cout << "residual_algebra.tag = " << j["residual_algebra"].value("tag", std::string("?")) << "\n";
    }
    for (const auto& c : j.value("checks", nlohmann::json::array()))
      std::cout << "check \"" << c.value("name", std::string("?")) << "\" residual=" << c.value("residual", 0.0)
                << " " << (c.value("pass", false) ? "PASS" : "FAIL") << "\n";
    std::cout << "all_pass = " << (j.value("all_pass", false) ? "yes" : "no") << "\n";
  } catch (const std::exception& e) {
    std::cerr << "report: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace kmx::cli

#include "edgelab/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "edgelab/diagnostics.hpp"
#include "edgelab/error.hpp"
#include "edgelab/version.hpp"
#include "json.hpp"

namespace edgelab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidInput, what + ": cannot parse '" + text + "' as a number");
  }
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw Error(ErrorKind::InvalidInput, what + ": cannot parse '" + text + "' as an integer");
  }
  return v;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(item, what));
  if (out.empty()) throw Error(ErrorKind::InvalidInput, what + ": empty list");
  return out;
}

// Shortest round-trip representation; identical inputs give identical bytes.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

KindHint kind_hint(const std::string& kind) {
  if (kind == "auto") return KindHint::Auto;
  if (kind == "one-cut") return KindHint::OneCut;
  if (kind == "two-cut") return KindHint::TwoCut;
  throw Error(ErrorKind::InvalidInput, "kind must be auto, one-cut or two-cut, got '" + kind + "'");
}

class Session {
 public:
  Session(RunConfig config, std::ostream& out) : cfg_(std::move(config)), out_(out), hash_(config_hash(cfg_)) {
    std::error_code ec;
    fs::create_directories(cfg_.output_dir, ec);
    if (ec || !fs::is_directory(cfg_.output_dir)) {
      throw Error(ErrorKind::InvalidInput, "output directory '" + cfg_.output_dir + "' is not writable");
    }
  }

  int dispatch() {
    const auto& c = cfg_.command;
    if (c == "equilibrium") return equilibrium();
    if (c == "recurrence") return recurrence();
    if (c == "kernel-edge") return kernel_edge();
    if (c == "tw") return tw();
    if (c == "hole-prob") return hole_prob();
    if (c == "verify") return verify();
    if (c == "airy") return airy();
    throw Error(ErrorKind::InvalidInput, "unknown subcommand '" + c + "'");
  }

 private:
  json provenance() const {
    json modules = json::object();
    for (const auto& [name, version] : kModuleVersions) modules[std::string(name)] = std::string(version);
    return {{"config_hash", hash_},
            {"version", std::string(kVersion)},
            {"modules", modules},
            {"config", cfg_.canonical()},
            {"command", cfg_.command}};
  }

  std::string csv_header(const std::string& columns) const {
    std::string modules;
    for (const auto& [name, version] : kModuleVersions) {
      modules += (modules.empty() ? "" : ",") + std::string(name) + "=" + std::string(version);
    }
    return "# edge-lab " + cfg_.command + " config_hash=" + hash_ + " version=" + std::string(kVersion) +
           " modules=" + modules + "\n" + columns + "\n";
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = fs::path(cfg_.output_dir) / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot write '" + path.string() + "'");
    out_ << "wrote " << path.string() << "\n";
  }

  void write_json(const std::string& name, json body) {
    body["provenance"] = provenance();
    write(name, body.dump(2) + "\n");
  }

  const Potential& potential() {
    if (cfg_.potential.empty()) throw Error(ErrorKind::InvalidInput, "--potential is required for " + cfg_.command);
    if (!potential_) potential_ = parse_potential(cfg_.potential);
    return *potential_;
  }

  const EquilibriumMeasure& eq() {
    if (!eq_) eq_ = solve_equilibrium(potential(), kind_hint(cfg_.kind));
    return *eq_;
  }

  std::vector<int> n_values(const char* command) const {
    if (cfg_.n_list.empty()) throw Error(ErrorKind::InvalidInput, std::string("--n or --n-list is required for ") + command);
    for (int n : cfg_.n_list) {
      if (n < 1) throw Error(ErrorKind::InvalidInput, "n must be positive, got " + std::to_string(n));
    }
    return cfg_.n_list;
  }

  RecurrenceTable table(int n) { return build_recurrence(potential(), n); }

  FredholmOptions fredholm_options() const {
    FredholmOptions o;
    o.quad_order = cfg_.quad_order;
    o.tol = cfg_.tol;
    return o;
  }

  static json edge_json(const EdgeConstants& e) {
    return {{"endpoint", e.endpoint}, {"side", to_string(e.side)}, {"c", e.c},         {"alpha", e.alpha},
            {"gamma", e.gamma},       {"kappa", e.kappa},          {"ahalf", e.ahalf()}, {"slope", e.slope()}};
  }

  int equilibrium() {
    const auto& m = eq();
    const auto& g = m.support();
    json edges = json::array();
    for (std::size_t i = 0; i < m.endpoints().size(); ++i) edges.push_back(edge_json(m.edge_constants(i)));
    json body = {{"potential", m.potential().to_spec()},
                 {"kind", to_string(g.kind)},
                 {"a", g.a},
                 {"b", g.b},
                 {"shift", g.shift},
                 {"endpoints", m.endpoints()},
                 {"master_polynomial", m.p_coeffs()},
                 {"energy", m.energy()},
                 {"edges", edges}};
    if (g.kind == SupportKind::OneCut) body["gamma"] = m.right_edge().gamma;
    write_json("equilibrium.json", body);

    std::string csv = csv_header("lambda,rho");
    const double lo = m.left_endpoint(), hi = m.right_endpoint();
    const int points = 801;
    for (int i = 0; i < points; ++i) {
      const double x = lo + (hi - lo) * i / (points - 1);
      csv += num(x) + "," + num(m.density(x)) + "\n";
    }
    write("equilibrium_density.csv", csv);
    out_ << "kind=" << to_string(g.kind) << " a=" << num(g.a);
    if (g.kind == SupportKind::TwoCut) out_ << " b=" << num(g.b);
    out_ << "\n";
    return kOk;
  }

  int recurrence() {
    for (int n : n_values("recurrence")) {
      const auto t = table(n);
      std::string csv = csv_header("l,J,q");
      for (int l = 0; l <= t.n1(); ++l) csv += std::to_string(l) + "," + num(t.J()[l]) + "," + num(t.q()[l]) + "\n";
      write("recurrence_n" + std::to_string(n) + ".csv", csv);
      write_json("recurrence_n" + std::to_string(n) + ".json", {{"n", n},
                                                                {"n1", t.n1()},
                                                                {"L", t.grid().L},
                                                                {"grid_nodes", t.grid().nodes.size()},
                                                                {"drift", t.drift()},
                                                                {"extended_precision", t.extended_precision()},
                                                                {"raw_q_max", t.raw_q_max()}});
    }
    return kOk;
  }

  int kernel_edge() {
    const auto edge = eq().right_edge();
    const auto grid = cfg_.s_range ? cfg_.s_range->points() : SRange{-2.0, 2.0, 1.0}.points();
    for (int n : n_values("kernel-edge")) {
      const auto t = table(n);
      const RescaledCdKernel kn(t, edge);
      const Eigen::MatrixXd A = kn.gram(grid);
      const Eigen::MatrixXd B = AiryKernel{}.gram(grid);
      std::string csv = csv_header("t1,t2,K_n,K_airy,abs_diff");
      for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
          csv += num(grid[i]) + "," + num(grid[k]) + "," + num(A(i, k)) + "," + num(B(i, k)) + "," +
                 num(std::abs(A(i, k) - B(i, k))) + "\n";
        }
      }
      write("kernel_edge_n" + std::to_string(n) + ".csv", csv);
      write_json("kernel_edge_n" + std::to_string(n) + ".json",
                 {{"n", n}, {"edge", edge_json(edge)}, {"sup_error", (A - B).cwiseAbs().maxCoeff()}, {"t_grid", grid}});
    }
    return kOk;
  }

  int tw() {
    const auto grid = cfg_.s_range ? cfg_.s_range->points() : SRange{-6.0, 4.0, 0.1}.points();
    std::string csv = csv_header("s,F2");
    json refinement = json::array();
    for (double s : grid) {
      const auto r = tw_cdf(s, cfg_.tol, cfg_.quad_order);
      csv += num(s) + "," + num(r.det) + "\n";
      json hist = json::array();
      for (const auto& [m, d] : r.history) hist.push_back({m, d});
      refinement.push_back({{"s", s}, {"F2", r.det}, {"quad_order", r.quad_order}, {"truncation", r.truncation},
                            {"history", hist}});
    }
    write("tw.csv", csv);
    write_json("tw.json", {{"tol", cfg_.tol}, {"initial_quad_order", cfg_.quad_order}, {"refinement", refinement}});
    return kOk;
  }

  int hole_prob() {
    const auto edge = eq().right_edge();
    const auto grid = cfg_.s_range ? cfg_.s_range->points() : std::vector<double>{0.0};
    for (int n : n_values("hole-prob")) {
      const auto t = table(n);
      std::string csv = csv_header("s,E_n,F2,abs_diff,quad_order");
      json rows = json::array();
      for (double s : grid) {
        const auto e = hole_probability_finite_n(t, edge, {Interval{s}}, fredholm_options());
        const auto f = tw_cdf(s, cfg_.tol, cfg_.quad_order);
        csv += num(s) + "," + num(e.det) + "," + num(f.det) + "," + num(std::abs(e.det - f.det)) + "," +
               std::to_string(e.quad_order) + "\n";
        rows.push_back({{"s", s}, {"E_n", e.det}, {"F2", f.det}, {"quad_order", e.quad_order}});
      }
      write("hole_prob_n" + std::to_string(n) + ".csv", csv);
      write_json("hole_prob_n" + std::to_string(n) + ".json", {{"n", n}, {"edge", edge_json(edge)}, {"rows", rows}});
    }
    return kOk;
  }

  int verify() {
    const auto ns = n_values("verify");
    for (int n : ns) {
      if (n < 4) {
        write_json("verify.json", {{"status", "insufficient n"}, {"n_list", ns}, {"pass", false}});
        out_ << "verify: insufficient n (each n must be >= 4)\n";
        return kDiagnosticFailure;
      }
    }
    std::vector<int> sorted = ns;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<RecurrenceTable> tables;
    for (int n : sorted) tables.push_back(table(n));
    SweepInput in;
    in.eq = &eq();
    in.quad_order = cfg_.quad_order;
    for (const auto& t : tables) in.tables.push_back(&t);

    bool all = true;
    json summary = json::array();
    for (auto fn : {recurrence_report, edge_kernel_report, nu_report, resolvent_report, tail_report,
                    hole_probability_report}) {
      const auto rep = fn(in);
      all = all && rep.passed();
      write_json("verify_" + rep.diagnostic + ".json", to_json(rep));
      summary.push_back({{"diagnostic", rep.diagnostic}, {"pass", rep.passed()}});
      out_ << (rep.passed() ? "PASS " : "FAIL ") << rep.diagnostic << "\n";
      for (const auto& c : rep.criteria) {
        if (!c.pass) {
          out_ << "  failed: " << c.name << " = " << num(c.value) << " (need " << to_string(c.relation) << " "
               << num(c.threshold) << ")\n";
        }
      }
    }
    write_json("verify.json", {{"status", all ? "pass" : "fail"}, {"n_list", sorted}, {"pass", all}, {"reports", summary}});
    return all ? kOk : kDiagnosticFailure;
  }

  int airy() {
    const auto grid = cfg_.s_range ? cfg_.s_range->points() : SRange{-10.0, 5.0, 0.1}.points();
    std::string csv = csv_header("x,Ai,Ai_prime,Bi,Bi_prime,nu");
    for (double x : grid) {
      const auto a = airy_ai(x);
      const auto b = airy_bi(x);
      csv += num(x) + "," + num(a.value) + "," + num(a.derivative) + "," + num(b.value) + "," + num(b.derivative) +
             "," + num(edge_density(x)) + "\n";
    }
    write("airy.csv", csv);
    return kOk;
  }

  RunConfig cfg_;
  std::ostream& out_;
  std::string hash_;
  std::optional<Potential> potential_;
  std::optional<EquilibriumMeasure> eq_;
};

}  // namespace

std::vector<double> SRange::points() const {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

SRange parse_s_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw Error(ErrorKind::InvalidInput, "s-range must be lo:hi:step, got '" + text + "'");
  SRange r{parse_double(parts[0], "s-range"), parse_double(parts[1], "s-range"), parse_double(parts[2], "s-range")};
  if (!(r.step > 0.0) || r.hi < r.lo) {
    throw Error(ErrorKind::InvalidInput, "s-range needs step > 0 and hi >= lo, got '" + text + "'");
  }
  if ((r.hi - r.lo) / r.step > 1e6) throw Error(ErrorKind::InvalidInput, "s-range has too many points");
  return r;
}

std::string RunConfig::canonical() const {
  std::string n;
  for (std::size_t i = 0; i < n_list.size(); ++i) n += (i ? "," : "") + std::to_string(n_list[i]);
  std::string s = "command=" + command + "\npotential=" + potential + "\nn_list=" + n + "\n";
  if (s_range) s += "s_range=" + num(s_range->lo) + ":" + num(s_range->hi) + ":" + num(s_range->step) + "\n";
  s += "quad_order=" + std::to_string(quad_order) + "\ntol=" + num(tol) + "\nkind=" + kind + "\n";
  return s;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidInput, "config line " + std::to_string(lineno) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::InvalidInput, "config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_config(RunConfig& config, const std::map<std::string, std::string>& entries) {
  for (const auto& [key, value] : entries) {
    if (key == "potential") {
      config.potential = value;
    } else if (key == "n") {
      config.n_list = {parse_int(value, "n")};
    } else if (key == "n_list" || key == "n-list") {
      config.n_list = parse_int_list(value, "n_list");
    } else if (key == "s_range" || key == "s-range") {
      config.s_range = parse_s_range(value);
    } else if (key == "quad_order" || key == "quad-order") {
      config.quad_order = parse_int(value, "quad_order");
      if (config.quad_order < 8) throw Error(ErrorKind::InvalidInput, "quad_order must be >= 8");
    } else if (key == "tol") {
      config.tol = parse_double(value, "tol");
      if (!(config.tol >= 1e-12)) throw Error(ErrorKind::InvalidInput, "tol must be >= 1e-12");
    } else if (key == "kind") {
      kind_hint(value);
      config.kind = value;
    } else if (key == "out" || key == "output_dir") {
      config.output_dir = value;
    } else {
      throw Error(ErrorKind::InvalidInput, "unknown config key '" + key + "'");
    }
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.canonical())));
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edge statistics of unitary-invariant random matrices", "edge-lab"};
  app.require_subcommand(1, 1);

  std::map<std::string, std::string> flags;
  std::string config_file;
  const std::vector<std::pair<std::string, std::string>> subcommands{
      {"equilibrium", "Equilibrium measure: support, master polynomial, edge constants, density table"},
      {"recurrence", "Recurrence coefficients J_l, q_l of the orthonormal system"},
      {"kernel-edge", "Rescaled Christoffel-Darboux kernel against the Airy kernel"},
      {"tw", "Tracy-Widom F2 table"},
      {"hole-prob", "Finite-n edge hole probability against F2"},
      {"verify", "Full convergence sweep with pass/fail reports"},
      {"airy", "Airy function table"},
  };
  for (const auto& [name, help] : subcommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--potential", flags["potential"], "poly:c0,c1,...,cd");
    sub->add_option("--n", flags["n"], "matrix size");
    sub->add_option("--n-list", flags["n_list"], "comma-separated matrix sizes");
    sub->add_option("--s-range", flags["s_range"], "lo:hi:step");
    sub->add_option("--quad-order", flags["quad_order"], "initial Gauss-Legendre order");
    sub->add_option("--tol", flags["tol"], "Fredholm refinement tolerance");
    sub->add_option("--kind", flags["kind"], "support kind hint: auto, one-cut, two-cut");
    sub->add_option("--out", flags["out"], "output directory");
    sub->add_option("--config", config_file, "key=value config file (flags override it)");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  RunConfig cfg;
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  try {
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      if (!f) throw Error(ErrorKind::InvalidInput, "cannot read config file '" + config_file + "'");
      std::stringstream buf;
      buf << f.rdbuf();
      apply_config(cfg, parse_config_text(buf.str()));
    }
    // flags given on the command line override the config file
    std::map<std::string, std::string> given;
    auto* sub = app.get_subcommand(cfg.command);
    for (const auto& [key, value] : flags) {
      const std::string opt = "--" + std::string(key == "n_list" ? "n-list" : key == "s_range" ? "s-range"
                                                : key == "quad_order" ? "quad-order" : key);
      if (sub->count(opt) > 0) given[key] = value;
    }
    apply_config(cfg, given);
    return Session(cfg, out).dispatch();
  } catch (const Error& e) {
    err << "edge-lab " << cfg.command << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidInput ? kUsage : kNumerical;
  } catch (const std::exception& e) {
    err << "edge-lab " << cfg.command << ": " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace edgelab::cli

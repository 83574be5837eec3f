#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "divtower/certificates.hpp"
#include "divtower/divergence.hpp"
#include "divtower/inclusion.hpp"
#include "divtower/witness.hpp"

using namespace divtower;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kNegative = 1, kUnknown = 2, kUsage = 64 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string family = "G";
  int m = 2;
  unsigned p = 2;
  unsigned phi_power = 1;
  std::string spec_file;
  std::size_t ball_radius = 2;
  std::size_t node_cap = 200'000;
  std::size_t word_cap = kDefaultWordCap;
  double C = 3;
  std::string out_dir = "out";
  std::string formats = "csv,json,svg";
  std::uint64_t seed = 1;

  bool wants(const std::string& f) const { return ("," + formats + ",").find("," + f + ",") != std::string::npos; }
};

RunConfig load_config(const std::string& path) {
  RunConfig c;
  if (path.empty()) return c;
  boost::property_tree::ptree t;
  boost::property_tree::read_ini(path, t);
  c.family = t.get("tower.family", c.family);
  c.m = t.get("tower.m", c.m);
  c.p = t.get("tower.p", c.p);
  c.phi_power = t.get("tower.phi_power", c.phi_power);
  c.spec_file = t.get("tower.spec", c.spec_file);
  c.ball_radius = t.get("caps.ball_radius", c.ball_radius);
  c.node_cap = t.get("caps.node_cap", c.node_cap);
  c.word_cap = t.get("caps.word_cap", c.word_cap);
  c.C = t.get("cert.C", c.C);
  c.out_dir = t.get("output.dir", c.out_dir);
  c.formats = t.get("output.formats", c.formats);
  c.seed = t.get("sampler.seed", c.seed);
  return c;
}

void validate(const RunConfig& c) {
  if (c.m < 1) throw UsageError("m must be at least 1");
  if (c.family != "G" && c.family != "B") throw UsageError("family must be G or B");
  if (c.p < 1 || c.phi_power < 1) throw UsageError("p and phi_power must be positive");
  if (c.ball_radius == 0 || c.node_cap == 0 || c.word_cap == 0) throw UsageError("caps must be positive");
}

void write_atomic(const RunConfig& c, const std::string& name, const std::string& content) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  fs::path target = dir / name;
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
  std::cout << "wrote " << target.string() << "\n";
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

std::string svg_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series) {
  const double W = 640, H = 400, L = 60, R = 150, T = 40, B = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if (first) {
        x0 = x1 = x;
        y0 = y1 = y;
        first = false;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream o;
  o << std::setprecision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
    << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (double v : {x0, x1})
    o << "<text x=\"" << px(v) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">" << v
      << "</text>\n";
  for (double v : {y0, y1})
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << v
      << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* col = colors[i % 6];
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    for (auto [x, y] : series[i].points) o << px(x) << "," << py(y) << " ";
    o << "\"/>\n";
    o << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (i + 1) << "\" fill=\"" << col
      << "\" font-size=\"12\">" << series[i].name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

SpecPtr load_spec(const RunConfig& c) {
  if (!c.spec_file.empty()) {
    std::ifstream in(c.spec_file, std::ios::binary);
    if (!in) throw UsageError("cannot read spec file " + c.spec_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return spec_from_json(ss.str());
  }
  if (c.family == "B") return build_B(c.m, c.phi_power);
  return build_G(c.m, phi_base(c.phi_power), c.p);
}

std::string hex(const std::string& bytes) {
  std::ostringstream o;
  for (unsigned char ch : bytes) o << std::hex << std::setw(2) << std::setfill('0') << int(ch);
  return o.str();
}

std::string tag(const RunConfig& c) { return c.family + std::to_string(c.m); }

// --- commands --------------------------------------------------------------

int cmd_tower(const RunConfig& c) {
  auto spec = load_spec(c);
  auto rels = relators(*spec);
  write_atomic(c, "spec_" + tag(c) + ".json", spec_to_json(*spec));
  std::cout << "spec " << spec->label << " generators " << generating_set(*spec).alphabet->size()
            << " relators " << rels.size() << "\n";
  return kOk;
}

int cmd_nf(const RunConfig& c, const std::string& text) {
  auto spec = load_spec(c);
  Solver s(spec, c.word_cap);
  Word w = s.parse(text);
  try {
    NormalForm nf = s.normalize(w);
    const Codes nw = s.to_primitive_word(nf.elem);
    std::cout << "normal_form " << (nw.empty() ? std::string("e") : format_word(Word::from_codes(s.primitives(), nw)))
              << "\n";
    std::cout << "encoding " << hex(nf.encoding) << "\n";
    std::cout << "verdict " << (nf.trivial ? "trivial" : "nontrivial") << "\n";
    return nf.trivial ? kOk : kNegative;
  } catch (const UnknownEquality& e) {
    std::cout << "verdict unknown (" << e.what() << ")\n";
    return kUnknown;
  }
}

int cmd_dist(const RunConfig& c, const std::string& ambient, std::size_t n) {
  if (ambient != "fbc-phi") throw UsageError("supported ambient: fbc-phi");
  auto base = phi_base(c.phi_power);
  Solver h(base.H, c.word_cap);
  auto oracle = h.oracle(make_free("F", {"a", "b"}), base.fiber);
  DistortionTable t;
  try {
    t = distortion(h, oracle, n, c.node_cap);
  } catch (const CapExceeded& e) {
    std::cerr << "partial: " << e.what() << "\n";
    return kUnknown;
  }
  const std::string stem = "distortion_" + ambient + "_" + std::to_string(n);
  std::cout << distortion_csv(t);
  if (c.wants("csv")) write_atomic(c, stem + ".csv", distortion_csv(t));
  if (c.wants("svg")) {
    Series s{"Dist(n)", {}};
    for (std::size_t i = 0; i < t.raw.size(); ++i) s.points.push_back({double(i), double(t.raw[i])});
    write_atomic(c, stem + ".svg", svg_chart("fiber distortion", "n", "Dist(n)", {s}));
  }
  return kOk;
}

int cmd_cert(const RunConfig& c, const std::string& family, unsigned nmax, std::size_t table_n,
             unsigned mp, unsigned np) {
  CertificateSequence seq;
  std::vector<std::int64_t> table;
  if (family == "phi") {
    seq = phi_certificates(nmax, c.phi_power);
    auto base = phi_base(c.phi_power);
    Solver h(base.H, c.word_cap);
    table = distortion(h, h.oracle(make_free("F", {"a", "b"}), base.fiber), table_n, c.node_cap).normalized;
  } else if (family == "snowflake") {
    seq = snowflake_certificates(mp, np, nmax);
  } else {
    throw UsageError("family must be phi or snowflake");
  }
  auto rep = verify_certificate(seq, c.C, table);
  write_atomic(c, "cert_" + family + ".json", certificate_json(seq, rep));
  std::cout << "certificate " << family << " C=" << c.C << " n<=" << nmax << " "
            << (rep.passed() ? "pass" : "fail") << "\n";
  return rep.passed() ? kOk : kNegative;
}

int cmd_div(const RunConfig& c, std::int64_t r_max, const std::vector<double>& rhos, std::size_t pair_cap,
            const std::string& cyclic) {
  auto spec = load_spec(c);
  Solver s(spec, c.word_cap);
  auto rs = standard_retractions(s);
  SearchCaps caps;
  caps.node_cap = c.node_cap;
  bool partial = false;
  if (!cyclic.empty()) {
    Word w = s.parse(cyclic);
    std::ostringstream csv;
    csv << "r,k,radius,status,length,explored\n";
    Series ser{"cyclic " + cyclic, {}};
    for (std::int64_t r = 1; r <= r_max; ++r) {
      auto cr = cyclic_divergence(s, rs, w, r, rhos.empty() ? 1.0 : rhos.front(), caps);
      csv << r << "," << cr.k << "," << cr.radius << "," << to_string(cr.result.status) << ","
          << cr.result.length << "," << cr.result.explored << "\n";
      if (cr.result.status == AvoidanceResult::Status::Finite) ser.points.push_back({double(r), double(cr.result.length)});
      if (cr.result.status == AvoidanceResult::Status::Unknown) partial = true;
    }
    std::cout << csv.str();
    if (c.wants("csv")) write_atomic(c, "cyclic_" + tag(c) + ".csv", csv.str());
    if (c.wants("svg")) write_atomic(c, "cyclic_" + tag(c) + ".svg", svg_chart("cyclic divergence", "r", "length", {ser}));
    return partial ? kUnknown : kOk;
  }
  std::vector<DeltaReport> rows;
  std::vector<Series> series;
  for (double rho : rhos) {
    Series ser{"rho=" + std::to_string(rho).substr(0, 4), {}};
    for (std::int64_t r = 1; r <= r_max; ++r) {
      rows.push_back(delta_rho(s, rs, r, rho, caps, pair_cap));
      if (rows.back().unknown > 0) partial = true;
      if (rows.back().value >= 0) ser.points.push_back({double(r), double(rows.back().value)});
    }
    series.push_back(ser);
  }
  std::cout << delta_csv(rows);
  if (c.wants("csv")) write_atomic(c, "delta_" + tag(c) + ".csv", delta_csv(rows));
  if (c.wants("svg")) write_atomic(c, "delta_" + tag(c) + ".svg", svg_chart("divergence", "r", "delta", series));
  if (partial) std::cerr << "partial: some pairs are unknown under the node cap\n";
  return partial ? kUnknown : kOk;
}

struct WitnessArgs {
  std::string kind = "s1";
  std::int64_t r = 9;
  int sign1 = 1, sign2 = 1, eps = 1;
  std::int64_t n2 = 0;
  std::string x, z;
  std::int64_t k = 0;
};

int cmd_witness(const RunConfig& c, const WitnessArgs& a) {
  const int m = a.kind == "P" || a.kind == "Q" ? std::max(c.m, 3) : std::max(c.m, 2);
  RunConfig g = c;
  g.family = "G";
  g.m = m;
  Solver s(load_spec(g), c.word_cap);
  auto rs = standard_retractions(s);
  PathWitness w;
  if (a.kind == "s1") {
    w = witness_s1(s, a.r);
  } else if (a.kind == "cool3") {
    w = witness_cool3(s, a.r, a.eps);
  } else if (a.kind == "modification") {
    w = witness_avoidant_modification(s, rs, s.parse(a.x), a.k, s.parse(a.z));
  } else {
    Ingredients ing = phi_ingredients(25, 5);
    if (a.kind == "a1") {
      w = witness_a1(s, ing, a.r).gamma;
    } else if (a.kind == "cool2") {
      w = witness_cool2(s, ing, a.r, a.sign1, a.sign2);
    } else if (a.kind == "P") {
      w = witness_ag(s, ing, {m, AgKind::P, a.r, 0, a.eps});
    } else if (a.kind == "Q") {
      w = witness_ag(s, ing, {m, AgKind::Q, a.r, a.n2 == 0 ? a.r : a.n2, 1});
    } else {
      throw UsageError("unknown witness kind " + a.kind);
    }
  }
  auto rep = verify_witness(s, rs, w);
  write_atomic(c, "witness_" + a.kind + "_" + std::to_string(a.r) + ".json", witness_json(w, rep));
  std::cout << w.label << " length " << w.length() << " bound " << w.bound << " endpoints " << rep.endpoints
            << " avoidance " << rep.avoidance << " length_ok " << rep.length << "\n";
  if (rep.passed()) return kOk;
  return rep.unresolved > 0 && rep.endpoints && rep.length ? kUnknown : kNegative;
}

int cmd_embed(const RunConfig& c, std::size_t samples, std::size_t radius) {
  auto rep = sample_inclusion(c.m, samples, radius, c.seed, c.phi_power);
  write_atomic(c, "embed_" + std::to_string(c.m) + ".json", inclusion_json(rep));
  std::cout << "relators " << rep.relators << " failures " << rep.relator_failures.size() << " samples "
            << rep.samples << " counterexamples " << rep.counterexamples.size() << " seed " << rep.seed << "\n";
  return rep.passed() ? kOk : kNegative;
}

int cmd_exponents(const RunConfig& c, unsigned mp_max, unsigned np_max, int levels) {
  std::ostringstream csv;
  csv << std::setprecision(12) << "m_param,n_param,beta,level,alpha\n";
  for (unsigned mp = 2; mp <= mp_max; ++mp)
    for (unsigned np = 1; np <= np_max; ++np) {
      auto e = snowflake_exponent(mp, np, levels);
      if (!e.beta_valid) continue;
      for (int lv = 1; lv <= levels; ++lv) csv << mp << "," << np << "," << e.beta << "," << lv << "," << e.alpha[lv - 1] << "\n";
    }
  auto gaps = uncovered(alpha_values(mp_max, np_max, levels), 2.0, 10.0, 0.1);
  if (c.wants("csv")) write_atomic(c, "exponents.csv", csv.str());
  std::cout << "uncovered subintervals of [2,10]: " << gaps.size() << "\n";
  for (auto [lo, hi] : gaps) std::cout << "  [" << lo << ", " << hi << ")\n";
  return gaps.empty() ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divtower: divergence experiments for towers of groups"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, family, spec_file, out_dir, formats;
  int m = 0;
  unsigned p = 0, phi_power = 0;
  std::size_t ball_radius = 0, node_cap = 0, word_cap = 0;
  double C = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "INI file with [tower] [caps] [cert] [output] [sampler]");
  auto* o_family = app.add_option("--family", family, "G or B");
  auto* o_m = app.add_option("--m", m, "tower level");
  auto* o_p = app.add_option("--p", p, "exponent p of the G towers");
  auto* o_phi = app.add_option("--phi-power", phi_power, "use phi^n as monodromy");
  auto* o_spec = app.add_option("--spec", spec_file, "spec JSON written by the tower command");
  auto* o_ball = app.add_option("--ball-radius", ball_radius);
  auto* o_node = app.add_option("--node-cap", node_cap);
  auto* o_word = app.add_option("--word-cap", word_cap);
  auto* o_C = app.add_option("--C", C, "certificate constant");
  auto* o_out = app.add_option("--out", out_dir, "output directory (env DIVTOWER_OUT)");
  auto* o_fmt = app.add_option("--formats", formats, "comma list of csv,json,svg");
  auto* o_seed = app.add_option("--seed", seed, "sampler seed");

  auto* tower = app.add_subcommand("tower", "write a tower spec as JSON");
  auto* nf = app.add_subcommand("nf", "normal form and triviality of a word");
  std::string word_text;
  nf->add_option("word", word_text, "word text, e.g. \"s2^-1 a1 s2 b1^-1\"")->required();

  auto* dist = app.add_subcommand("dist", "fiber distortion table");
  std::string ambient = "fbc-phi";
  std::size_t dist_n = 6;
  dist->add_option("--ambient", ambient);
  dist->add_option("--n", dist_n);

  auto* cert = app.add_subcommand("cert", "certificate sequence report");
  std::string cert_family = "phi";
  unsigned nmax = 25, mp = 2, np = 2;
  std::size_t table_n = 5;
  cert->add_option("--family", cert_family, "phi or snowflake");
  cert->add_option("--nmax", nmax);
  cert->add_option("--table-n", table_n, "radius of the exhaustive distortion table");
  cert->add_option("--mp", mp, "snowflake m parameter");
  cert->add_option("--np", np, "snowflake n parameter");
  cert->add_option("--C", C, "certificate constant");

  auto* div = app.add_subcommand("div", "empirical divergence");
  std::int64_t r_max = 2;
  std::vector<double> rhos{0.5, 1.0};
  std::size_t pair_cap = 200;
  std::string cyclic;
  div->add_option("--r-max", r_max);
  div->add_option("--rho", rhos);
  div->add_option("--pair-cap", pair_cap);
  div->add_option("--cyclic", cyclic, "cyclic-subgroup divergence of this word instead");

  auto* wit = app.add_subcommand("witness", "build and verify a witness path");
  WitnessArgs wa;
  wit->add_option("--kind", wa.kind, "s1, a1, cool2, cool3, P, Q or modification");
  wit->add_option("--r", wa.r);
  wit->add_option("--sign1", wa.sign1);
  wit->add_option("--sign2", wa.sign2);
  wit->add_option("--eps", wa.eps);
  wit->add_option("--n2", wa.n2);
  wit->add_option("--x", wa.x, "modification start");
  wit->add_option("--k", wa.k, "modification s1 exponent");
  wit->add_option("--z", wa.z, "modification center");

  auto* embed = app.add_subcommand("embed", "sample the inclusion of G_m into B_m");
  std::size_t samples = 100, radius = 3;
  embed->add_option("--samples", samples);
  embed->add_option("--radius", radius);

  auto* expo = app.add_subcommand("exponents", "exponent families and density scan");
  unsigned mp_max = 50, np_max = 50;
  int levels = 10;
  expo->add_option("--mp-max", mp_max);
  expo->add_option("--np-max", np_max);
  expo->add_option("--levels", levels);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    RunConfig c = load_config(config_path);
    if (const char* env = std::getenv("DIVTOWER_OUT"); env && *env) c.out_dir = env;
    if (o_family->count()) c.family = family;
    if (o_m->count()) c.m = m;
    if (o_p->count()) c.p = p;
    if (o_phi->count()) c.phi_power = phi_power;
    if (o_spec->count()) c.spec_file = spec_file;
    if (o_ball->count()) c.ball_radius = ball_radius;
    if (o_node->count()) c.node_cap = node_cap;
    if (o_word->count()) c.word_cap = word_cap;
    if (o_C->count() || cert->get_option("--C")->count()) c.C = C;
    if (o_out->count()) c.out_dir = out_dir;
    if (o_fmt->count()) c.formats = formats;
    if (o_seed->count()) c.seed = seed;
    validate(c);

    if (*tower) return cmd_tower(c);
    if (*nf) return cmd_nf(c, word_text);
    if (*dist) return cmd_dist(c, ambient, dist_n);
    if (*cert) return cmd_cert(c, cert_family, nmax, table_n, mp, np);
    if (*div) return cmd_div(c, r_max, rhos, pair_cap, cyclic);
    if (*wit) return cmd_witness(c, wa);
    if (*embed) return cmd_embed(c, samples, radius);
    if (*expo) return cmd_exponents(c, mp_max, np_max, levels);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnknown;
  }
  return kUsage;
}

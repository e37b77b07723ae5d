#include "polydiv/cli.hpp"

#include "polydiv/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace polydiv::cli {

using io::Json;

namespace {

struct Outcome {
  Json result = Json::object();
  std::vector<std::string> violations;
  bool inconclusive = false;
  std::optional<io::Document> document;  // emitted instead of a report
};

Json matrix_json(const QMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(io::to_json(QVector(m.row(i).transpose())));
  return out;
}

Json values_json(const TInvariantDivisor& d) {
  Json rays = Json::array(), verts = Json::array();
  for (const auto& [r, c] : d.ray_coeffs) rays.push_back(Json{{"ray", io::to_json(r)}, {"value", io::to_json(c)}});
  for (const auto& [v, c] : d.vertex_coeffs)
    verts.push_back(Json{{"label", v.label}, {"vertex", io::to_json(v.vertex)}, {"value", io::to_json(c)}});
  return Json{{"rays", rays}, {"vertices", verts}};
}

Json sections_json(const SectionBasis& s) {
  Json basis = Json::array();
  for (const auto& f : s.basis) basis.push_back(io::to_json(f));
  return Json{{"dimension", s.dimension()}, {"truncated", s.truncated}, {"basis", basis}};
}

QVector parse_weight(const std::string& text, int dim) {
  std::vector<Rational> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) xs.push_back(parse_rational(item));
  if (static_cast<int>(xs.size()) != dim)
    throw Error(ErrorCode::InvalidInput, "--weight needs " + std::to_string(dim) + " entries, got " + std::to_string(xs.size()));
  QVector u(dim);
  for (int i = 0; i < dim; ++i) u[i] = xs[static_cast<size_t>(i)];
  return u;
}

QVector require_weight(const RunOptions& o, int dim) {
  if (!o.weight) throw Error(ErrorCode::InvalidInput, o.command + " needs --weight");
  return parse_weight(*o.weight, dim);
}

std::vector<QVector> box_weights(int dim, long b) {
  std::vector<QVector> out;
  std::vector<long> x(static_cast<size_t>(dim), -b);
  for (;;) {
    QVector u(dim);
    for (int i = 0; i < dim; ++i) u[i] = x[static_cast<size_t>(i)];
    out.push_back(u);
    int i = dim - 1;
    while (i >= 0 && x[static_cast<size_t>(i)] == b) x[static_cast<size_t>(i--)] = -b;
    if (i < 0) break;
    ++x[static_cast<size_t>(i)];
  }
  return out;
}

// results[i] = f(items[i]), computed on up to thread_count() threads
template <typename T, typename F>
std::vector<Json> parallel_map(const std::vector<T>& items, F f) {
  std::vector<Json> results(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  const unsigned n = std::max(1u, std::min<unsigned>(thread_count(), static_cast<unsigned>(items.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t)
    pool.emplace_back([&, t] {
      for (size_t i = t; i < items.size(); i += n) {
        try {
          results[i] = f(items[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

void note_proper(Outcome& out, const ProperReport& r, const std::string& what) {
  if (r.proper()) return;
  out.violations.push_back(what + " is not proper");
  for (const auto& f : r.failures) out.violations.push_back(f);
}

Outcome cmd_eval(const RunOptions& o, const io::Loaded& in) {
  Outcome out;
  if (in.doc.kind == "pdivisor") {
    PolyhedralDivisor d = io::pdivisor_from(in.payload());
    QVector u = require_weight(o, d.rank());
    if (!d.weight_cone().contains(u)) throw Error(ErrorCode::WeightOutsideCone, to_string(u) + " is outside the weight cone");
    QDivisor v = evaluate(d, u);
    Json values = io::to_json(v);
    for (const auto& [label, c] : d.coefficients())
      if (!values.contains(label)) values[label] = "0";
    out.result = Json{{"weight", io::to_json(u)}, {"value", values}};
  } else if (in.doc.kind == "invariant_pdivisor") {
    InvariantPDivisorOnFan d = io::invariant_pdivisor_from(in.payload());
    QVector u = require_weight(o, d.rank());
    out.result = Json{{"weight", io::to_json(u)}, {"value", values_json(evaluate(d, u))}};
  } else {
    throw Error(ErrorCode::InvalidInput, "eval expects a pdivisor or invariant_pdivisor document");
  }
  return out;
}

Outcome cmd_proper(const RunOptions&, const io::Loaded& in) {
  if (in.doc.kind != "pdivisor") throw Error(ErrorCode::InvalidInput, "proper expects a pdivisor document");
  Outcome out;
  PolyhedralDivisor d = io::pdivisor_from(in.payload());
  ProperReport r = is_proper(d);
  out.result = Json{{"report", io::to_json(r)}};
  note_proper(out, r, "the divisor");
  return out;
}

Outcome cmd_sections(const RunOptions& o, const io::Loaded& in) {
  Outcome out;
  SectionOptions so;
  std::function<Json(const QVector&)> at;
  int dim = 0;
  std::optional<PolyhedralDivisor> pd;
  std::optional<TInvariantDivisor> td;
  if (in.doc.kind == "pdivisor") {
    pd = io::pdivisor_from(in.payload());
    dim = pd->rank();
    at = [&](const QVector& u) {
      if (!pd->weight_cone().contains(u)) return Json{{"dimension", 0}, {"truncated", false}, {"basis", Json::array()}};
      return sections_json(global_sections(pd->base(), evaluate(*pd, u), so));
    };
  } else if (in.doc.kind == "invariant_divisor") {
    td = io::invariant_divisor_from(in.payload());
    dim = td->fan->rank();
    at = [&](const QVector& u) {
      if (!box_of(*td).contains(u)) return Json{{"dimension", 0}, {"truncated", false}, {"basis", Json::array()}};
      return sections_json(graded_sections(*td, u, so));
    };
  } else {
    throw Error(ErrorCode::InvalidInput, "sections expects a pdivisor or invariant_divisor document");
  }
  std::vector<QVector> weights;
  if (o.box) {
    if (o.weight) throw Error(ErrorCode::InvalidInput, "--weight and --box exclude each other");
    if (*o.box < 0) throw Error(ErrorCode::InvalidInput, "--box must be nonnegative");
    weights = box_weights(dim, *o.box);
  } else {
    weights.push_back(require_weight(o, dim));
  }
  std::vector<Json> res = parallel_map(weights, at);
  Json list = Json::array();
  for (size_t i = 0; i < weights.size(); ++i) {
    Json entry = res[i];
    entry["weight"] = io::to_json(weights[i]);
    if (entry["truncated"].get<bool>()) out.inconclusive = true;
    list.push_back(entry);
  }
  out.result = Json{{"sections", list}, {"pole_bound", so.pole_bound}, {"box", so.box}};
  return out;
}

Outcome cmd_bpf(const RunOptions& o, const io::Loaded& in) {
  if (in.doc.kind != "invariant_divisor") throw Error(ErrorCode::InvalidInput, "bpf expects an invariant_divisor document");
  Outcome out;
  TInvariantDivisor d = io::invariant_divisor_from(in.payload());
  BpfResult r = is_basepoint_free(d, SearchOptions{o.window, o.k_bound});
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses)
    witnesses.push_back(Json{{"member", w.member}, {"point", w.point}, {"weight", io::to_json(w.u)}, {"section", io::to_json(w.s)}});
  out.result = Json{{"verdict", to_string(r.verdict)}, {"witnesses", witnesses}, {"notes", r.notes}};
  out.inconclusive = r.verdict == Verdict::Inconclusive;
  return out;
}

Json upgrade_json(const UpgradeResult& up) {
  return Json{{"divisor", io::to_json(up.divisor)},
              {"report", io::to_json(up.report)},
              {"contraction_free", up.contraction_free},
              {"smooth_base", up.smooth_base ? Json(*up.smooth_base) : Json()},
              {"notes", up.notes}};
}

Json correction_json(const CorrectionResult& c) {
  return Json{{"divisor", io::to_json(c.divisor)}, {"sigma_hat", io::to_json(c.sigma_hat)}, {"report", io::to_json(c.report)}};
}

Outcome cmd_upgrade(const RunOptions&, const io::Loaded& in) {
  if (in.doc.kind != "invariant_pdivisor") throw Error(ErrorCode::InvalidInput, "upgrade expects an invariant_pdivisor document");
  Outcome out;
  UpgradeResult up = upgrade(io::invariant_pdivisor_from(in.payload()));
  out.result = upgrade_json(up);
  note_proper(out, up.report, "the upgraded divisor");
  if (!up.contraction_free) out.violations.push_back("the fan is not contraction-free");
  if (up.smooth_base && !*up.smooth_base) out.violations.push_back("the base of the upgrade is not smooth");
  return out;
}

Outcome cmd_correct(const RunOptions&, const io::Loaded& in) {
  if (in.doc.kind != "pdivisor") throw Error(ErrorCode::InvalidInput, "correct expects a pdivisor document");
  Outcome out;
  CorrectionResult c = correct_pic_z(io::pdivisor_from(in.payload()));
  out.result = correction_json(c);
  note_proper(out, c.report, "the corrected divisor");
  return out;
}

Outcome cmd_downgrade(const RunOptions&, const io::Loaded& in) {
  if (in.doc.kind != "downgrade_input") throw Error(ErrorCode::InvalidInput, "downgrade expects a downgrade_input document");
  Outcome out;
  io::DowngradeInput din = io::downgrade_input_from(in.payload());
  DowngradeResult r = downgrade(din.divisor, DowngradeContext::make(LatticeMap(din.projection)));
  Json weights = Json::array();
  for (const auto& w : r.weights) weights.push_back(io::to_json(w));
  out.result = Json{{"divisor", io::to_json(r.divisor)},
                    {"weights", weights},
                    {"marks", r.marks},
                    {"report", r.report ? io::to_json(*r.report) : Json()},
                    {"notes", r.notes}};
  if (r.report) note_proper(out, *r.report, "the downgraded divisor");
  return out;
}

Outcome cmd_toric_downgrade(const RunOptions&, const io::Loaded& in) {
  if (in.doc.kind != "toric_downgrade_input")
    throw Error(ErrorCode::InvalidInput, "toric-downgrade expects a toric_downgrade_input document");
  Outcome out;
  io::ToricDowngradeInput tin = io::toric_downgrade_input_from(in.payload());
  ToricDowngrade td = toric_downgrade(tin.delta, LatticeMap(tin.sublattice));
  ProperReport r = is_proper(td.divisor);
  out.result = Json{{"divisor", io::to_json(td.divisor)},
                    {"projection", matrix_json(td.projection)},
                    {"retraction", matrix_json(td.retraction)},
                    {"report", io::to_json(r)}};
  note_proper(out, r, "the downgraded divisor");
  return out;
}

Outcome cmd_cox(const RunOptions&, const io::Loaded& in) {
  if (in.doc.kind != "cox_input") throw Error(ErrorCode::InvalidInput, "cox expects a cox_input document");
  Outcome out;
  io::CoxInput cin = io::cox_input_from(in.payload());
  CoxData cd = cox_sequence(cin.fan, cin.primes, SplitOptions{cin.pivot_order, cin.pivot_order.empty()}, cin.hypotheses);
  Json verts = Json::array(), rays = Json::array();
  for (size_t i = 0; i < cd.vertices.size(); ++i)
    verts.push_back(Json{{"label", cd.vertices[i].label}, {"vertex", io::to_json(cd.vertices[i].vertex)}, {"mu", io::to_json(cd.mu[i])}});
  for (const auto& r : cd.rays) rays.push_back(io::to_json(r));
  CoxUpgrade up = cox_upgrade(cd);
  CorrectionResult fixed = correct_pic_z(up.divisor);
  out.result = Json{{"class_rank", cd.class_rank()},
                    {"vertices", verts},
                    {"rays", rays},
                    {"pi", io::to_json(cd.pi.matrix)},
                    {"raw", io::to_json(cox_raw(cd))},
                    {"upgraded", io::to_json(up.divisor)},
                    {"corrected", correction_json(fixed)},
                    {"hypotheses",
                     Json{{"complete", cd.hypotheses.complete},
                          {"q_factorial", cd.hypotheses.q_factorial},
                          {"class_group_free", cd.hypotheses.class_group_free}}}};
  note_proper(out, fixed.report, "the corrected Cox divisor");
  if (!cd.hypotheses.complete || !cd.hypotheses.q_factorial || !cd.hypotheses.class_group_free)
    out.violations.push_back("the hypotheses on X(S) were not asserted");
  return out;
}

Outcome cmd_deform_upgrade(const RunOptions&, const io::Loaded& in) {
  if (in.doc.kind != "deformation") throw Error(ErrorCode::InvalidInput, "deform-upgrade expects a deformation document");
  Outcome out;
  DeformationInput din = io::deformation_from(in.payload());
  Admissibility adm = check_admissible(din);
  if (!adm.admissible) {
    out.result = Json{{"admissible", false},
                      {"reason", adm.reason},
                      {"witness", adm.witness ? io::to_json(*adm.witness) : Json()},
                      {"lattice_free", adm.lattice_free}};
    out.violations.push_back("the decomposition is not admissible");
    return out;
  }
  DeformationRoutes routes = deformation_routes(din);
  if (!(routes.direct == routes.upgraded)) {
    out.result = Json{{"admissible", true}, {"direct", io::to_json(routes.direct)}, {"upgraded", io::to_json(routes.upgraded)}};
    out.violations.push_back("the formulas and the upgrade disagree");
    return out;
  }
  out.document = io::Document{"pdivisor", io::to_json(routes.direct), Json()};
  return out;
}

Outcome cmd_refine(const RunOptions&, const io::Loaded& in) {
  if (in.doc.kind != "complexes") throw Error(ErrorCode::InvalidInput, "refine expects a complexes document");
  Outcome out;
  io::Node p = in.payload();
  p.only({"complexes"});
  std::vector<PolyhedralComplex> cs;
  for (const auto& c : p["complexes"].items()) cs.push_back(io::complex_from(c));
  if (cs.empty()) p["complexes"].fail("nothing to refine");
  out.result = Json{{"cells", io::to_json(common_refinement(cs))}};
  return out;
}

using Command = Outcome (*)(const RunOptions&, const io::Loaded&);

const std::vector<std::pair<std::string, Command>>& table() {
  static const std::vector<std::pair<std::string, Command>> t{
      {"eval", cmd_eval},         {"proper", cmd_proper},       {"sections", cmd_sections},
      {"bpf", cmd_bpf},           {"upgrade", cmd_upgrade},     {"correct", cmd_correct},
      {"downgrade", cmd_downgrade}, {"toric-downgrade", cmd_toric_downgrade}, {"cox", cmd_cox},
      {"deform-upgrade", cmd_deform_upgrade}, {"refine", cmd_refine}};
  return t;
}

bool is_violation(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotContractionFree:
    case ErrorCode::NotQCartier:
    case ErrorCode::NotProper:
    case ErrorCode::TorsionCokernel:
    case ErrorCode::NotAdmissible:
    case ErrorCode::RoutesDisagree:
    case ErrorCode::FormsDisagree:
    case ErrorCode::SlicesDisagree:
      return true;
    default:
      return false;
  }
}

std::string scalar_text(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

// scalars, and arrays of scalars as tuples
std::optional<std::string> inline_text(const Json& j) {
  if (!j.is_structured()) return scalar_text(j);
  if (j.empty()) return j.is_array() ? "()" : "{}";
  if (!j.is_array()) return std::nullopt;
  std::string s = "(";
  for (size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_structured()) return std::nullopt;
    s += (i ? ", " : "") + scalar_text(j[i]);
  }
  return s + ")";
}

void render_text(const Json& j, const std::string& indent, std::ostream& out) {
  auto line = [&](const std::string& head, const Json& x) {
    if (auto t = inline_text(x)) {
      out << indent << head << " " << *t << "\n";
    } else {
      out << indent << head << "\n";
      render_text(x, indent + "  ", out);
    }
  };
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) line(it.key() + ":", *it);
  } else if (j.is_array()) {
    for (const auto& x : j) line("-", x);
  } else {
    out << indent << scalar_text(j) << "\n";
  }
}

std::string format(const RunOptions& o, const io::Document& doc) {
  if (o.format == "json") return io::emit(doc);
  std::ostringstream s;
  s << "kind: " << doc.kind << "\n";
  render_text(doc.payload, "", s);
  return s.str();
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, f] : table()) out.push_back(name);
    return out;
  }();
  return names;
}

unsigned thread_count() {
  if (const char* env = std::getenv("PDIV_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  auto it = std::find_if(table().begin(), table().end(), [&](const auto& e) { return e.first == o.command; });
  try {
    if (it == table().end()) throw Error(ErrorCode::InvalidInput, "unknown command '" + o.command + "'");
    if (o.format != "json" && o.format != "text") throw Error(ErrorCode::InvalidInput, "--format is json or text");
    if (o.k_bound < 1 || o.window < 0) throw Error(ErrorCode::InvalidInput, "--k-bound must be positive and --window nonnegative");
  } catch (const Error& e) {
    err << e.what() << "\n";
    return InputError;
  }

  Json provenance{{"command", o.command}};
  Json search{{"k_bound", o.k_bound}, {"window", o.window}};
  Outcome result;
  int code = Computed;
  try {
    io::Loaded in = io::load_file(o.input);
    if (!in.doc.provenance.is_null()) provenance["input"] = in.doc.provenance;
    result = it->second(o, in);
    if (!result.violations.empty()) code = HypothesisViolated;
    else if (result.inconclusive) code = Inconclusive;
  } catch (const Error& e) {
    if (!is_violation(e.code())) {
      err << e.what() << "\n";
      return InputError;
    }
    result = Outcome{};
    result.result = Json{{"error", error_name(e.code())}, {"message", e.what()}};
    result.violations.push_back(e.what());
    code = HypothesisViolated;
  }

  io::Document doc;
  if (result.document && code == Computed) {
    doc = *result.document;
    doc.provenance = provenance;
  } else {
    static const char* status[] = {"computed", "input error", "hypotheses violated", "inconclusive"};
    doc.kind = "report";
    doc.provenance = provenance;
    doc.payload = Json{{"command", o.command},
                       {"status", status[code]},
                       {"violations", result.violations},
                       {"search", search},
                       {"result", result.result}};
  }
  std::string bytes = format(o, doc);
  try {
    if (o.output.empty()) out << bytes;
    else io::write_atomically(o.output, bytes);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return InputError;
  }
  return code;
}

int main(int argc, char** argv) {
  CLI::App app{"exact computations with polyhedral divisors"};
  app.require_subcommand(1);
  RunOptions o;
  static const std::map<std::string, std::string> about{
      {"eval", "evaluate a divisor at --weight"},
      {"proper", "check properness of a polyhedral divisor"},
      {"sections", "graded section dimensions at --weight or over --box"},
      {"bpf", "decide base-point freeness of an invariant divisor"},
      {"upgrade", "upgrade an invariant divisor on a divisorial fan"},
      {"correct", "widen the tail of an upgraded divisor over a Picard-rank-one base"},
      {"downgrade", "downgrade along a projection of weight lattices"},
      {"toric-downgrade", "divisor of a toric variety for a subtorus"},
      {"cox", "Cox divisors of a complexity-one fan"},
      {"deform-upgrade", "upgraded divisor of a homogeneous deformation"},
      {"refine", "common refinement of polyhedral complexes"},
  };
  for (const auto& name : commands()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("input", o.input, "input document")->required();
    sub->add_option("-o,--output", o.output, "write the result here, atomically");
    sub->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--k-bound", o.k_bound, "multiples tried by the basepoint search")->capture_default_str();
    sub->add_option("--window", o.window, "lattice steps beyond the vertices in searches")->capture_default_str();
    if (name == "eval" || name == "sections") sub->add_option_function<std::string>("--weight", [&](const std::string& w) { o.weight = w; }, "comma separated rationals");
    if (name == "sections") sub->add_option_function<long>("--box", [&](long b) { o.box = b; }, "all weights in [-B, B]^n");
    sub->callback([&o, name] { o.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : InputError;
  }
  return run(o, std::cout, std::cerr);
}

}  // namespace polydiv::cli

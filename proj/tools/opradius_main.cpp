// opradius: certified numerical-radius and Euclidean-radius enclosures,
// the inequality registry and the verification campaign, behind one CLI.
// Results go to stdout (JSON/CSV only); diagnostics go to stderr.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "opradius/bounds.hpp"
#include "opradius/harness.hpp"
#include "opradius/matcore.hpp"
#include "opradius/matrix_io.hpp"
#include "opradius/radii.hpp"
#include "opradius/transforms.hpp"

namespace {

using namespace opradius;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "opradius 1.0.0";

ordered_json enclosure_json(const Enclosure& e) {
  ordered_json j;
  j["lower"] = e.lower;
  j["upper"] = e.upper;
  j["tol"] = e.tol_requested;
  j["evaluations"] = e.evaluations;
  ordered_json w;
  ordered_json re = ordered_json::array(), im = ordered_json::array();
  for (Eigen::Index i = 0; i < e.witness.x.size(); ++i) {
    re.push_back(e.witness.x(i).real());
    im.push_back(e.witness.x(i).imag());
  }
  w["x_re"] = re;
  w["x_im"] = im;
  w["angles"] = e.witness.angles;
  w["objective"] = e.witness.objective;
  j["witness"] = w;
  return j;
}

std::string_view kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::Lower: return "lower";
    case BoundKind::Upper: return "upper";
    default: return "twosided";
  }
}

std::string_view target_name(BoundTarget t) {
  switch (t) {
    case BoundTarget::W: return "w";
    case BoundTarget::We: return "we";
    default: return "w_offdiag";
  }
}

std::string_view signature_name(BoundSignature s) {
  switch (s) {
    case BoundSignature::T: return "T";
    case BoundSignature::BC: return "B,C";
    case BoundSignature::XY: return "X,Y";
    case BoundSignature::Tt: return "T,t";
    case BoundSignature::Tr: return "T,r";
    case BoundSignature::BCt: return "B,C,t";
    case BoundSignature::BCr: return "B,C,r";
  }
  return "?";
}

ordered_json bound_result_json(const BoundResult& row) {
  ordered_json rj;
  rj["id"] = std::string(to_string(row.id));
  rj["kind"] = std::string(kind_name(row.kind));
  rj["target"] = std::string(target_name(row.target));
  rj["value"] = row.value;
  if (row.upper_value) rj["upper_value"] = *row.upper_value;
  rj["digest"] = row.inputs_digest;
  ordered_json bj;
  for (const auto& [k, v] : row.breakdown) bj[k] = v;
  rj["breakdown"] = bj;
  return rj;
}

int run_compute(const std::string& input, const std::string& input2, const std::string& quantity,
                std::optional<double> tol) {
  CMatrix t = matrix_from_json_file(input);
  Enclosure e;
  if (quantity == "w") {
    e = numerical_radius(t, tol ? *tol : default_tol(t));
  } else {
    if (input2.empty())
      throw InvalidSpec("compute: --quantity we needs --input2 for the second operator");
    CMatrix c = matrix_from_json_file(input2);
    e = euclidean_radius(t, c, tol ? *tol : 1e-8 * std::max(scale_of(t), scale_of(c)));
  }
  std::cout << enclosure_json(e).dump() << "\n";
  return 0;
}

int run_bounds(const std::string& input, const std::string& input2, const std::string& x_path,
               const std::string& y_path, const std::string& set, double t_param, double r_param,
               const std::string& format) {
  BoundInputs in;
  in.t = t_param;
  in.r = r_param;
  BoundTarget target;
  Enclosure ref;
  if (!x_path.empty() || !y_path.empty()) {
    if (x_path.empty() || y_path.empty() || !input.empty())
      throw InvalidSpec("bounds: --x/--y must be given together, without --input");
    in.X = matrix_from_json_file(x_path);
    in.Y = matrix_from_json_file(y_path);
    target = BoundTarget::WOffdiag;
    CMatrix block = offdiag_block(*in.X, *in.Y);
    ref = numerical_radius(block, default_tol(block));
  } else if (!input2.empty()) {
    if (input.empty()) throw InvalidSpec("bounds: --input2 requires --input");
    in.B = matrix_from_json_file(input);
    in.C = matrix_from_json_file(input2);
    target = BoundTarget::We;
    ref = euclidean_radius(*in.B, *in.C,
                           1e-8 * std::max(scale_of(*in.B), scale_of(*in.C)));
  } else {
    if (input.empty()) throw InvalidSpec("bounds: give --input, --input/--input2 or --x/--y");
    in.T = matrix_from_json_file(input);
    target = BoundTarget::W;
    ref = numerical_radius(*in.T, default_tol(*in.T));
  }

  std::vector<BoundId> ids;
  if (set == "all") {
    for (const BoundInfo& info : list_bounds())
      if (info.target == target) ids.push_back(info.id);
  } else {
    std::istringstream ss(set);
    std::string name;
    while (std::getline(ss, name, ',')) {
      auto id = parse_bound_id(name);
      if (!id) throw InvalidSpec("bounds: unknown bound id \"" + name + "\"");
      if (bound_info(*id).target != target)
        throw InvalidSpec("bounds: id \"" + name + "\" does not match the given inputs");
      ids.push_back(*id);
    }
    if (ids.empty()) throw InvalidSpec("bounds: empty --set");
  }

  WCache cache;
  std::vector<BoundResult> rows;
  for (BoundId id : ids) {
    try {
      rows.push_back(evaluate(id, in, &cache));
    } catch (const NotApplicable& e) {
      std::cerr << "skipping " << to_string(id) << ": " << e.what() << "\n";
    }
  }

  if (format == "json") {
    ordered_json j;
    ordered_json rj;
    rj["lower"] = ref.lower;
    rj["upper"] = ref.upper;
    j["reference"] = rj;
    ordered_json arr = ordered_json::array();
    for (const BoundResult& row : rows) arr.push_back(bound_result_json(row));
    j["bounds"] = arr;
    std::cout << j.dump() << "\n";
  } else {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "id,kind,target,value,upper_value,w_uncertainty,ref_lower,ref_upper\n";
    for (const BoundResult& row : rows) {
      os << to_string(row.id) << ',' << kind_name(row.kind) << ',' << target_name(row.target)
         << ',' << row.value << ',';
      if (row.upper_value) os << *row.upper_value;
      os << ',' << breakdown_get(row.breakdown, "w_uncertainty") << ',' << ref.lower << ','
         << ref.upper << '\n';
    }
    std::cout << os.str();
  }
  return 0;
}

int run_verify(const std::string& ensemble, int dim, int trials, std::uint64_t seed, int rank,
               const std::string& out, const std::string& properties_arg, int threads,
               const std::string& format) {
  std::vector<EnsembleSpec> specs;
  if (ensemble.empty() || ensemble == "default") {
    specs = default_campaign(seed, trials);
  } else {
    auto kind = parse_ensemble_kind(ensemble);
    if (!kind) throw InvalidSpec("verify: unknown ensemble \"" + ensemble + "\"");
    EnsembleSpec s;
    s.kind = *kind;
    s.dim = dim;
    s.trials = trials;
    s.seed = seed;
    s.rank = rank;
    specs.push_back(s);
  }
  std::vector<std::string> properties;
  {
    std::istringstream ss(properties_arg);
    std::string name;
    while (std::getline(ss, name, ','))
      if (!name.empty()) properties.push_back(name);
  }
  VerificationReport report = run_campaign(specs, properties, seed, threads);
  std::cerr << "campaign: " << report.summary.trials << " trials, "
            << report.summary.violation_count << " violations, "
            << report.summary.warning_count << " warnings, "
            << report.summary.wall_time_seconds << " s\n";
  if (!out.empty()) {
    emit_report(report, format == "csv" ? ReportFormat::Csv : ReportFormat::Json, out);
  } else {
    std::cout << (format == "csv" ? report_to_csv(report) : report_to_json(report)) << "\n";
  }
  return report.summary.violation_count == 0 ? 0 : 1;
}

int run_aluthge(const std::string& input, double t_param, bool with_radius,
                std::optional<double> tol) {
  CMatrix t = matrix_from_json_file(input);
  CMatrix alu = aluthge_t(t, t_param);
  ordered_json j;
  j["matrix"] = ordered_json::parse(matrix_to_json_text(alu));
  j["norm"] = spectral_norm(alu);
  j["t"] = t_param;
  if (with_radius) {
    Enclosure e = numerical_radius(alu, tol ? *tol : default_tol(alu));
    ordered_json rj;
    rj["lower"] = e.lower;
    rj["upper"] = e.upper;
    j["radius"] = rj;
  }
  std::cout << j.dump() << "\n";
  return 0;
}

int run_offdiag(const std::string& x_path, const std::string& y_path) {
  CMatrix x = matrix_from_json_file(x_path);
  CMatrix y = matrix_from_json_file(y_path);
  std::cout << matrix_to_json_text(offdiag_block(x, y)) << "\n";
  return 0;
}

void print_registry() {
  ordered_json arr = ordered_json::array();
  for (const BoundInfo& info : list_bounds()) {
    ordered_json j;
    j["id"] = std::string(info.name);
    j["kind"] = std::string(kind_name(info.kind));
    j["target"] = std::string(target_name(info.target));
    j["signature"] = std::string(signature_name(info.signature));
    j["anchor"] = std::string(info.anchor);
    arr.push_back(j);
  }
  std::cout << arr.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified numerical radius and Euclidean operator radius toolkit"};
  app.set_version_flag("--version", kVersion);
  bool list_bounds_flag = false;
  app.add_flag("--list-bounds", list_bounds_flag, "dump the bound registry and exit");

  std::string input, input2, x_path, y_path, quantity = "w", set = "all", format = "json";
  std::string ensemble, out, properties = "all";
  double t_param = 0.5, r_param = 1.5;
  std::optional<double> tol;
  int dim = 3, trials = 200, rank = -1, threads = 1;
  std::uint64_t seed = 0;

  CLI::App* compute = app.add_subcommand("compute", "certified radius enclosure");
  compute->add_option("--input", input, "matrix JSON file")->required();
  compute->add_option("--quantity", quantity, "w or we")
      ->check(CLI::IsMember({"w", "we"}));
  compute->add_option("--input2", input2, "second operator (we)");
  compute->add_option("--tol", tol, "enclosure tolerance")
      ->check(CLI::PositiveNumber);
  compute->add_option("--format", format, "json")->check(CLI::IsMember({"json"}));

  CLI::App* bounds_cmd = app.add_subcommand("bounds", "evaluate registry bounds");
  bounds_cmd->add_option("--input", input, "matrix JSON file (T, or B with --input2)");
  bounds_cmd->add_option("--input2", input2, "second operator (pair bounds)");
  bounds_cmd->add_option("--x", x_path, "X block (off-diagonal bounds)");
  bounds_cmd->add_option("--y", y_path, "Y block (off-diagonal bounds)");
  bounds_cmd->add_option("--set", set, "all or comma-separated ids");
  bounds_cmd->add_option("--t", t_param, "Aluthge/interpolation parameter in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  bounds_cmd->add_option("--r", r_param, "power parameter in [1,2]")
      ->check(CLI::Range(1.0, 2.0));
  bounds_cmd->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* verify = app.add_subcommand("verify", "run the property campaign");
  verify->add_option("--ensemble", ensemble, "ensemble kind, or 'default' for the full campaign");
  verify->add_option("--dim", dim, "matrix dimension")->check(CLI::PositiveNumber);
  verify->add_option("--trials", trials, "trials per spec")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "campaign seed");
  verify->add_option("--rank", rank, "rank for rank_deficient");
  verify->add_option("--out", out, "report output path");
  verify->add_option("--properties", properties, "all or comma-separated property names");
  verify->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* aluthge = app.add_subcommand("aluthge", "t-Aluthge transform");
  aluthge->add_option("--input", input, "matrix JSON file")->required();
  aluthge->add_option("--t", t_param, "t in [0,1]")->check(CLI::Range(0.0, 1.0));
  bool with_radius = false;
  aluthge->add_flag("--radius", with_radius, "also enclose the numerical radius");
  aluthge->add_option("--tol", tol, "enclosure tolerance")->check(CLI::PositiveNumber);

  CLI::App* offdiag = app.add_subcommand("offdiag", "assemble [[0,X],[Y,0]]");
  offdiag->add_option("--x", x_path, "X block")->required();
  offdiag->add_option("--y", y_path, "Y block")->required();

  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help / --version
      return app.exit(e);
    }
    app.exit(e);
    return 2;
  }

  try {
    if (list_bounds_flag) {
      print_registry();
      return 0;
    }
    if (compute->parsed()) return run_compute(input, input2, quantity, tol);
    if (bounds_cmd->parsed())
      return run_bounds(input, input2, x_path, y_path, set, t_param, r_param, format);
    if (verify->parsed())
      return run_verify(ensemble, dim, trials, seed, rank, out, properties, threads, format);
    if (aluthge->parsed()) return run_aluthge(input, t_param, with_radius, tol);
    if (offdiag->parsed()) return run_offdiag(x_path, y_path);
    std::cerr << app.help() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParameterOutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IOFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

// Pipeline driver: ingest trade flows, fit the ensembles, reduce to the
// GDP-driven parameters, emit observed/expected property tables and sampled
// networks. Subcommands: fit, metrics, figdata, sample, validate.
//
// Exit codes: 0 success, 1 validation failure, 2 input error,
// 3 solver non-convergence.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netens/ensembles.hpp"
#include "netens/gdp_fit.hpp"
#include "netens/graph.hpp"
#include "netens/io.hpp"
#include "netens/metrics.hpp"
#include "netens/sampler.hpp"
#include "netens/solvers.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace netens;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct Manifest {
  std::string edges_path;
  std::string gdp_path;
  std::string output_dir;
  double scale = 1.0;
  std::vector<std::string> models{"bcm", "ecm", "ts"};
  std::string sample_model = "ts";
  std::uint64_t seed = 0;
  int n_samples = 100;
  SolverConfig solver;
};

SolveMode parse_mode(const std::string& name) {
  if (name == "fixed_point") return SolveMode::fixed_point;
  if (name == "newton") return SolveMode::newton;
  throw std::invalid_argument("unknown solver mode: " + name);
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open manifest: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& err) {
    throw std::invalid_argument("manifest parse error: " + std::string(err.what()));
  }
  Manifest m;
  m.edges_path = doc.value("edges", "");
  m.gdp_path = doc.value("gdp", "");
  m.output_dir = doc.value("output_dir", "");
  m.scale = doc.value("scale", 1.0);
  if (doc.contains("models")) m.models = doc["models"].get<std::vector<std::string>>();
  m.sample_model = doc.value("sample_model", "ts");
  m.seed = doc.value("seed", std::uint64_t{0});
  m.n_samples = doc.value("n_samples", 100);
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    m.solver.tol = s.value("tol", 1e-10);
    m.solver.max_iter = s.value("max_iter", 100000);
    m.solver.damping = s.value("damping", 1.0);
    m.solver.mode = parse_mode(s.value("mode", "fixed_point"));
  }
  return m;
}

struct Inputs {
  WeightedGraph graph;
  ConstraintSet local;
  std::optional<GdpVector> gdp;
};

Inputs load_inputs(const Manifest& m) {
  if (m.edges_path.empty()) throw std::invalid_argument("no edge file given");
  const std::vector<DirectedEdge> edges = read_edge_csv(m.edges_path);

  std::vector<std::string> seed_labels;
  std::map<std::string, double> gdp_by_label;
  if (!m.gdp_path.empty()) {
    for (const auto& [label, value] : read_gdp_csv(m.gdp_path)) {
      if (!gdp_by_label.emplace(label, value).second)
        throw std::invalid_argument("duplicate country in gdp file: " + label);
      seed_labels.push_back(label);
    }
  }

  Inputs in{symmetrize(edges, m.scale, seed_labels), {}, {}};
  in.local = constraints(in.graph);
  if (!m.gdp_path.empty()) {
    std::vector<double> raw;
    raw.reserve(static_cast<std::size_t>(in.graph.n()));
    for (const std::string& label : in.graph.labels()) {
      const auto it = gdp_by_label.find(label);
      if (it == gdp_by_label.end())
        throw std::invalid_argument("node " + label + " has no gdp entry");
      raw.push_back(it->second);
    }
    in.gdp = rescale_gdp(raw);
  }
  return in;
}

fs::path output_dir(const Manifest& m) {
  std::string dir = m.output_dir;
  if (dir.empty()) {
    const char* env = std::getenv("NETENS_OUT_DIR");
    dir = env != nullptr ? env : ".";
  }
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

json report_to_json(const SolveReport& report, double exact_ll) {
  return json{{"iterations", report.iterations},
              {"residual", report.residual},
              {"converged", report.converged},
              {"log_likelihood", exact_ll},
              {"message", report.message}};
}

void write_fit_csv(const fs::path& path, const std::vector<std::string>& labels,
                   const FitnessVectors& fitted) {
  std::string text;
  const bool ecm = fitted.kind == ModelKind::ecm;
  text += ecm ? "node,x,y\n" : (fitted.y.empty() ? "node,z\n" : "node,z,y\n");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    text += labels[i];
    text += ',';
    text += fmt_double(ecm ? fitted.x[i] : fitted.z[i]);
    if (!fitted.y.empty()) {
      text += ',';
      text += fmt_double(fitted.y[i]);
    }
    text += '\n';
  }
  write_text(path, text);
}

FitnessVectors read_fit_csv(const fs::path& path, ModelKind kind,
                            const std::vector<std::string>& labels) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("fitted artifact missing: " + path.string() +
                             " (run `fit` first)");
  std::string line;
  std::getline(in, line);
  FitnessVectors out;
  out.kind = kind;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_row(line);
    if (row >= labels.size() || fields.size() < 2 || fields[0] != labels[row])
      throw std::invalid_argument("fitted artifact " + path.string() +
                                  " does not match the current node set");
    const double primary = std::stod(fields[1]);
    if (kind == ModelKind::ecm)
      out.x.push_back(primary);
    else
      out.z.push_back(primary);
    if (fields.size() > 2) out.y.push_back(std::stod(fields[2]));
    ++row;
  }
  if (row != labels.size())
    throw std::invalid_argument("fitted artifact " + path.string() +
                                " does not match the current node set");
  out.validate();
  return out;
}

std::string property_csv(const std::vector<std::string>& labels,
                         const NodePropertyTable& table, const std::string& model) {
  auto cell = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
  };
  std::string text;
  for (int i = 0; i < table.n(); ++i) {
    const PropertyRow& row = table.rows[static_cast<std::size_t>(i)];
    text += model + ',' + labels[static_cast<std::size_t>(i)] + ',' + fmt_double(row.k) +
            ',' + fmt_double(row.s) + ',' + cell(row.annd) + ',' + cell(row.clustering) +
            ',' + cell(row.anns) + ',' + cell(row.wclustering) + '\n';
  }
  return text;
}

const std::string kPropertyHeader = "model,node,k,s,annd,clustering,anns,wclustering\n";

void write_pair_predictions(const fs::path& path, const EnsembleModel& model) {
  std::string text = "i,j,p,expected_w\n";
  for (int i = 0; i < model.n(); ++i)
    for (int j = i + 1; j < model.n(); ++j) {
      text += std::to_string(i) + ',' + std::to_string(j) + ',' +
              fmt_double(model.p(i, j)) + ',' + fmt_double(model.expected_w(i, j)) + '\n';
    }
  write_text(path, text);
}

json gdp_fit_to_json(const GdpFitResult& fit, const std::vector<std::string>& labels) {
  json excluded = json::array();
  for (int i : fit.excluded_nodes) excluded.push_back(labels[static_cast<std::size_t>(i)]);
  return json{{"a", fit.params.a},
              {"b", fit.params.b},
              {"c", fit.params.c},
              {"a_status", fit.a_status == FitAStatus::ok
                               ? "ok"
                               : (fit.a_status == FitAStatus::zero_links ? "zero_links"
                                                                         : "saturated")},
              {"r2_x", fit.r2_x},
              {"r2_y", fit.r2_y},
              {"sqrt_a_regression", fit.sqrt_a_regression},
              {"expected_L", fit.expected_links},
              {"observed_L", fit.observed_links},
              {"expected_T", fit.expected_strength},
              {"observed_T", fit.observed_strength},
              {"excluded_nodes", excluded}};
}

GdpFitResult read_gdp_fit(const fs::path& path, const std::vector<std::string>& labels) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("gdp fit artifact missing: " + path.string() +
                             " (run `fit` with the gdpts model first)");
  json doc;
  in >> doc;
  GdpFitResult fit;
  fit.params.a = doc.at("a").get<double>();
  fit.params.b = doc.at("b").get<double>();
  fit.params.c = doc.at("c").get<double>();
  fit.r2_x = doc.value("r2_x", 0.0);
  fit.r2_y = doc.value("r2_y", 0.0);
  fit.expected_links = doc.value("expected_L", 0.0);
  fit.observed_links = doc.value("observed_L", 0.0);
  fit.expected_strength = doc.value("expected_T", 0.0);
  fit.observed_strength = doc.value("observed_T", 0.0);
  for (const auto& label : doc.value("excluded_nodes", std::vector<std::string>{})) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it != labels.end())
      fit.excluded_nodes.push_back(static_cast<int>(it - labels.begin()));
  }
  return fit;
}

int cmd_fit(const Manifest& m) {
  const Inputs in = load_inputs(m);
  const fs::path dir = output_dir(m);
  if (in.local.total_links == 0)
    std::cerr << "warning: edge list produced no links; fits are all-zero\n";

  std::set<std::string> models(m.models.begin(), m.models.end());
  const bool want_gdpts = models.count("gdpts") > 0;
  if (want_gdpts) models.insert("ts");  // the reduction reads the ts y-relation
  for (const std::string& name : models)
    if (name != "bcm" && name != "ecm" && name != "ts" && name != "gdpts")
      throw std::invalid_argument("unknown model: " + name);
  if (want_gdpts && !in.gdp)
    throw std::invalid_argument("the gdpts model needs a gdp file");

  bool all_converged = true;
  std::map<std::string, FitnessVectors> fits;
  for (const std::string& name : {std::string("bcm"), std::string("ecm"), std::string("ts")}) {
    if (models.count(name) == 0) continue;
    auto [fitted, report] = name == "bcm"   ? solve_bcm(in.local, m.solver)
                            : name == "ecm" ? solve_ecm(in.local, m.solver)
                                            : solve_ts(in.local, m.solver);
    const double exact_ll = log_likelihood(fitted, in.graph);
    write_fit_csv(dir / (name + "_fit.csv"), in.graph.labels(), fitted);
    write_json(dir / (name + "_report.json"), report_to_json(report, exact_ll));
    if (!report.converged) {
      all_converged = false;
      std::cerr << "warning: " << name << " fit did not converge: " << report.message
                << "\n";
    }
    fits.emplace(name, std::move(fitted));
  }

  if (want_gdpts) {
    const GdpFitResult fit = fit_gdp_model(in.local, fits.at("ts"), *in.gdp);
    write_json(dir / "gdp_fit.json", gdp_fit_to_json(fit, in.graph.labels()));
  }
  return all_converged ? 0 : kExitSolver;
}

int cmd_metrics(const Manifest& m) {
  const Inputs in = load_inputs(m);
  const fs::path dir = output_dir(m);
  std::ofstream out(dir / "observed_metrics.csv", std::ios::binary);
  write_property_csv(out, in.graph.labels(), property_table(in.graph));
  return 0;
}

int cmd_figdata(const Manifest& m) {
  const Inputs in = load_inputs(m);
  const fs::path dir = output_dir(m);
  const std::vector<std::string>& labels = in.graph.labels();
  const NodePropertyTable observed = property_table(in.graph);
  const std::set<std::string> models(m.models.begin(), m.models.end());

  std::optional<FitnessVectors> bcm, ecm, ts;
  if (models.count("bcm"))
    bcm = read_fit_csv(dir / "bcm_fit.csv", ModelKind::bcm, labels);
  if (models.count("ecm"))
    ecm = read_fit_csv(dir / "ecm_fit.csv", ModelKind::ecm, labels);
  if (models.count("ts")) ts = read_fit_csv(dir / "ts_fit.csv", ModelKind::ts, labels);

  // Binary panels: observed vs degree-only ensemble.
  if (bcm) {
    const EnsembleModel model = EnsembleModel::from_fitness(*bcm);
    write_text(dir / "fig1.csv", kPropertyHeader + property_csv(labels, observed, "observed") +
                                     property_csv(labels, model.expected_table(), "bcm"));
    write_pair_predictions(dir / "predictions_bcm.csv", model);
  }
  // Binary + weighted panels under the joint ensemble.
  if (ecm) {
    const EnsembleModel model = EnsembleModel::from_fitness(*ecm);
    write_text(dir / "fig3.csv", kPropertyHeader + property_csv(labels, observed, "observed") +
                                     property_csv(labels, model.expected_table(), "ecm"));
    write_pair_predictions(dir / "predictions_ecm.csv", model);
  }
  if (ts) {
    const EnsembleModel model = EnsembleModel::from_fitness(*ts);
    write_pair_predictions(dir / "predictions_ts.csv", model);
  }
  // Connection-probability scatter between the two fits.
  if (ecm && bcm) {
    const PairProbComparison cmp = compare_probs(*ecm, *bcm);
    std::string text = "i,j,p_ecm,p_bcm\n";
    for (const auto& row : cmp.rows)
      text += std::to_string(row.i) + ',' + std::to_string(row.j) + ',' +
              fmt_double(row.p_ecm) + ',' + fmt_double(row.p_bcm) + '\n';
    write_text(dir / "fig5.csv", text);
    write_json(dir / "fig5_summary.json",
               json{{"max_abs_deviation", cmp.max_abs_deviation},
                    {"rms_deviation", cmp.rms_deviation},
                    {"pearson", cmp.pearson}});
  }
  // GDP-driven panels with the gravity baseline alongside.
  if (models.count("gdpts")) {
    if (!in.gdp) throw std::invalid_argument("the gdpts figure needs a gdp file");
    const GdpFitResult fit = read_gdp_fit(dir / "gdp_fit.json", labels);
    const EnsembleModel gdpts = EnsembleModel::from_gdp_ts(fit.params, *in.gdp);
    const EnsembleModel wcm =
        EnsembleModel::from_wcm(*in.gdp, static_cast<double>(in.local.total_strength));
    write_text(dir / "fig6.csv", kPropertyHeader + property_csv(labels, observed, "observed") +
                                     property_csv(labels, gdpts.expected_table(), "gdpts") +
                                     property_csv(labels, wcm.expected_table(), "wcm"));
    write_pair_predictions(dir / "predictions_gdpts.csv", gdpts);
    write_pair_predictions(dir / "predictions_wcm.csv", wcm);
  }
  return 0;
}

EnsembleModel load_sampling_model(const Manifest& m, const Inputs& in, const fs::path& dir) {
  const std::vector<std::string>& labels = in.graph.labels();
  if (m.sample_model == "ecm")
    return EnsembleModel::from_fitness(read_fit_csv(dir / "ecm_fit.csv", ModelKind::ecm, labels));
  if (m.sample_model == "ts")
    return EnsembleModel::from_fitness(read_fit_csv(dir / "ts_fit.csv", ModelKind::ts, labels));
  if (m.sample_model == "gdpts") {
    if (!in.gdp) throw std::invalid_argument("sampling gdpts needs a gdp file");
    return EnsembleModel::from_gdp_ts(read_gdp_fit(dir / "gdp_fit.json", labels).params, *in.gdp);
  }
  throw std::invalid_argument("unknown sample model: " + m.sample_model);
}

int cmd_sample(const Manifest& m) {
  const Inputs in = load_inputs(m);
  const fs::path dir = output_dir(m);
  const EnsembleModel model = load_sampling_model(m, in, dir);
  const fs::path samples = dir / "samples";
  fs::create_directories(samples);
  for (int index = 0; index < m.n_samples; ++index) {
    const std::uint64_t seed =
        mix64(m.seed ^ (0x5eedULL + static_cast<std::uint64_t>(index)));
    const WeightedGraph g = sample_graph(model, seed, in.graph.labels());
    std::string text = "source,target,volume\n";
    for (int i = 0; i < g.n(); ++i)
      for (const Edge& e : g.neighbors(i)) {
        if (e.to < i) continue;
        text += g.labels()[static_cast<std::size_t>(i)] + ',' +
                g.labels()[static_cast<std::size_t>(e.to)] + ',' +
                std::to_string(e.weight) + '\n';
      }
    char name[32];
    std::snprintf(name, sizeof(name), "sample_%04d.csv", index);
    write_text(samples / name, text);
  }

  SampleConfig cfg{m.seed, m.n_samples};
  const EnsembleStats st = ensemble_statistics(model, cfg);
  std::string text =
      "node,mean_k,var_k,mean_s,var_s,mean_annd,mean_clustering,mean_anns,mean_wclustering\n";
  for (int i = 0; i < model.n(); ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    text += in.graph.labels()[si] + ',' + fmt_double(st.mean_degree[si]) + ',' +
            fmt_double(st.var_degree[si]) + ',' + fmt_double(st.mean_strength[si]) + ',' +
            fmt_double(st.var_strength[si]) + ',' +
            (st.n_annd[si] ? fmt_double(st.mean_annd[si]) : "") + ',' +
            (st.n_clustering[si] ? fmt_double(st.mean_clustering[si]) : "") + ',' +
            (st.n_anns[si] ? fmt_double(st.mean_anns[si]) : "") + ',' +
            (st.n_wclustering[si] ? fmt_double(st.mean_wclustering[si]) : "") + '\n';
  }
  write_text(dir / "ensemble_stats.csv", text);
  return 0;
}

int cmd_validate(const Manifest& m) {
  const Inputs in = load_inputs(m);
  const fs::path dir = output_dir(m);
  const std::vector<std::string>& labels = in.graph.labels();
  const std::set<std::string> models(m.models.begin(), m.models.end());
  json checks = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, const std::string& detail) {
    checks.push_back(json{{"name", name}, {"pass", pass}, {"detail", detail}});
    all_pass = all_pass && pass;
  };

  std::optional<FitnessVectors> ecm, ts;
  if (models.count("ecm"))
    ecm = read_fit_csv(dir / "ecm_fit.csv", ModelKind::ecm, labels);
  if (models.count("ts")) ts = read_fit_csv(dir / "ts_fit.csv", ModelKind::ts, labels);

  // Constraint residuals of the stored vectors against the observed graph.
  auto residual_check = [&](const std::string& name, const FitnessVectors& fitted) {
    const EnsembleModel model = EnsembleModel::from_fitness(fitted);
    double worst = 0.0;
    for (int i = 0; i < in.graph.n(); ++i) {
      const double k = static_cast<double>(in.local.degrees[static_cast<std::size_t>(i)]);
      const double s = static_cast<double>(in.local.strengths[static_cast<std::size_t>(i)]);
      if (k > 0.0)
        worst = std::max(worst, std::abs(model.expected_degree(i) - k) / k);
      if (s > 0.0 && fitted.kind != ModelKind::bcm)
        worst = std::max(worst, std::abs(model.expected_strength(i) - s) / s);
    }
    record(name + "_constraint_residual", worst <= 1e-8,
           "max relative residual " + fmt_double(worst));
  };
  if (models.count("bcm"))
    residual_check("bcm", read_fit_csv(dir / "bcm_fit.csv", ModelKind::bcm, labels));
  if (ecm) residual_check("ecm", *ecm);
  if (ts) residual_check("ts", *ts);

  // Moment identities of the fitted pair distributions.
  auto moment_check = [&](const std::string& name, const FitnessVectors& fitted) {
    double worst = 0.0;
    const int n = fitted.n();
    const int stride = std::max(1, n / 16);
    for (int i = 0; i < n; i += stride)
      for (int j = i + 1; j < n; j += stride) {
        const std::size_t si = static_cast<std::size_t>(i);
        const std::size_t sj = static_cast<std::size_t>(j);
        PairPrediction pr;
        double m0, m1;
        if (fitted.kind == ModelKind::ecm) {
          pr = ecm_pair(fitted.x[si], fitted.x[sj], fitted.y[si], fitted.y[sj]);
          m0 = ecm_weight_moment(fitted.x[si], fitted.x[sj], fitted.y[si], fitted.y[sj], 0.0);
          m1 = ecm_weight_moment(fitted.x[si], fitted.x[sj], fitted.y[si], fitted.y[sj], 1.0);
        } else {
          pr = ts_pair(fitted.z[si], fitted.z[sj], fitted.y[si], fitted.y[sj]);
          m0 = ts_weight_moment(fitted.z[si], fitted.z[sj], fitted.y[si], fitted.y[sj], 0.0);
          m1 = ts_weight_moment(fitted.z[si], fitted.z[sj], fitted.y[si], fitted.y[sj], 1.0);
        }
        worst = std::max(worst, std::abs(m0 - pr.p));
        worst = std::max(worst,
                         std::abs(m1 - pr.expected_w) / std::max(1.0, pr.expected_w));
      }
    record(name + "_moment_identities", worst <= 1e-10,
           "max scaled deviation " + fmt_double(worst));
  };
  if (ecm) moment_check("ecm", *ecm);
  if (ts) moment_check("ts", *ts);

  // Monte-Carlo agreement of sampled constraints with analytic expectations.
  const FitnessVectors* mc_target = ecm ? &*ecm : (ts ? &*ts : nullptr);
  if (mc_target != nullptr) {
    const EnsembleModel model = EnsembleModel::from_fitness(*mc_target);
    SampleConfig cfg{m.seed, std::min(m.n_samples, 500)};
    const EnsembleStats st = ensemble_statistics(model, cfg);
    int outliers = 0;
    for (int i = 0; i < model.n(); ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      const double se_k =
          std::sqrt(std::max(st.var_degree[si], 1e-12) / cfg.n_samples);
      if (std::abs(st.mean_degree[si] - model.expected_degree(i)) > 5.0 * se_k) ++outliers;
      const double se_s =
          std::sqrt(std::max(st.var_strength[si], 1e-12) / cfg.n_samples);
      if (std::abs(st.mean_strength[si] - model.expected_strength(i)) > 5.0 * se_s)
        ++outliers;
    }
    record("monte_carlo_constraints", outliers == 0,
           std::to_string(outliers) + " nodes beyond 5 standard errors over " +
               std::to_string(cfg.n_samples) + " samples");
  }

  // GDP reduction bookkeeping.
  if (models.count("gdpts")) {
    const GdpFitResult fit = read_gdp_fit(dir / "gdp_fit.json", labels);
    const double gap_l =
        fit.observed_links > 0.0
            ? std::abs(fit.expected_links - fit.observed_links) / fit.observed_links
            : 0.0;
    record("gdp_expected_links", gap_l <= 1e-9, "relative gap " + fmt_double(gap_l));
    const double gap_t =
        fit.observed_strength > 0.0
            ? std::abs(fit.expected_strength - fit.observed_strength) / fit.observed_strength
            : 0.0;
    record("gdp_strength_gap_reported", std::isfinite(gap_t),
           "relative gap " + fmt_double(gap_t) + " (not constrained to vanish)");
  }

  write_json(dir / "validation.json", json{{"all_pass", all_pass}, {"checks", checks}});
  return all_pass ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maximum-entropy ensembles of weighted trade networks"};
  app.require_subcommand(1);

  std::string manifest_path;
  Manifest overrides;
  bool has_edges = false, has_gdp = false, has_out = false, has_scale = false;
  bool has_models = false, has_seed = false, has_samples = false;
  bool has_tol = false, has_iter = false, has_damping = false, has_mode = false;
  bool has_sample_model = false;
  std::string mode_name;
  std::vector<std::string> model_list;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-m,--manifest", manifest_path, "JSON manifest of the run");
    cmd->add_option("--edges", overrides.edges_path)->each([&](const std::string&) { has_edges = true; });
    cmd->add_option("--gdp", overrides.gdp_path)->each([&](const std::string&) { has_gdp = true; });
    cmd->add_option("--out", overrides.output_dir)->each([&](const std::string&) { has_out = true; });
    cmd->add_option("--scale", overrides.scale)->each([&](const std::string&) { has_scale = true; });
    cmd->add_option("--models", model_list)->delimiter(',')->each([&](const std::string&) { has_models = true; });
    cmd->add_option("--seed", overrides.seed)->each([&](const std::string&) { has_seed = true; });
    cmd->add_option("--n-samples", overrides.n_samples)->each([&](const std::string&) { has_samples = true; });
    cmd->add_option("--tol", overrides.solver.tol)->each([&](const std::string&) { has_tol = true; });
    cmd->add_option("--max-iter", overrides.solver.max_iter)->each([&](const std::string&) { has_iter = true; });
    cmd->add_option("--damping", overrides.solver.damping)->each([&](const std::string&) { has_damping = true; });
    cmd->add_option("--mode", mode_name)->each([&](const std::string&) { has_mode = true; });
    cmd->add_option("--sample-model", overrides.sample_model)->each([&](const std::string&) { has_sample_model = true; });
  };

  CLI::App* fit = app.add_subcommand("fit", "fit the requested ensembles");
  CLI::App* metrics = app.add_subcommand("metrics", "observed property table");
  CLI::App* figdata = app.add_subcommand("figdata", "plot-ready figure tables");
  CLI::App* sample = app.add_subcommand("sample", "draw networks from a fitted ensemble");
  CLI::App* validate = app.add_subcommand("validate", "cross-check fitted artifacts");
  for (CLI::App* cmd : {fit, metrics, figdata, sample, validate}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    Manifest m;
    if (!manifest_path.empty()) m = load_manifest(manifest_path);
    if (has_edges) m.edges_path = overrides.edges_path;
    if (has_gdp) m.gdp_path = overrides.gdp_path;
    if (has_out) m.output_dir = overrides.output_dir;
    if (has_scale) m.scale = overrides.scale;
    if (has_models) m.models = model_list;
    if (has_seed) m.seed = overrides.seed;
    if (has_samples) m.n_samples = overrides.n_samples;
    if (has_tol) m.solver.tol = overrides.solver.tol;
    if (has_iter) m.solver.max_iter = overrides.solver.max_iter;
    if (has_damping) m.solver.damping = overrides.solver.damping;
    if (has_mode) m.solver.mode = parse_mode(mode_name);
    if (has_sample_model) m.sample_model = overrides.sample_model;

    if (fit->parsed()) return cmd_fit(m);
    if (metrics->parsed()) return cmd_metrics(m);
    if (figdata->parsed()) return cmd_figdata(m);
    if (sample->parsed()) return cmd_sample(m);
    if (validate->parsed()) return cmd_validate(m);
    return kExitInput;
  } catch (const std::exception& err) {
    std::cerr << json{{"error", err.what()}}.dump() << "\n";
    return kExitInput;
  }
}

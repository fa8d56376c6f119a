#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lskl/divergence.hpp"
#include "lskl/error.hpp"
#include "lskl/minkl.hpp"
#include "lskl/priors.hpp"
#include "lskl/selection.hpp"
#include "lskl/text_form.hpp"

namespace lskl::cli {

namespace {

using Json = nlohmann::ordered_json;

// Floats carry 12 significant digits; non-finite values become strings.
Json num(double v) {
  if (!std::isfinite(v)) return format_number(v);
  return std::stod(format_number(v));
}

Json opt_num(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

std::string cell(double v) { return format_number(v); }
std::string cell(bool v) { return v ? "true" : "false"; }

struct Report {
  Json json;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> footer;  // extra lines for the table view
};

struct Common {
  std::string format = "json";
  std::string output;
  std::uint64_t seed = 1;
};

Json common_config(const Common& c, const char* subcommand) {
  Json j;
  j["subcommand"] = subcommand;
  j["format"] = c.format;
  j["output"] = c.output.empty() ? Json(nullptr) : Json(c.output);
  j["seed"] = c.seed;
  return j;
}

std::string render(const Report& r, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    os << r.json.dump(2) << '\n';
  } else if (format == "csv") {
    const auto line = [&](const std::vector<std::string>& v) {
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
      os << '\n';
    };
    line(r.header);
    for (const auto& row : r.rows) line(row);
  } else {
    std::vector<std::size_t> width(r.header.size());
    for (std::size_t i = 0; i < r.header.size(); ++i) width[i] = r.header[i].size();
    for (const auto& row : r.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    const auto line = [&](const std::vector<std::string>& v) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i ? "  " : "") << v[i];
        if (i + 1 < v.size()) os << std::string(width[i] - v[i].size(), ' ');
      }
      os << '\n';
    };
    line(r.header);
    for (const auto& row : r.rows) line(row);
    for (const auto& f : r.footer) os << f << '\n';
  }
  return os.str();
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kNoClosedForm:
      return kExitUsage;
    case ErrorCode::kIo:
      return kExitIo;
    default:
      return kExitNumerical;
  }
}

Dataset read_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read data file '" + path + "'");
  Dataset d;
  d.provenance = path;
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::kParse, "data file '" + path + "': bad value '" + tok + "'");
      }
      d.values.push_back(v);
    }
  }
  if (d.empty()) throw Error(ErrorCode::kInvalidArgument, "data file '" + path + "' holds no values");
  return d;
}

Json model_json(const ModelInstance& m) {
  Json j;
  j["family"] = std::string(family_name(m.family()));
  for (std::size_t i = 0; i < m.spec().n_params; ++i) j[std::string(m.spec().param_names[i])] = num(m.param(i));
  if (m.spec().has_shift) j["shift"] = num(m.shift());
  j["text"] = to_text(m);
  return j;
}

Json kl_json(const KLValue& v) {
  Json j;
  j["value"] = num(v.value);
  j["method"] = std::string(to_string(v.method));
  j["error_bound"] = opt_num(v.error_bound);
  j["n_used"] = v.n_used ? Json(*v.n_used) : Json(nullptr);
  j["support_violation"] = v.support_violation;
  return j;
}

ModelPriorPair resolve_model_priors(const std::string& source, Family m1, Family m2, const MinKLOptions& opts) {
  if (source == "uniform") return uniform_model_priors();
  if (source == "paper") {
    const auto losses = reported_losses(m1, m2);
    if (!losses) {
      throw Error(ErrorCode::kInvalidArgument, "no reported losses for " + std::string(family_name(m1)) + " vs " +
                                                   std::string(family_name(m2)));
    }
    return model_prior_pair_from_losses(losses->first, losses->second);
  }
  return model_prior_pair(default_point_prior(m1), default_point_prior(m2), opts);
}

Json pair_json(const ModelPriorPair& p) {
  Json j;
  j["loss1"] = num(p.loss1);
  j["loss2"] = num(p.loss2);
  j["mass1"] = num(p.mass1);
  j["mass2"] = num(p.mass2);
  j["p1"] = num(p.p1);
  j["p2"] = num(p.p2);
  return j;
}

// ---------------------------------------------------------------------------

struct KlArgs {
  std::string from;
  std::string to;
  std::string method = "auto";
  double tol = kDefaultQuadratureTol;
  std::size_t n = kDefaultMonteCarloDraws;
};

Report do_kl(const KlArgs& a, const Common& c) {
  const ModelInstance f1 = parse_model(a.from);
  const ModelInstance f2 = parse_model(a.to);
  KLValue v;
  if (a.method == "auto") {
    v = kl(f1, f2, a.tol);
  } else if (a.method == "closed_form") {
    const auto cf = kl_closed_form(f1, f2);
    if (!cf) throw Error(ErrorCode::kNoClosedForm, "no closed form for " + to_text(f1) + " -> " + to_text(f2));
    v = *cf;
  } else if (a.method == "quadrature") {
    v = kl_quadrature(f1, f2, a.tol);
  } else {
    v = kl_monte_carlo(f1, f2, a.n, c.seed);
  }

  Report r;
  Json cfg = common_config(c, "kl");
  cfg["from"] = to_text(f1);
  cfg["to"] = to_text(f2);
  cfg["method"] = a.method;
  cfg["tol"] = num(a.tol);
  cfg["n"] = a.n;
  r.json["config"] = cfg;
  r.json["result"] = kl_json(v);
  r.header = {"from", "to", "value", "method", "error_bound", "n_used", "support_violation"};
  r.rows.push_back({to_text(f1), to_text(f2), cell(v.value), std::string(to_string(v.method)),
                    v.error_bound ? cell(*v.error_bound) : "", v.n_used ? std::to_string(*v.n_used) : "",
                    cell(v.support_violation)});
  return r;
}

struct MinKlArgs {
  std::string from;
  std::string target;
  std::string method = "auto";
  std::size_t n = 1000000;
  MinKLOptions opts;
};

Report do_minkl(const MinKlArgs& a, const Common& c) {
  const ModelInstance f1 = parse_model(a.from);
  const Family target = parse_family(a.target);
  MinKLResult res = [&] {
    if (a.method == "analytic") {
      auto r = min_kl_analytic(f1, target);
      if (!r) throw Error(ErrorCode::kNoClosedForm, "no analytic minimum for " + to_text(f1) + " -> " + a.target);
      return *r;
    }
    if (a.method == "numeric") return min_kl_numeric(f1, target, a.opts);
    if (a.method == "mle") return min_kl_via_mle(f1, target, a.n, c.seed, a.opts);
    return min_kl(f1, target, a.opts);
  }();

  Report r;
  Json cfg = common_config(c, "minkl");
  cfg["from"] = to_text(f1);
  cfg["target"] = std::string(family_name(target));
  cfg["method"] = a.method;
  cfg["n"] = a.n;
  cfg["starts"] = a.opts.starts;
  cfg["ftol"] = num(a.opts.ftol);
  cfg["search_tol"] = num(a.opts.search_tol);
  cfg["polish_tol"] = num(a.opts.polish_tol);
  r.json["config"] = cfg;

  const MinKLDiagnostics& d = res.diagnostics;
  Json diag;
  diag["starts"] = d.starts;
  diag["starts_converged"] = d.starts_converged;
  diag["starts_agreeing"] = d.starts_agreeing;
  diag["evaluations"] = d.evaluations;
  diag["final_spread"] = num(d.final_spread);
  diag["final_size"] = num(d.final_size);
  diag["converged"] = d.converged;
  diag["feasible"] = d.feasible;
  Json result;
  result["method"] = std::string(to_string(res.method));
  result["value"] = num(res.value.value);
  result["argmin"] = model_json(res.argmin);
  result["kl"] = kl_json(res.value);
  result["diagnostics"] = diag;
  r.json["result"] = result;
  r.header = {"from", "target", "method", "value", "argmin", "converged", "feasible"};
  r.rows.push_back({to_text(f1), std::string(family_name(target)), std::string(to_string(res.method)),
                    cell(res.value.value), to_text(res.argmin), cell(d.converged), cell(d.feasible)});
  return r;
}

struct IndependenceArgs {
  std::string source;
  std::string target;
  std::string grid;
  double tol = 1e-5;
  bool numeric = false;
  MinKLOptions opts;
};

Report do_independence(const IndependenceArgs& a, const Common& c) {
  const Family source = parse_family(a.source);
  const Family target = parse_family(a.target);
  const std::vector<ModelInstance> grid = parse_param_grid(source, a.grid);
  IndependenceOptions io;
  io.use_analytic = !a.numeric;
  io.minkl = a.opts;
  const IndependenceReport rep = independence_check(source, target, grid, a.tol, io);

  Report r;
  Json cfg = common_config(c, "independence");
  cfg["source"] = std::string(family_name(source));
  cfg["target"] = std::string(family_name(target));
  cfg["grid"] = a.grid;
  cfg["tol"] = num(a.tol);
  cfg["numeric"] = a.numeric;
  cfg["polish_tol"] = num(a.opts.polish_tol);
  r.json["config"] = cfg;
  Json points = Json::array();
  r.header = {"source", "value", "method"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Json p;
    p["source"] = to_text(grid[i]);
    p["value"] = num(rep.values[i]);
    p["method"] = std::string(to_string(rep.methods[i]));
    points.push_back(p);
    r.rows.push_back({to_text(grid[i]), cell(rep.values[i]), std::string(to_string(rep.methods[i]))});
  }
  Json result;
  result["spread"] = num(rep.spread);
  result["tolerance"] = num(rep.tolerance);
  result["pass"] = rep.pass;
  result["grid_coverage_ok"] = rep.grid_coverage_ok;
  result["points"] = points;
  r.json["result"] = result;
  r.footer = {"spread " + cell(rep.spread) + "  tolerance " + cell(rep.tolerance) + "  pass " + cell(rep.pass) +
              "  grid_coverage_ok " + cell(rep.grid_coverage_ok)};
  return r;
}

struct PriorsArgs {
  std::string pair;
  std::string m1;
  std::string m2;
  std::string prior1;
  std::string prior2;
  std::string loss_source = "numeric";
  MinKLOptions opts;
};

Report do_priors(PriorsArgs a, const Common& c, std::ostream& err) {
  if (a.pair == "ex1") {
    a.m1 = "halfnormal";
    a.m2 = "exponential";
  } else if (a.pair == "ex2") {
    a.m1 = "lognormal";
    a.m2 = "weibull";
  }
  if (a.m1.empty() || a.m2.empty()) throw Error(ErrorCode::kInvalidArgument, "priors: give --pair or both --m1 and --m2");
  const Family m1 = parse_family(a.m1);
  const Family m2 = parse_family(a.m2);
  const ParameterPrior p1 = a.prior1.empty() ? default_point_prior(m1) : parse_prior(m1, a.prior1);
  const ParameterPrior p2 = a.prior2.empty() ? default_point_prior(m2) : parse_prior(m2, a.prior2);
  const auto reported = reported_losses(m1, m2);

  ModelPriorPair pair;
  std::string note;
  if (a.loss_source == "paper") {
    if (!reported) throw Error(ErrorCode::kInvalidArgument, "priors: no reported losses for this pair");
    pair = model_prior_pair_from_losses(reported->first, reported->second);
  } else {
    pair = model_prior_pair(p1, p2, a.opts);
    note = "losses computed numerically; --loss-source paper uses the originally reported values";
    err << "note: " << note << '\n';
  }

  Report r;
  Json cfg = common_config(c, "priors");
  cfg["pair"] = a.pair.empty() ? Json(nullptr) : Json(a.pair);
  cfg["m1"] = std::string(family_name(m1));
  cfg["m2"] = std::string(family_name(m2));
  cfg["prior1"] = p1.description();
  cfg["prior2"] = p2.description();
  cfg["loss_source"] = a.loss_source;
  r.json["config"] = cfg;
  Json result = pair_json(pair);
  result["loss_source"] = a.loss_source;
  if (reported && a.loss_source != "paper") {
    result["reported"] = pair_json(model_prior_pair_from_losses(reported->first, reported->second));
  }
  if (!note.empty()) result["note"] = note;
  r.json["result"] = result;
  r.header = {"m1", "m2", "loss_source", "loss1", "loss2", "mass1", "mass2", "p1", "p2"};
  r.rows.push_back({std::string(family_name(m1)), std::string(family_name(m2)), a.loss_source, cell(pair.loss1),
                    cell(pair.loss2), cell(pair.mass1), cell(pair.mass2), cell(pair.p1), cell(pair.p2)});
  return r;
}

struct SelectArgs {
  std::string data;
  std::string sample_model;
  std::size_t n = 100;
  std::string m1;
  std::string m2;
  std::string prior1;
  std::string prior2;
  std::string model_priors = "uniform";
  MinKLOptions opts;
};

Report do_select(const SelectArgs& a, const Common& c) {
  const Family m1 = parse_family(a.m1);
  const Family m2 = parse_family(a.m2);
  if (a.data.empty() == a.sample_model.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "select: give exactly one of --data and --sample");
  }
  std::optional<ModelInstance> truth;
  if (!a.sample_model.empty()) truth = parse_model(a.sample_model);
  std::optional<ParameterPrior> fixed1;
  std::optional<ParameterPrior> fixed2;
  if (!a.prior1.empty()) fixed1 = parse_prior(m1, a.prior1);
  if (!a.prior2.empty()) fixed2 = parse_prior(m2, a.prior2);

  const Dataset data = truth ? sample(*truth, a.n, c.seed) : read_data(a.data);
  const ParameterPrior p1 = fixed1 ? *fixed1 : data_centred_prior(m1, data);
  const ParameterPrior p2 = fixed2 ? *fixed2 : data_centred_prior(m2, data);
  const ModelPriorPair mp = resolve_model_priors(a.model_priors, m1, m2, a.opts);
  const double lm1 = log_marginal_likelihood(p1, data);
  const double lm2 = log_marginal_likelihood(p2, data);
  const PosteriorOdds odds = posterior_odds(data, p1, p2, mp);

  Report r;
  Json cfg = common_config(c, "select");
  cfg["data"] = a.data.empty() ? Json(nullptr) : Json(a.data);
  cfg["sample"] = truth ? Json(to_text(*truth)) : Json(nullptr);
  cfg["n"] = data.size();
  cfg["m1"] = std::string(family_name(m1));
  cfg["m2"] = std::string(family_name(m2));
  cfg["prior1"] = fixed1 ? fixed1->description() : "data-centred";
  cfg["prior2"] = fixed2 ? fixed2->description() : "data-centred";
  cfg["model_priors"] = a.model_priors;
  r.json["config"] = cfg;
  Json result;
  result["n"] = data.size();
  result["log_marginal_m1"] = num(lm1);
  result["log_marginal_m2"] = num(lm2);
  result["log_bayes_factor"] = num(odds.log_bayes_factor);
  result["log_prior_odds"] = num(odds.log_prior_odds);
  result["log_posterior_odds"] = num(odds.log_posterior_odds);
  result["posterior_prob_m1"] = num(odds.posterior_probability_m1());
  result["model_priors"] = pair_json(mp);
  r.json["result"] = result;
  r.header = {"n", "log_marginal_m1", "log_marginal_m2", "log_bayes_factor", "log_prior_odds", "log_posterior_odds",
              "posterior_prob_m1"};
  r.rows.push_back({std::to_string(data.size()), cell(lm1), cell(lm2), cell(odds.log_bayes_factor),
                    cell(odds.log_prior_odds), cell(odds.log_posterior_odds), cell(odds.posterior_probability_m1())});
  return r;
}

struct SimulateArgs {
  std::string truth;
  std::string m1;
  std::string m2;
  std::string prior1;
  std::string prior2;
  std::vector<std::size_t> n_grid{20, 100, 500};
  std::size_t reps = 100;
  std::string model_priors = "uniform";
  MinKLOptions opts;
};

Report do_simulate(const SimulateArgs& a, const Common& c) {
  const ModelInstance truth = parse_model(a.truth);
  const Family m1 = parse_family(a.m1);
  const Family m2 = parse_family(a.m2);
  Candidate c1{m1, std::nullopt};
  Candidate c2{m2, std::nullopt};
  if (!a.prior1.empty()) c1.prior = parse_prior(m1, a.prior1);
  if (!a.prior2.empty()) c2.prior = parse_prior(m2, a.prior2);
  BerkOptions bo;
  bo.n_grid = a.n_grid;
  bo.reps = a.reps;
  bo.seed = c.seed;
  bo.minkl = a.opts;
  bo.model_priors = resolve_model_priors(a.model_priors, m1, m2, a.opts);
  const BerkReport rep = berk_consistency_sim(truth, c1, c2, bo);

  Report r;
  Json cfg = common_config(c, "simulate");
  cfg["truth"] = to_text(truth);
  cfg["m1"] = std::string(family_name(m1));
  cfg["m2"] = std::string(family_name(m2));
  cfg["prior1"] = c1.prior ? c1.prior->description() : "data-centred";
  cfg["prior2"] = c2.prior ? c2.prior->description() : "data-centred";
  cfg["n_grid"] = a.n_grid;
  cfg["reps"] = a.reps;
  cfg["model_priors"] = a.model_priors;
  r.json["config"] = cfg;

  Json result;
  result["nearest"] = rep.nearest;
  result["nearest_family"] = std::string(family_name(rep.nearest == 1 ? m1 : m2));
  result["min_kl_m1"] = num(rep.min_kl_m1);
  result["min_kl_m2"] = num(rep.min_kl_m2);
  Json medians = Json::array();
  for (std::size_t i = 0; i < rep.n_grid.size(); ++i) {
    medians.push_back({{"n", rep.n_grid[i]}, {"median_posterior", num(rep.median_posterior[i])}});
    r.footer.push_back("n " + std::to_string(rep.n_grid[i]) + "  median " + cell(rep.median_posterior[i]));
  }
  result["median_posterior"] = medians;
  result["median_nondecreasing"] = rep.median_nondecreasing;
  Json rows = Json::array();
  r.header = {"n", "rep", "posterior_prob"};
  for (const BerkRow& row : rep.rows) {
    rows.push_back({{"n", row.n},
                    {"rep", row.rep},
                    {"posterior_prob", num(row.posterior_prob)},
                    {"log_posterior_odds", num(row.log_posterior_odds)}});
    r.rows.push_back({std::to_string(row.n), std::to_string(row.rep), cell(row.posterior_prob)});
  }
  result["rows"] = rows;
  r.json["result"] = result;
  r.footer.push_back("nearest " + std::string(family_name(rep.nearest == 1 ? m1 : m2)) + "  median_nondecreasing " +
                     cell(rep.median_nondecreasing));
  return r;
}

void add_minkl_options(CLI::App* sub, MinKLOptions& o) {
  sub->add_option("--starts", o.starts, "Multi-start count")->capture_default_str();
  sub->add_option("--ftol", o.ftol, "Simplex objective spread tolerance")->capture_default_str();
  sub->add_option("--search-tol", o.search_tol, "Quadrature tolerance while searching")->capture_default_str();
  sub->add_option("--polish-tol", o.polish_tol, "Quadrature tolerance for the final polish")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kullback-Leibler divergences, minimum-KL projections and objective model priors "
               "for location-scale families"};
  app.name("lskl");
  app.set_config("--config", "", "Read options from a TOML/INI file (command-line flags win)");
  app.require_subcommand(1);

  Common common;
  app.add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  app.add_option("-o,--output", common.output, "Write the report to this file instead of stdout");
  app.add_option("--seed", common.seed, "Random seed")->envname("LSKL_SEED")->capture_default_str();

  std::function<Report()> action;

  KlArgs kl_args;
  auto* kl_cmd = app.add_subcommand("kl", "Divergence between two model instances");
  kl_cmd->add_option("--from", kl_args.from, "Source model, e.g. halfnormal(sigma=1)")->required();
  kl_cmd->add_option("--to", kl_args.to, "Target model")->required();
  kl_cmd->add_option("--method", kl_args.method, "auto, closed_form, quadrature or monte_carlo")
      ->check(CLI::IsMember({"auto", "closed_form", "quadrature", "monte_carlo"}))
      ->capture_default_str();
  kl_cmd->add_option("--tol", kl_args.tol, "Quadrature tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  kl_cmd->add_option("--n", kl_args.n, "Monte Carlo draws")->capture_default_str();
  kl_cmd->callback([&] { action = [&] { return do_kl(kl_args, common); }; });

  MinKlArgs mk_args;
  auto* mk_cmd = app.add_subcommand("minkl", "Minimum-KL projection onto a target family");
  mk_cmd->add_option("--from", mk_args.from, "Source model")->required();
  mk_cmd->add_option("--target", mk_args.target, "Target family")->required();
  mk_cmd->add_option("--method", mk_args.method, "auto, analytic, numeric or mle")
      ->check(CLI::IsMember({"auto", "analytic", "numeric", "mle"}))
      ->capture_default_str();
  mk_cmd->add_option("--n", mk_args.n, "Draws for the mle route")->capture_default_str();
  add_minkl_options(mk_cmd, mk_args.opts);
  mk_cmd->callback([&] { action = [&] { return do_minkl(mk_args, common); }; });

  IndependenceArgs ind_args;
  auto* ind_cmd = app.add_subcommand("independence", "Spread of the minimum over a source parameter grid");
  ind_cmd->add_option("--source", ind_args.source, "Source family")->required();
  ind_cmd->add_option("--target", ind_args.target, "Target family")->required();
  ind_cmd->add_option("--grid", ind_args.grid, "Source grid, e.g. \"mu=[-2,0,3]; tau=[0.25,1,9]\"")->required();
  ind_cmd->add_option("--tol", ind_args.tol, "Pass threshold on the spread")->capture_default_str();
  ind_cmd->add_flag("--numeric", ind_args.numeric, "Skip the analytic registry");
  add_minkl_options(ind_cmd, ind_args.opts);
  ind_cmd->callback([&] { action = [&] { return do_independence(ind_args, common); }; });

  PriorsArgs pr_args;
  auto* pr_cmd = app.add_subcommand("priors", "Model priors from expected minimum-KL losses");
  pr_cmd->add_option("--pair", pr_args.pair, "ex1 (halfnormal/exponential) or ex2 (lognormal/weibull)")
      ->check(CLI::IsMember({"ex1", "ex2"}));
  pr_cmd->add_option("--m1", pr_args.m1, "First family");
  pr_cmd->add_option("--m2", pr_args.m2, "Second family");
  pr_cmd->add_option("--prior1", pr_args.prior1, "Parameter prior for m1, e.g. grid(sigma=[0.5,1,2]; w=[0.25,0.5,0.25])");
  pr_cmd->add_option("--prior2", pr_args.prior2, "Parameter prior for m2");
  pr_cmd->add_option("--loss-source", pr_args.loss_source, "paper (reported losses) or numeric (recomputed)")
      ->check(CLI::IsMember({"paper", "numeric"}))
      ->capture_default_str();
  add_minkl_options(pr_cmd, pr_args.opts);
  pr_cmd->callback([&] { action = [&] { return do_priors(pr_args, common, err); }; });

  SelectArgs sel_args;
  auto* sel_cmd = app.add_subcommand("select", "Bayes factor and posterior odds for two families");
  sel_cmd->add_option("--data", sel_args.data, "File of observations (whitespace or comma separated)");
  sel_cmd->add_option("--sample", sel_args.sample_model, "Simulate the data from this model instead");
  sel_cmd->add_option("--n", sel_args.n, "Sample size for --sample")->capture_default_str();
  sel_cmd->add_option("--m1", sel_args.m1, "First family")->required();
  sel_cmd->add_option("--m2", sel_args.m2, "Second family")->required();
  sel_cmd->add_option("--prior1", sel_args.prior1, "Parameter prior for m1 (default: data-centred grid)");
  sel_cmd->add_option("--prior2", sel_args.prior2, "Parameter prior for m2 (default: data-centred grid)");
  sel_cmd->add_option("--model-priors", sel_args.model_priors, "uniform, paper or numeric")
      ->check(CLI::IsMember({"uniform", "paper", "numeric"}))
      ->capture_default_str();
  sel_cmd->callback([&] { action = [&] { return do_select(sel_args, common); }; });

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Posterior concentration on the KL-nearest candidate");
  sim_cmd->add_option("--truth", sim_args.truth, "Data-generating model")->required();
  sim_cmd->add_option("--m1", sim_args.m1, "First candidate family")->required();
  sim_cmd->add_option("--m2", sim_args.m2, "Second candidate family")->required();
  sim_cmd->add_option("--prior1", sim_args.prior1, "Fixed parameter prior for m1");
  sim_cmd->add_option("--prior2", sim_args.prior2, "Fixed parameter prior for m2");
  sim_cmd->add_option("--n-grid", sim_args.n_grid, "Sample sizes")->delimiter(',')->capture_default_str();
  sim_cmd->add_option("--reps", sim_args.reps, "Replications per sample size")->capture_default_str();
  sim_cmd->add_option("--model-priors", sim_args.model_priors, "uniform, paper or numeric")
      ->check(CLI::IsMember({"uniform", "paper", "numeric"}))
      ->capture_default_str();
  sim_cmd->callback([&] { action = [&] { return do_simulate(sim_args, common); }; });

  for (auto* sub : {kl_cmd, mk_cmd, ind_cmd, pr_cmd, sel_cmd, sim_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Report r = action();
    const std::string text = render(r, common.format);
    if (common.output.empty()) {
      out << text;
    } else {
      std::ofstream f(common.output);
      if (!f) throw Error(ErrorCode::kIo, "cannot open '" + common.output + "' for writing");
      f << text;
      if (!f) throw Error(ErrorCode::kIo, "write to '" + common.output + "' failed");
    }
  } catch (const Error& e) {
    err << "lskl: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "lskl: error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace lskl::cli

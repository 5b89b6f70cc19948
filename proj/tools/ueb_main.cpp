// ueb — area-level shrinkage estimation with an uncertain prior.
//
// Subcommands: fit, cmse, holdout-pc, profile, simulate.
// Exit codes: 0 success, 2 data error, 3 convergence error, 4 config error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ueb/cmse.hpp"
#include "ueb/csv.hpp"
#include "ueb/dataset.hpp"
#include "ueb/em.hpp"
#include "ueb/shrinkage.hpp"
#include "ueb/sim.hpp"

namespace {

using nlohmann::json;

constexpr std::uint64_t kBootStream = 0xC71;  // bootstrap randomness for `cmse`

struct CommonOpts {
  std::string family = "pg";
  std::string p_mode = "free";
  std::string e_step = "analytic";
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iter = 1000;
  std::string out_dir = ".";
};

void add_fit_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--family", o.family, "Area model: fh | pg | bb")->required();
  cmd->add_option("--p-mode", o.p_mode, "free | fixed=<v> (fixed=1 is the classical fit)");
  cmd->add_option("--e-step", o.e_step, "analytic | mc=<draws>");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--tol", o.tol, "EM convergence tolerance");
  cmd->add_option("--max-iter", o.max_iter, "EM iteration cap");
  cmd->add_option("--out", o.out_dir, "Output directory");
}

ueb::FitConfig make_fit_config(const CommonOpts& o) {
  ueb::FitConfig cfg;
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.seed = o.seed;
  if (o.p_mode == "free") {
    cfg.p_mode = ueb::PMode::Free;
  } else if (o.p_mode == "fixed" || o.p_mode.rfind("fixed=", 0) == 0) {
    cfg.p_mode = ueb::PMode::Fixed;
    cfg.p_fixed = o.p_mode == "fixed" ? 1.0 : std::stod(o.p_mode.substr(6));
    if (!(cfg.p_fixed >= 0.0 && cfg.p_fixed <= 1.0))
      throw std::invalid_argument("--p-mode: fixed value must lie in [0, 1]");
  } else {
    throw std::invalid_argument("--p-mode: expected free or fixed=<v>, got '" + o.p_mode + "'");
  }
  if (o.e_step == "analytic") {
    cfg.e_step_mode = ueb::EStepMode::Analytic;
  } else if (o.e_step == "mc" || o.e_step.rfind("mc=", 0) == 0) {
    cfg.e_step_mode = ueb::EStepMode::MonteCarlo;
    if (o.e_step != "mc") cfg.mc_samples = std::stoi(o.e_step.substr(3));
    if (cfg.mc_samples < 1) throw std::invalid_argument("--e-step: mc draw count must be >= 1");
  } else {
    throw std::invalid_argument("--e-step: expected analytic or mc=<draws>, got '" + o.e_step +
                                "'");
  }
  return cfg;
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw std::invalid_argument("--out: cannot create '" + dir + "': " + ec.message());
  return p;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot open output file '" + path.string() + "'");
  os << text;
  if (!os) throw std::invalid_argument("write failed on '" + path.string() + "'");
}

std::string slurp_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ueb::DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a_text(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(const std::string& s) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(fnv1a_text(s)));
  return buf;
}

std::string estimates_csv(const ueb::Dataset& ds, const ueb::FitResult& fit) {
  std::ostringstream os;
  os << "area_id,y,m_hat,r,mu_hat\n";
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto ap = ueb::ub_estimate(ds.records[i], fit.params, fit.family);
    os << ds.ids[i] << ',' << ueb::csv_real(ds.records[i].y) << ',' << ueb::csv_real(ap.m) << ','
       << ueb::csv_real(ap.r) << ',' << ueb::csv_real(ap.mu_tilde) << '\n';
  }
  return os.str();
}

int run_fit(const std::string& data_path, const CommonOpts& opts) {
  const ueb::Family fam = ueb::family_from_name(opts.family);
  const ueb::FitConfig cfg = make_fit_config(opts);
  const ueb::Dataset ds = ueb::load_dataset_csv(data_path, fam);
  const ueb::FitResult fit = ueb::fit_em(ds.records, fam, cfg);
  const auto out = prepare_out_dir(opts.out_dir);
  write_text_file(out / "fit.json", ueb::fit_result_to_json(fit));
  write_text_file(out / "estimates.csv", estimates_csv(ds, fit));
  std::cout << "fit: " << (fit.converged ? "converged" : "STOPPED") << " after " << fit.iterations
            << " iterations, loglik " << fit.loglik << "\n";
  if (!fit.converged) throw ueb::ConvergenceError("EM did not converge within --max-iter");
  return 0;
}

int run_cmse(const std::string& data_path, const std::string& fit_path, int b_reps,
             double z_step, bool zero_omega, const CommonOpts& opts) {
  ueb::FitResult fit;
  try {
    fit = ueb::fit_result_from_json(slurp_file(fit_path));
  } catch (const std::invalid_argument& e) {
    throw ueb::DataError("fit file '" + fit_path + "': " + e.what());
  }
  const ueb::Dataset ds = ueb::load_dataset_csv(data_path, fit.family);
  if (ds.records.size() != fit.n_areas)
    throw ueb::DataError("fit/data mismatch: fit covers " + std::to_string(fit.n_areas) +
                         " areas, data file has " + std::to_string(ds.records.size()));
  if (fit.params.beta.size() != ds.q())
    throw ueb::DataError("fit/data mismatch: fit has " +
                         std::to_string(fit.params.beta.size()) + " coefficients, data file has " +
                         std::to_string(ds.q()) + " covariate columns");
  if (b_reps < 2) throw std::invalid_argument("--bootstrap: need at least 2 replicates");

  ueb::FitConfig cfg = make_fit_config(opts);
  cfg.p_mode = fit.p_mode;  // refits mirror the original fit
  if (fit.p_mode == ueb::PMode::Fixed) cfg.p_fixed = fit.params.p;
  const bool p_free = fit.p_mode == ueb::PMode::Free;

  ueb::DerivativeConfig dcfg = ueb::DerivativeConfig::for_area_count(ds.records.size(), p_free);
  if (z_step > 0.0) dcfg.z = z_step;

  ueb::UncertaintyEstimates unc;
  if (zero_omega) {
    const auto k = static_cast<Eigen::Index>(ueb::pack_params(fit.params, p_free).size());
    unc.omega = Eigen::MatrixXd::Zero(k, k);
    unc.bias = Eigen::VectorXd::Zero(k);
    unc.used = b_reps;
    unc.p_free = p_free;
  } else {
    ueb::RngStream rng(opts.seed, kBootStream);
    unc = ueb::bootstrap_uncertainty(ds.records, fit.params, fit.family, b_reps, cfg, rng);
  }

  std::vector<ueb::CmseComponents> rows(ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    rows[i] = ueb::cmse_estimate(ds.records[i], fit.params, unc, fit.family, dcfg);

  const auto out = prepare_out_dir(opts.out_dir);
  std::ostringstream os;
  ueb::write_cmse_csv(os, ds.ids, rows);
  write_text_file(out / "cmse.csv", os.str());
  std::cout << "cmse: " << ds.records.size() << " areas, bootstrap used " << unc.used
            << " dropped " << unc.dropped << "\n";
  return 0;
}

int run_holdout_pc(const std::string& data_path, double alpha, const CommonOpts& opts) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("--alpha must lie strictly inside (0, 1)");
  const ueb::Family fam = ueb::family_from_name(opts.family);
  const ueb::FitConfig cfg = make_fit_config(opts);
  const ueb::Dataset ds = ueb::load_dataset_csv(data_path, fam);

  std::vector<double> sizes;
  sizes.reserve(ds.records.size());
  for (const auto& rec : ds.records) sizes.push_back(rec.n);
  const double q_alpha = ueb::quantile_type1(sizes, alpha);

  std::vector<ueb::AreaRecord> fit_set;
  std::vector<std::size_t> holdout;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    if (ds.records[i].n <= q_alpha)
      fit_set.push_back(ds.records[i]);
    else
      holdout.push_back(i);
  }
  if (holdout.empty()) throw ueb::DataError("hold-out set is empty at alpha quantile of n");
  if (fit_set.size() < ds.q() + 2)
    throw ueb::DataError("too few areas at or below the alpha quantile of n to fit");

  const ueb::FitResult fit = ueb::fit_em(fit_set, fam, cfg);
  if (!fit.converged) throw ueb::ConvergenceError("EM did not converge on the fit set");

  double pc = 0.0;
  for (const std::size_t i : holdout) {
    const double m_hat = ueb::synthetic_mean(ds.records[i].x, fit.params.beta, fam);
    pc += (m_hat - ds.records[i].y) * (m_hat - ds.records[i].y);
  }
  pc /= static_cast<double>(holdout.size());

  json j;
  j["alpha"] = alpha;
  j["q_alpha"] = q_alpha;
  j["fit_areas"] = fit_set.size();
  j["holdout_areas"] = holdout.size();
  j["pc"] = pc;
  j["family"] = ueb::family_name(fam);
  j["beta"] = fit.params.beta;
  j["nu"] = fit.params.nu;
  j["p"] = fit.params.p;
  const auto out = prepare_out_dir(opts.out_dir);
  write_text_file(out / "holdout_pc.json", j.dump(2) + "\n");
  std::cout << "holdout-pc: PC = " << pc << " over " << holdout.size() << " held-out areas\n";
  return 0;
}

struct ProfileOpts {
  double n = 0.0, nu = 1.0, p = 0.5;
  std::vector<double> beta, x{1.0};
  double ymin = 0.0, ymax = 0.0;
  int points = 201, zmax = -1;
};

int run_profile(const ProfileOpts& po, const CommonOpts& opts) {
  const ueb::Family fam = ueb::family_from_name(opts.family);
  ueb::ModelParams params;
  params.beta = po.beta;
  params.nu = po.nu;
  params.p = po.p;
  ueb::validate_params(params, fam);
  if (po.x.size() != po.beta.size())
    throw std::invalid_argument("--x and --beta must have the same length");

  ueb::AreaRecord templ;
  templ.n = po.n;
  templ.x = po.x;
  templ.y = 0.0;

  std::vector<double> grid;
  switch (fam) {
    case ueb::Family::FayHerriot: {
      if (!(po.ymax > po.ymin)) throw std::invalid_argument("need --ymin < --ymax");
      if (po.points < 2) throw std::invalid_argument("--points must be >= 2");
      for (int k = 0; k < po.points; ++k)
        grid.push_back(po.ymin + (po.ymax - po.ymin) * k / (po.points - 1));
      break;
    }
    case ueb::Family::PoissonGamma: {
      if (po.zmax < 1) throw std::invalid_argument("need --zmax >= 1 for count profiles");
      for (int z = 0; z <= po.zmax; ++z) grid.push_back(z / templ.n);
      break;
    }
    case ueb::Family::BinomialBeta: {
      const auto trials = static_cast<int>(std::llround(templ.n));
      for (int z = 0; z <= trials; ++z) grid.push_back(z / templ.n);
      break;
    }
  }

  const auto rows = ueb::shrinkage_profile(grid, templ, params, fam);
  std::ostringstream os;
  ueb::write_profile_csv(os, rows);
  const auto out = prepare_out_dir(opts.out_dir);
  write_text_file(out / "profile.csv", os.str());
  std::cout << "profile: " << rows.size() << " grid points\n";
  return 0;
}

// --- simulate: design JSON -> study table + manifest ---

void require_known_keys(const json& j, std::initializer_list<const char*> allowed,
                        const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) ok = true;
    if (!ok) throw std::invalid_argument("design file: unknown key '" + item.key() + "' in " +
                                         where);
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

ueb::ModelParams parse_truth(const json& j) {
  if (!j.contains("truth") || !j.at("truth").is_object())
    throw std::invalid_argument("design file: 'truth' object is required");
  const json& t = j.at("truth");
  require_known_keys(t, {"beta", "nu", "p"}, "'truth'");
  ueb::ModelParams params;
  if (!t.contains("beta")) throw std::invalid_argument("design file: 'truth.beta' is required");
  params.beta = t.at("beta").get<std::vector<double>>();
  read_field(t, "nu", params.nu);
  read_field(t, "p", params.p);
  return params;
}

ueb::FitConfig parse_fit(const json& j, std::uint64_t seed) {
  ueb::FitConfig cfg;
  cfg.seed = seed;
  if (!j.contains("fit")) return cfg;
  const json& f = j.at("fit");
  require_known_keys(f, {"tol", "max_iter", "e_step", "mc_samples"}, "'fit'");
  read_field(f, "tol", cfg.tol);
  read_field(f, "max_iter", cfg.max_iter);
  read_field(f, "mc_samples", cfg.mc_samples);
  std::string mode = "analytic";
  read_field(f, "e_step", mode);
  if (mode == "analytic")
    cfg.e_step_mode = ueb::EStepMode::Analytic;
  else if (mode == "mc")
    cfg.e_step_mode = ueb::EStepMode::MonteCarlo;
  else
    throw std::invalid_argument("design file: fit.e_step must be 'analytic' or 'mc'");
  return cfg;
}

ueb::LatentLaw parse_latent_law(const std::string& name) {
  if (name == "conjugate") return ueb::LatentLaw::Conjugate;
  if (name == "lognormal") return ueb::LatentLaw::Lognormal;
  if (name == "twopoint") return ueb::LatentLaw::TwoPoint;
  throw std::invalid_argument("design file: latent_law must be conjugate | lognormal | twopoint");
}

ueb::SimDesign parse_sim_design(const json& j) {
  require_known_keys(j,
                     {"study", "family", "areas", "truth", "replicates", "n_min", "n_max",
                      "latent_law", "seed", "redraw_design", "fit"},
                     "the design");
  ueb::SimDesign d;
  std::string fam = "pg";
  read_field(j, "family", fam);
  d.family = ueb::family_from_name(fam);
  read_field(j, "areas", d.areas);
  d.truth = parse_truth(j);
  read_field(j, "replicates", d.replicates);
  read_field(j, "n_min", d.n_min);
  read_field(j, "n_max", d.n_max);
  std::string law = "conjugate";
  read_field(j, "latent_law", law);
  d.latent_law = parse_latent_law(law);
  read_field(j, "seed", d.seed);
  read_field(j, "redraw_design", d.redraw_design);
  d.fit = parse_fit(j, d.seed);
  if (d.areas < 1 || d.replicates < 1 || d.n_min < 1 || d.n_max < d.n_min)
    throw std::invalid_argument("design file: need areas >= 1, replicates >= 1, 1 <= n_min <= n_max");
  return d;
}

ueb::CmseEvalDesign parse_cmse_design(const json& j) {
  require_known_keys(j,
                     {"study", "areas", "truth", "n_value", "alpha", "marginal_draws",
                      "truth_replicates", "outer_replicates", "bootstrap_reps", "seed", "fit"},
                     "the design");
  ueb::CmseEvalDesign d;
  read_field(j, "areas", d.areas);
  d.truth = parse_truth(j);
  read_field(j, "n_value", d.n_value);
  read_field(j, "alpha", d.alpha);
  read_field(j, "marginal_draws", d.marginal_draws);
  read_field(j, "truth_replicates", d.truth_replicates);
  read_field(j, "outer_replicates", d.outer_replicates);
  read_field(j, "bootstrap_reps", d.bootstrap_reps);
  read_field(j, "seed", d.seed);
  d.fit = parse_fit(j, d.seed);
  if (d.areas < 2 || d.n_value <= 0.0 || d.marginal_draws < 1 || d.truth_replicates < 1 ||
      d.outer_replicates < 1 || d.bootstrap_reps < 2)
    throw std::invalid_argument("design file: replicate counts out of range");
  for (const double a : d.alpha)
    if (!(a > 0.0 && a < 1.0))
      throw std::invalid_argument("design file: alpha levels must lie in (0, 1)");
  return d;
}

int run_simulate(const std::string& design_path, const std::string& out_dir) {
  std::string text;
  try {
    text = slurp_file(design_path);
  } catch (const ueb::DataError& e) {
    throw std::invalid_argument(std::string("design file: ") + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("design file: " + std::string(e.what()));
  }
  if (!j.is_object() || !j.contains("study"))
    throw std::invalid_argument("design file: top-level object with a 'study' field required");
  const std::string study = j.at("study").get<std::string>();

  const auto out = prepare_out_dir(out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  json manifest;
  manifest["study"] = study;
  manifest["design"] = j;
  manifest["config_hash"] = hash_hex(j.dump());
  std::string table_name;

  if (study == "comparison" || study == "sensitivity") {
    const ueb::SimDesign d = parse_sim_design(j);
    manifest["seed"] = d.seed;
    std::ostringstream os;
    if (study == "comparison") {
      const ueb::ComparisonTable t = ueb::run_comparison(d);
      ueb::write_comparison_csv(os, t);
      manifest["replicates_used"] = t.replicates_used;
      manifest["dropped"] = t.dropped;
      table_name = "comparison.csv";
    } else {
      const ueb::SensitivityTable t = ueb::run_sensitivity(d);
      ueb::write_sensitivity_csv(os, t);
      manifest["replicates_used"] = t.replicates_used;
      manifest["dropped"] = t.dropped;
      table_name = "sensitivity.csv";
    }
    write_text_file(out / table_name, os.str());
  } else if (study == "cmse-eval") {
    const ueb::CmseEvalDesign d = parse_cmse_design(j);
    manifest["seed"] = d.seed;
    const std::vector<ueb::CmseEvalRow> rows = ueb::run_cmse_eval(d);
    std::ostringstream os;
    ueb::write_cmse_eval_csv(os, rows);
    table_name = "cmse_eval.csv";
    write_text_file(out / table_name, os.str());
    json drops = json::array();
    for (const auto& r : rows)
      drops.push_back({{"alpha", r.alpha},
                       {"outer_used", r.outer_used},
                       {"outer_dropped", r.outer_dropped},
                       {"truth_used", r.truth_used},
                       {"truth_dropped", r.truth_dropped}});
    manifest["replicate_accounting"] = drops;
  } else {
    throw std::invalid_argument("design file: study must be comparison | sensitivity | cmse-eval");
  }

  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest["wall_time_ms"] = ms;
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "simulate: " << study << " done in " << ms << " ms, wrote " << table_name << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Area-level shrinkage estimation with an uncertain prior"};
  app.require_subcommand(1);

  CommonOpts fit_opts;
  std::string fit_data;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit the mixture model to a dataset");
  fit_cmd->add_option("--data", fit_data, "Dataset CSV: area_id,y,n,<x...>")->required();
  add_fit_flags(fit_cmd, fit_opts);

  CommonOpts cmse_opts;
  std::string cmse_data, cmse_fit;
  int cmse_boot = 100;
  double cmse_z = -1.0;
  bool cmse_zero_omega = false;
  CLI::App* cmse_cmd =
      app.add_subcommand("cmse", "Conditional MSE estimates for a finished fit");
  cmse_cmd->add_option("--data", cmse_data, "Dataset CSV the fit was produced from")->required();
  cmse_cmd->add_option("--fit", cmse_fit, "fit.json from the fit command")->required();
  cmse_cmd->add_option("--bootstrap", cmse_boot, "Bootstrap replicates");
  cmse_cmd->add_option("--z-step", cmse_z, "Derivative step override (default areas^(-5/4))");
  cmse_cmd->add_option("--seed", cmse_opts.seed, "Random seed");
  cmse_cmd->add_option("--tol", cmse_opts.tol, "EM tolerance for bootstrap refits");
  cmse_cmd->add_option("--max-iter", cmse_opts.max_iter, "EM iteration cap for refits");
  cmse_cmd->add_option("--out", cmse_opts.out_dir, "Output directory");
  cmse_cmd->add_flag("--inject-zero-omega", cmse_zero_omega, "Testing hook: skip the bootstrap")
      ->group("");  // hidden

  CommonOpts pc_opts;
  std::string pc_data;
  double pc_alpha = 0.5;
  CLI::App* pc_cmd = app.add_subcommand(
      "holdout-pc", "Predictive criterion: fit on small-n areas, score the rest");
  pc_cmd->add_option("--data", pc_data, "Dataset CSV")->required();
  pc_cmd->add_option("--alpha", pc_alpha, "Quantile of n separating fit and hold-out areas");
  add_fit_flags(pc_cmd, pc_opts);

  CommonOpts prof_opts;
  ProfileOpts prof;
  CLI::App* prof_cmd =
      app.add_subcommand("profile", "Shrinkage weight and estimate along an observation grid");
  prof_cmd->add_option("--family", prof_opts.family, "fh | pg | bb")->required();
  prof_cmd->add_option("--n", prof.n, "Template precision / exposure / trials")->required();
  prof_cmd->add_option("--nu", prof.nu, "Prior mass")->required();
  prof_cmd->add_option("--p", prof.p, "Mixture weight")->required();
  prof_cmd->add_option("--beta", prof.beta, "Coefficients (comma separated)")
      ->required()
      ->delimiter(',');
  prof_cmd->add_option("--x", prof.x, "Design row (default 1)")->delimiter(',');
  prof_cmd->add_option("--ymin", prof.ymin, "Grid start (fh)");
  prof_cmd->add_option("--ymax", prof.ymax, "Grid end (fh)");
  prof_cmd->add_option("--points", prof.points, "Grid size (fh)");
  prof_cmd->add_option("--zmax", prof.zmax, "Largest count (pg; grid y = z/n)");
  prof_cmd->add_option("--out", prof_opts.out_dir, "Output directory");

  std::string sim_design, sim_out = ".";
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run a simulation study from a design file");
  sim_cmd->add_option("--design", sim_design, "Design JSON")->required();
  sim_cmd->add_option("--out", sim_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit_data, fit_opts);
    if (cmse_cmd->parsed())
      return run_cmse(cmse_data, cmse_fit, cmse_boot, cmse_z, cmse_zero_omega, cmse_opts);
    if (pc_cmd->parsed()) return run_holdout_pc(pc_data, pc_alpha, pc_opts);
    if (prof_cmd->parsed()) return run_profile(prof, prof_opts);
    if (sim_cmd->parsed()) return run_simulate(sim_design, sim_out);
  } catch (const ueb::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ueb::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ueb::MaximizeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

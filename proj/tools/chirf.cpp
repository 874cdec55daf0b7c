// Experiment runner: every estimator and counter behind seeded, replayable
// configs.  Same config + seed means byte-identical outputs (no timestamps,
// shortest-round-trip float rendering, thread-count-independent batching).
//
// Exit codes: 0 success, 1 compute failure, 2 config error.

#include <CLI11.hpp>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "chirf/acceptance.hpp"
#include "chirf/analytic.hpp"
#include "chirf/critcount.hpp"
#include "chirf/io.hpp"
#include "chirf/kacrice.hpp"
#include "chirf/special.hpp"

using nlohmann::json;
using namespace chirf;

namespace {

struct CommonOpts {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
  std::string sign_variant = "corrected";
  std::string spectrum_file;
  std::string model = "";  // berry | bf | custom
  double sigma2 = 0.0;
  double c = 0.0;
  std::int64_t n = 1000000;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_model) {
  cmd->set_config("--config", "", "flat key=value config file");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--threads", o.threads, "worker thread cap")
      ->check(CLI::Range(1, 256));
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--sign-variant", o.sign_variant,
                  "corrected | paper_text (published-text formulas)")
      ->check(CLI::IsMember({"corrected", "paper_text"}));
  if (with_model) {
    cmd->add_option("--spectrum", o.spectrum_file,
                    "angular power spectrum file (lines: l C_l)");
    cmd->add_option("--model", o.model, "berry | bf | custom")
        ->check(CLI::IsMember({"berry", "bf", "custom"}));
    cmd->add_option("--sigma2", o.sigma2, "custom model sigma^2");
    cmd->add_option("--c", o.c, "custom model c");
    cmd->add_option("-n,--n", o.n, "Monte Carlo sample count");
  }
}

analytic::SignVariant variant_of(const CommonOpts& o) {
  return o.sign_variant == "paper_text" ? analytic::SignVariant::paper_text
                                        : analytic::SignVariant::corrected;
}

struct ResolvedModel {
  analytic::HessianModel2D model;
  double r2 = 0.0;  // > 0 when it came from a spectrum
  std::string describe;
};

ResolvedModel resolve_model(const CommonOpts& o) {
  ResolvedModel rm;
  if (!o.spectrum_file.empty()) {
    auto spec = io::read_spectrum(o.spectrum_file);
    auto sm = analytic::spherical_hessian_model(spec, variant_of(o));
    rm.model = sm.model;
    rm.r2 = sm.r2;
    rm.describe = "spectrum:" + io::hash_hex(io::spectrum_hash(spec));
    return rm;
  }
  if (o.model == "berry") {
    rm.model = analytic::planar_hessian_model(1.5);
    rm.describe = "berry";
  } else if (o.model == "bf") {
    rm.model = analytic::planar_hessian_model(3.0);
    rm.describe = "bargmann_fock";
  } else if (o.model == "custom") {
    rm.model = analytic::HessianModel2D{o.sigma2, o.c};
    rm.describe = "custom";
  } else {
    throw CLI::ValidationError(
        "model", "need --model berry|bf|custom or --spectrum FILE");
  }
  return rm;
}

std::map<std::string, std::string> base_meta(const std::string& command,
                                             const CommonOpts& o) {
  std::map<std::string, std::string> m;
  m["command"] = command;
  m["version"] = io::kVersion;
  m["seed"] = std::to_string(o.seed);
  m["threads"] = std::to_string(o.threads);
  m["sign_variant"] = o.sign_variant;
  m["n"] = std::to_string(o.n);
  if (!o.spectrum_file.empty()) m["spectrum_file"] = o.spectrum_file;
  if (!o.model.empty()) m["model"] = o.model;
  return m;
}

void stamp_config_hash(std::map<std::string, std::string>& meta) {
  std::string canon;
  for (const auto& [k, v] : meta) canon += k + "=" + v + ";";
  meta["config_hash"] = io::hash_hex(io::fnv1a(canon));
}

std::string out_path(const CommonOpts& o, const std::string& name) {
  std::filesystem::create_directories(o.out_dir);
  return (std::filesystem::path(o.out_dir) / name).string();
}

json meta_json(const std::map<std::string, std::string>& meta) {
  json j;
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

json estimate_json(const MCEstimate& e) {
  return json{{"value", e.value},
              {"std_error", e.std_error},
              {"n", e.n},
              {"seed", e.seed}};
}

std::vector<double> parse_t_grid(const std::vector<double>& ts) {
  if (ts.empty()) throw CLI::ValidationError("t", "need at least one --t");
  return ts;
}

// --- subcommand bodies --------------------------------------------------

int run_closed_form(const CommonOpts& o, double r,
                    const std::vector<double>& ts) {
  auto meta = base_meta("closed-form", o);
  meta["r"] = io::format_double(r);
  stamp_config_hash(meta);
  auto lk = analytic::lk_sphere_circle(r);
  std::string csv = io::render_header(meta);
  csv += "t,maxima_density,ec_sum,tail_probability\n";
  for (double t : ts) {
    csv += io::format_double(t) + "," +
           io::format_double(analytic::maxima_density_sphere(r, t, variant_of(o))) +
           "," + io::format_double(analytic::ec_sum_product(lk, t)) + "," +
           io::format_double(gaussian_upper_tail(t)) + "\n";
  }
  io::write_text_file(out_path(o, "closed_form.csv"), csv);
  std::printf("wrote %s\n", out_path(o, "closed_form.csv").c_str());
  return 0;
}

int run_estimate_ek(const CommonOpts& o, int k, const std::vector<double>& ts) {
  ResolvedModel rm = resolve_model(o);
  auto meta = base_meta("estimate-ek", o);
  meta["k"] = std::to_string(k);
  meta["hessian_model"] = rm.describe;
  stamp_config_hash(meta);
  std::string csv = io::render_header(meta);
  csv += "t,ek,ek_se,ek_weighted,ek_weighted_se\n";
  int stream = 0;
  for (double t : ts) {
    RngStream r1(o.seed, stream++), r2(o.seed, stream++);
    MCEstimate e = kacrice::estimate_Ek(k, t, rm.model, o.n, r1, o.threads);
    MCEstimate w =
        kacrice::estimate_Ek_weighted(k, t, rm.model, o.n, r2, o.threads);
    csv += io::format_double(t) + "," + io::format_double(e.value) + "," +
           io::format_double(e.std_error) + "," + io::format_double(w.value) +
           "," + io::format_double(w.std_error) + "\n";
  }
  io::write_text_file(out_path(o, "estimate_ek.csv"), csv);
  std::printf("wrote %s\n", out_path(o, "estimate_ek.csv").c_str());
  return 0;
}

int run_estimate_dk(const CommonOpts& o, int k, const std::vector<double>& ts,
                    bool no_importance) {
  ResolvedModel rm = resolve_model(o);
  auto meta = base_meta("estimate-dk", o);
  meta["k"] = std::to_string(k);
  meta["hessian_model"] = rm.describe;
  meta["importance"] = no_importance ? "off" : "on";
  stamp_config_hash(meta);
  std::string csv = io::render_header(meta);
  csv += "t,dk,dk_se,a1_density\n";
  int stream = 0;
  for (double t : ts) {
    RngStream r(o.seed, stream++);
    MCEstimate e =
        kacrice::estimate_Dk(k, t, rm.model, o.n, r, o.threads, !no_importance);
    csv += io::format_double(t) + "," + io::format_double(e.value) + "," +
           io::format_double(e.std_error) + "," +
           io::format_double(analytic::ec_density_a1(t, rm.model)) + "\n";
  }
  io::write_text_file(out_path(o, "estimate_dk.csv"), csv);
  std::printf("wrote %s\n", out_path(o, "estimate_dk.csv").c_str());
  return 0;
}

int run_a1a2(const CommonOpts& o, const std::vector<double>& ts,
             bool no_importance) {
  ResolvedModel rm = resolve_model(o);
  auto meta = base_meta("a1a2", o);
  meta["hessian_model"] = rm.describe;
  meta["importance"] = no_importance ? "off" : "on";
  stamp_config_hash(meta);
  std::string csv = io::render_header(meta);
  csv += "t,a1,a1_se,a2,a2_se,dk,dk_se,a1_closed\n";
  int stream = 0;
  for (double t : ts) {
    RngStream r(o.seed, stream++);
    kacrice::A1A2 e =
        kacrice::estimate_a1_a2(t, rm.model, o.n, r, o.threads, !no_importance);
    csv += io::format_double(t) + "," + io::format_double(e.a1.value) + "," +
           io::format_double(e.a1.std_error) + "," +
           io::format_double(e.a2.value) + "," +
           io::format_double(e.a2.std_error) + "," +
           io::format_double(e.dk.value) + "," +
           io::format_double(e.dk.std_error) + "," +
           io::format_double(analytic::ec_density_a1(t, rm.model)) + "\n";
  }
  io::write_text_file(out_path(o, "a1a2.csv"), csv);
  std::printf("wrote %s\n", out_path(o, "a1a2.csv").c_str());
  return 0;
}

int run_expected_maxima(const CommonOpts& o, int k, const std::vector<double>& ts,
                        double volume_override) {
  ResolvedModel rm = resolve_model(o);
  double volume = volume_override;
  if (volume <= 0.0) {
    if (rm.r2 <= 0.0)
      throw CLI::ValidationError(
          "volume", "need --volume, or --spectrum to imply vol(rS^2)");
    volume = 4.0 * kPi * rm.r2;
  }
  auto meta = base_meta("expected-maxima", o);
  meta["k"] = std::to_string(k);
  meta["volume"] = io::format_double(volume);
  meta["hessian_model"] = rm.describe;
  stamp_config_hash(meta);
  std::string csv = io::render_header(meta);
  csv += "t,expected_maxima,se,closed_form,ratio\n";
  int stream = 0;
  for (double t : ts) {
    kacrice::CountFormulaInput in;
    in.k = k;
    in.m = 2;
    in.t = t;
    in.volume = volume;
    in.model = rm.model;
    RngStream r(o.seed, stream++);
    MCEstimate e = kacrice::expected_maxima(in, o.n, r, o.threads);
    double closed = (rm.r2 > 0.0 && k == 2)
                        ? analytic::maxima_density_sphere(std::sqrt(rm.r2), t,
                                                          variant_of(o))
                        : 0.0;
    csv += io::format_double(t) + "," + io::format_double(e.value) + "," +
           io::format_double(e.std_error) + "," + io::format_double(closed) +
           "," + io::format_double(closed > 0.0 ? e.value / closed : 0.0) +
           "\n";
  }
  io::write_text_file(out_path(o, "expected_maxima.csv"), csv);
  std::printf("wrote %s\n", out_path(o, "expected_maxima.csv").c_str());
  return 0;
}

int run_simulate_count(const CommonOpts& o, int k, const std::vector<double>& ts,
                       int realizations, int depth, std::int64_t kacrice_n) {
  if (o.spectrum_file.empty())
    throw CLI::ValidationError("spectrum", "simulate-count needs --spectrum");
  auto spec = io::read_spectrum(o.spectrum_file);
  auto sm = analytic::spherical_hessian_model(spec, variant_of(o));
  double t_min = *std::min_element(ts.begin(), ts.end());
  if (!(t_min > 0.0))
    throw CLI::ValidationError("t", "thresholds must be > 0");

  auto meta = base_meta("simulate-count", o);
  meta["k"] = std::to_string(k);
  meta["realizations"] = std::to_string(realizations);
  meta["spectrum_hash"] = io::hash_hex(io::spectrum_hash(spec));
  meta["r2"] = io::format_double(sm.r2);
  stamp_config_hash(meta);

  int use_depth = depth > 0 ? depth : icosphere_depth_for_lmax(spec.max_l()) + 1;
  meta["grid_depth"] = std::to_string(use_depth);
  IcoSphere grid = make_icosphere(use_depth);

  std::string csv = io::render_header(meta);
  csv += "realization,x,y,z,value,grad_norm,index,eig1,eig2,degenerate\n";
  std::vector<Welford> counts(ts.size()), maxima(ts.size()), signed_ec(ts.size());
  RngStream base(o.seed, 0);
  for (int i = 0; i < realizations; ++i) {
    RngStream rng = base;
    rng.seek_block(static_cast<std::uint64_t>(i) * kBatchBlockStride);
    std::vector<fieldsim::SphericalFieldSample> comps;
    for (int q = 0; q < k; ++q)
      comps.push_back(fieldsim::synth_sphere(spec, rng));
    auto field = fieldsim::assemble_chi(std::move(comps));
    auto points = critcount::find_critical_points(field, t_min, grid);
    for (const auto& p : points) {
      csv += std::to_string(i) + "," + io::format_double(p.location[0]) + "," +
             io::format_double(p.location[1]) + "," +
             io::format_double(p.location[2]) + "," +
             io::format_double(p.value) + "," +
             io::format_double(p.grad_norm) + "," + std::to_string(p.index) +
             "," + io::format_double(p.hess_eigs[0]) + "," +
             io::format_double(p.hess_eigs[1]) + "," +
             (p.degenerate ? "1" : "0") + "\n";
    }
    for (std::size_t j = 0; j < ts.size(); ++j) {
      int total = 0;
      for (const auto& p : points)
        if (p.value >= ts[j]) ++total;
      counts[j].add(total);
      maxima[j].add(critcount::count_maxima_above(points, ts[j]));
      signed_ec[j].add(critcount::signed_euler_count(points, ts[j]));
    }
  }
  io::write_text_file(out_path(o, "critical_points.csv"), csv);

  json summary;
  summary["config"] = meta_json(meta);
  summary["thresholds"] = json::array();
  auto lk = analytic::lk_sphere_circle(std::sqrt(sm.r2));
  int stream = 1;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    json row;
    row["t"] = ts[j];
    row["mean_count"] = estimate_json(counts[j].estimate(o.seed));
    row["mean_maxima"] = estimate_json(maxima[j].estimate(o.seed));
    row["mean_signed_ec"] = estimate_json(signed_ec[j].estimate(o.seed));
    if (k == 2) {
      row["maxima_density_closed_form"] = analytic::maxima_density_sphere(
          std::sqrt(sm.r2), ts[j], variant_of(o));
      row["ec_sum_closed_form"] = analytic::ec_sum_product(lk, ts[j]);
    }
    if (k > 2 && kacrice_n > 0) {
      kacrice::CountFormulaInput in;
      in.k = k;
      in.m = 2;
      in.t = ts[j];
      in.volume = 4.0 * kPi * sm.r2;
      in.model = sm.model;
      in.variant = variant_of(o);
      RngStream r(o.seed, 1000 + stream++);
      row["kacrice_expected_count"] =
          estimate_json(kacrice::expected_critical_points(in, kacrice_n, r,
                                                          o.threads));
    }
    summary["thresholds"].push_back(row);
  }
  io::write_text_file(out_path(o, "summary.json"), summary.dump(2) + "\n");
  std::printf("wrote %s and %s\n", out_path(o, "critical_points.csv").c_str(),
              out_path(o, "summary.json").c_str());
  return 0;
}

int run_oracle(const CommonOpts& o, int realizations, int berry_waves,
               double bf_window) {
  critcount::OracleSource source;
  std::string label;
  if (!o.spectrum_file.empty()) {
    source = critcount::OracleSource::sphere(io::read_spectrum(o.spectrum_file));
    label = "sphere";
  } else if (o.model == "berry") {
    source = critcount::OracleSource::berry(berry_waves);
    label = "berry";
  } else if (o.model == "bf") {
    source = critcount::OracleSource::bargmann_fock(bf_window);
    label = "bargmann_fock";
  } else {
    throw CLI::ValidationError("model",
                               "oracle needs --spectrum or --model berry|bf");
  }
  auto meta = base_meta("oracle-hessian", o);
  meta["realizations"] = std::to_string(realizations);
  meta["source"] = label;
  stamp_config_hash(meta);
  RngStream rng(o.seed, 0);
  auto rep = critcount::hessian_covariance_oracle(source, realizations, rng);
  json j;
  j["config"] = meta_json(meta);
  j["var_h1"] = estimate_json(rep.var_h1);
  j["cov_h13"] = estimate_json(rep.cov_h13);
  j["var_h2"] = estimate_json(rep.var_h2);
  j["e_h1_gamma"] = estimate_json(rep.e_h1_gamma);
  j["c_minus_sigma2"] = estimate_json(rep.c_minus_sigma2);
  j["implied_sigma2"] = rep.implied_sigma2;
  j["implied_c"] = rep.implied_c;
  j["implied_c_minus_sigma2"] = rep.implied_c_minus_sigma2;
  j["r2"] = rep.r2;
  j["fd_max_error"] = rep.fd_max_error;
  io::write_text_file(out_path(o, "oracle_hessian.json"), j.dump(2) + "\n");
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int run_validate(const CommonOpts& o, bool quick) {
  acceptance::Config cfg;
  cfg.quick = quick;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  auto results = acceptance::run_acceptance(cfg);
  std::string report = acceptance::render_report(results);
  std::fputs(report.c_str(), stdout);
  auto meta = base_meta("validate", o);
  meta["quick"] = quick ? "1" : "0";
  stamp_config_hash(meta);
  io::write_text_file(out_path(o, "validate.txt"),
                      io::render_header(meta) + report);
  return acceptance::all_passed(results) ? 0 : 1;
}

json error_record(const std::string& kind, const std::string& what, int line) {
  json j;
  j["error"] = kind;
  j["message"] = what;
  if (line > 0) j["line"] = line;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chi random field critical points: closed forms, Monte Carlo "
               "estimators, field simulation and direct counting"};
  app.require_subcommand(1);

  CommonOpts o;
  double r = 1.0;
  std::vector<double> ts;
  int k = 2;
  int m = 2;
  bool no_importance = false;
  double volume_override = 0.0;
  int realizations = 200;
  int depth = -1;
  std::int64_t kacrice_n = 0;
  int berry_waves = 4096;
  double bf_window = 2.0;
  bool quick = false;

  auto* closed = app.add_subcommand(
      "closed-form", "maxima density and curvature-sum tables");
  closed->add_option("--r", r, "sphere radius")->required();
  closed->add_option("--t", ts, "threshold grid")->required();
  add_common(closed, o, false);

  auto* ek = app.add_subcommand("estimate-ek",
                                "Monte Carlo critical-point functional");
  ek->add_option("--k", k, "degrees of freedom")->required();
  ek->add_option("--m", m, "manifold dimension (catalog supports 2)");
  ek->add_option("--t", ts, "threshold grid")->required();
  add_common(ek, o, true);

  auto* dk = app.add_subcommand("estimate-dk", "Monte Carlo maxima functional");
  dk->add_option("--k", k, "degrees of freedom")->required();
  dk->add_option("--m", m, "manifold dimension (catalog supports 2)");
  dk->add_option("--t", ts, "threshold grid")->required();
  dk->add_flag("--no-importance", no_importance,
               "disable the conditioned-gamma sampler");
  add_common(dk, o, true);

  auto* a12 = app.add_subcommand(
      "a1a2", "signed-determinant split of the maxima functional (m = k = 2)");
  a12->add_option("--t", ts, "threshold grid")->required();
  a12->add_flag("--no-importance", no_importance,
                "disable the conditioned-gamma sampler");
  add_common(a12, o, true);

  auto* em = app.add_subcommand("expected-maxima",
                                "assembled expected count of maxima");
  em->add_option("--k", k, "degrees of freedom")->required();
  em->add_option("--m", m, "manifold dimension (catalog supports 2)");
  em->add_option("--t", ts, "threshold grid")->required();
  em->add_option("--volume", volume_override, "manifold volume override");
  add_common(em, o, true);

  auto* sim = app.add_subcommand(
      "simulate-count", "synthesize chi fields and count critical points");
  sim->add_option("--k", k, "number of field components")->required();
  sim->add_option("--t", ts, "count thresholds (> 0)")->required();
  sim->add_option("--realizations", realizations, "field realizations");
  sim->add_option("--depth", depth, "icosphere subdivision depth (-1 = auto)");
  sim->add_option("--kacrice-n", kacrice_n,
                  "cross-validate counts with this many MC samples (k > 2)");
  add_common(sim, o, true);

  auto* orc = app.add_subcommand("oracle-hessian",
                                 "empirical Hessian covariance at a point");
  orc->add_option("--realizations", realizations, "field realizations");
  orc->add_option("--berry-waves", berry_waves, "wave count for berry");
  orc->add_option("--bf-window", bf_window, "working window half-width");
  add_common(orc, o, true);

  auto* val = app.add_subcommand("validate", "run the acceptance suite");
  val->add_flag("--quick", quick, "reduced-scale subset, ~10 s");
  add_common(val, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "%s\n",
                 error_record("config", e.what(), 0).dump().c_str());
    app.exit(e);
    return 2;
  }

  try {
    if (m != 2)
      throw CLI::ValidationError(
          "m", "the covariance catalog is two-dimensional; --m must be 2");
    if (closed->parsed()) return run_closed_form(o, r, parse_t_grid(ts));
    if (ek->parsed()) return run_estimate_ek(o, k, parse_t_grid(ts));
    if (dk->parsed())
      return run_estimate_dk(o, k, parse_t_grid(ts), no_importance);
    if (a12->parsed()) return run_a1a2(o, parse_t_grid(ts), no_importance);
    if (em->parsed())
      return run_expected_maxima(o, k, parse_t_grid(ts), volume_override);
    if (sim->parsed())
      return run_simulate_count(o, k, parse_t_grid(ts), realizations, depth,
                                kacrice_n);
    if (orc->parsed()) return run_oracle(o, realizations, berry_waves, bf_window);
    if (val->parsed()) return run_validate(o, quick);
  } catch (const io::SpectrumParseError& e) {
    std::fprintf(stderr, "%s\n",
                 error_record("config", e.what(), e.line).dump().c_str());
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "%s\n",
                 error_record("config", e.what(), 0).dump().c_str());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s\n",
                 error_record("config", e.what(), 0).dump().c_str());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "%s\n",
                 error_record("config", e.what(), 0).dump().c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n",
                 error_record("compute", e.what(), 0).dump().c_str());
    return 1;
  }
  return 0;
}

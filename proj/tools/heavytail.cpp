// heavytail: combine dependent p-values, calibrate exact null quantiles,
// and invert the tests into convex confidence intervals / regions.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heavytail/combine.hpp"
#include "heavytail/confregion.hpp"
#include "heavytail/divide_combine.hpp"
#include "heavytail/io.hpp"
#include "heavytail/netmeta.hpp"
#include "heavytail/nulldist.hpp"
#include "heavytail/sim.hpp"

namespace ht = heavytail;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

// All floating output carries 9 significant digits.
double sig9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::strtod(buf, nullptr);
}

json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return sig9(v);
}

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

std::size_t exact_m_max_from_env() {
  const char* env = std::getenv("HEAVYTAIL_EXACT_M_MAX");
  if (!env || !*env) return 1000;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || *end)
    throw ht::domain_error("HEAVYTAIL_EXACT_M_MAX must be an integer");
  return static_cast<std::size_t>(v);
}

ht::CombinerKind parse_method(const std::string& name) {
  static const std::map<std::string, ht::CombinerKind> table = {
      {"hcct", ht::CombinerKind::HCCT},
      {"ehmp", ht::CombinerKind::EHMP},
      {"cct", ht::CombinerKind::CCT},
      {"fisher", ht::CombinerKind::Fisher},
      {"stouffer", ht::CombinerKind::Stouffer},
      {"bonferroni", ht::CombinerKind::Bonferroni},
      {"simes", ht::CombinerKind::Simes}};
  const auto it = table.find(name);
  if (it == table.end())
    throw ht::domain_error("unknown method '" + name + "'");
  return it->second;
}

std::vector<double> parse_doubles(const std::string& csv,
                                  const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw ht::domain_error("cannot parse " + what + " entry '" + field +
                             "'");
    }
  }
  if (out.empty()) throw ht::domain_error(what + " list is empty");
  return out;
}

std::vector<double> resolve_weights(const std::string& weights_csv,
                                    std::size_t m) {
  if (weights_csv.empty())
    return std::vector<double>(m, 1.0 / static_cast<double>(m));
  auto w = parse_doubles(weights_csv, "weights");
  if (w.size() != m)
    throw ht::domain_error("weights length does not match the p-value count");
  return w;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

json interval_json(const ht::IntervalResult& iv) {
  if (iv.empty) return {{"status", "EMPTY"}};
  return {{"status", "ok"}, {"lo", num(iv.lo)}, {"hi", num(iv.hi)}};
}

void write_contour_csv(const std::string& path,
                       const std::vector<Eigen::Vector2d>& pts) {
  std::ofstream out(path);
  if (!out) throw ht::domain_error("cannot write '" + path + "'");
  out << "x,y\n";
  char buf[96];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", p(0), p(1));
    out << buf;
  }
}

struct SliceSpec {
  std::map<int, double> fixed;
  std::vector<int> free_coords;
};

SliceSpec parse_slice(const std::string& fixed_csv,
                      const std::string& free_csv) {
  SliceSpec spec;
  if (!fixed_csv.empty()) {
    std::stringstream ss(fixed_csv);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos)
        throw ht::domain_error("--fixed expects idx=value pairs");
      spec.fixed[std::stoi(field.substr(0, eq))] =
          std::stod(field.substr(eq + 1));
    }
  }
  std::stringstream ss(free_csv);
  std::string field;
  while (std::getline(ss, field, ','))
    spec.free_coords.push_back(std::stoi(field));
  if (spec.free_coords.empty() || spec.free_coords.size() > 2)
    throw ht::domain_error("--free expects one or two coordinates");
  return spec;
}

int run(int argc, char** argv) {
  CLI::App app{"Dependence-resilient p-value combination and convex "
               "confidence regions"};
  app.require_subcommand(1);
  const std::size_t exact_m_max = exact_m_max_from_env();

  // combine
  auto* c_combine = app.add_subcommand("combine", "Combine p-values");
  std::string co_p, co_w, co_method = "hcct";
  double co_alpha = 0.05;
  c_combine->add_option("--p", co_p, "Comma-separated p-values")->required();
  c_combine->add_option("--weights", co_w, "Comma-separated weights");
  c_combine->add_option("--method", co_method, "Combiner");
  c_combine->add_option("--alpha", co_alpha, "Rejection level");

  // calibrate
  auto* c_cal = app.add_subcommand("calibrate", "Null quantile threshold");
  int ca_m = 0;
  std::string ca_w, ca_method = "hcct";
  double ca_alpha = 0.05;
  c_cal->add_option("--m", ca_m, "Number of studies");
  c_cal->add_option("--weights", ca_w, "Comma-separated weights");
  c_cal->add_option("--alpha", ca_alpha, "Significance level");
  c_cal->add_option("--method", ca_method, "hcct or ehmp");

  // interval
  auto* c_int = app.add_subcommand("interval", "Invert into a 1-D interval");
  std::string in_studies, in_method = "hcct";
  double in_level = 0.95;
  double in_lo = 0.0, in_hi = 0.0;
  int in_n = 20000;
  c_int->add_option("--studies", in_studies, "studies.csv path")->required();
  c_int->add_option("--method", in_method, "hcct, ehmp, or cct (grid)");
  c_int->add_option("--level", in_level, "Confidence level");
  c_int->add_option("--lo", in_lo, "Grid lower end (cct only)");
  c_int->add_option("--hi", in_hi, "Grid upper end (cct only)");
  c_int->add_option("--n", in_n, "Grid size (cct only)");

  // region
  auto* c_reg = app.add_subcommand("region", "Multivariate region");
  std::string rg_subs, rg_method = "hcct", rg_contour;
  double rg_level = 0.95;
  bool rg_adaptive = false;
  int rg_angles = 256;
  c_reg->add_option("--substudies", rg_subs, "substudies.json")->required();
  c_reg->add_option("--method", rg_method, "hcct or ehmp");
  c_reg->add_option("--level", rg_level, "Confidence level");
  c_reg->add_option("--contour", rg_contour, "Write 2-D boundary CSV here");
  c_reg->add_option("--angles", rg_angles, "Contour ray count");
  c_reg->add_flag("--adaptive", rg_adaptive,
                  "Drop worst studies until nonempty");

  // slice
  auto* c_slice = app.add_subcommand("slice", "Slice a d-dim region");
  std::string sl_subs, sl_method = "hcct", sl_fixed, sl_free, sl_contour;
  double sl_level = 0.95;
  int sl_angles = 256;
  c_slice->add_option("--substudies", sl_subs, "substudies.json")->required();
  c_slice->add_option("--method", sl_method, "hcct or ehmp");
  c_slice->add_option("--level", sl_level, "Confidence level");
  c_slice->add_option("--fixed", sl_fixed, "idx=value,... fixed coordinates");
  c_slice->add_option("--free", sl_free, "One or two free coordinates")
      ->required();
  c_slice->add_option("--contour", sl_contour, "Boundary CSV (2 free coords)");
  c_slice->add_option("--angles", sl_angles, "Contour ray count");

  // simci
  auto* c_simci = app.add_subcommand("simci", "Simultaneous CI for b'theta");
  std::string sc_subs, sc_method = "hcct", sc_b;
  double sc_level = 0.95;
  c_simci->add_option("--substudies", sc_subs, "substudies.json")->required();
  c_simci->add_option("--b", sc_b, "Comma-separated direction")->required();
  c_simci->add_option("--method", sc_method, "hcct or ehmp");
  c_simci->add_option("--level", sc_level, "Confidence level");

  // dac
  auto* c_dac = app.add_subcommand("dac", "Divide-and-combine mean region");
  std::string da_samples, da_method = "hcct", da_b;
  double da_level = 0.95;
  int da_d0 = 1;
  c_dac->add_option("--samples", da_samples, "samples.csv")->required();
  c_dac->add_option("--d0", da_d0, "Block size");
  c_dac->add_option("--method", da_method, "hcct or ehmp");
  c_dac->add_option("--level", da_level, "Confidence level");
  c_dac->add_option("--b", da_b, "Optional direction for a simultaneous CI");

  // netmeta
  auto* c_net = app.add_subcommand("netmeta", "Network meta-analysis");
  std::string nm_contrasts, nm_arms, nm_ref, nm_method = "hcct";
  double nm_level = 0.95;
  bool nm_pairwise = false;
  c_net->add_option("--contrasts", nm_contrasts, "contrasts.csv");
  c_net->add_option("--arms", nm_arms, "arms.csv (expanded to contrasts)");
  c_net->add_option("--reference", nm_ref, "Reference treatment label");
  c_net->add_option("--method", nm_method, "wls, hcct, or ehmp");
  c_net->add_option("--level", nm_level, "Confidence level");
  c_net->add_flag("--pairwise", nm_pairwise, "All pairwise simultaneous CIs");

  // simulate
  auto* c_sim = app.add_subcommand("simulate", "Monte-Carlo experiments");
  std::string si_exp, si_method = "hcct", si_corr = "equi", si_rho = "0";
  std::string si_dist = "normal";
  int si_m = 20, si_reps = 1000, si_d = 20, si_n = 200, si_d0 = 5;
  double si_alpha = 0.05, si_level = 0.95, si_r = 0.0, si_s = 0.0;
  std::uint64_t si_seed = 42;
  c_sim->add_option("--experiment", si_exp, "fpr | coverage | power | dac")
      ->required();
  c_sim->add_option("--method", si_method, "Combiner");
  c_sim->add_option("--corr", si_corr, "identity | equi | ar1");
  c_sim->add_option("--rho", si_rho, "Comma-separated correlation values");
  c_sim->add_option("--m", si_m, "Number of p-values / studies");
  c_sim->add_option("--alpha", si_alpha, "Test level (fpr/power)");
  c_sim->add_option("--level", si_level, "Confidence level (coverage/dac)");
  c_sim->add_option("--reps", si_reps, "Replicates");
  c_sim->add_option("--seed", si_seed, "RNG seed");
  c_sim->add_option("--r", si_r, "Signal strength (power)");
  c_sim->add_option("--s", si_s, "Signal sparsity (power)");
  c_sim->add_option("--d", si_d, "Dimension (dac)");
  c_sim->add_option("--n", si_n, "Sample size (dac)");
  c_sim->add_option("--d0", si_d0, "Block size (dac)");
  c_sim->add_option("--dist", si_dist, "normal | lognormal (dac)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints usage / help text
    return code == 0 ? 0 : kExitValidation;
  }

  if (*c_combine) {
    const auto p = parse_doubles(co_p, "p");
    const auto w = resolve_weights(co_w, p.size());
    const auto kind = parse_method(co_method);
    const double stat = ht::statistic(kind, p, w);
    const double gp = ht::global_pvalue(kind, p, w, exact_m_max);
    emit({{"method", co_method},
          {"m", p.size()},
          {"statistic", num(stat)},
          {"global_p", num(gp)},
          {"reject_at_alpha", gp <= co_alpha},
          {"alpha", num(co_alpha)}});
  } else if (*c_cal) {
    const auto kind = parse_method(ca_method);
    std::vector<double> w;
    if (!ca_w.empty()) {
      w = parse_doubles(ca_w, "weights");
      if (ca_m > 0 && static_cast<std::size_t>(ca_m) != w.size())
        throw ht::domain_error("--m disagrees with --weights length");
    } else {
      if (ca_m < 1) throw ht::domain_error("calibrate needs --m or --weights");
      w.assign(ca_m, 1.0 / ca_m);
    }
    const double thr =
        ht::invert_threshold(kind, w, 1.0 - ca_alpha, exact_m_max);
    emit({{"method", ca_method},
          {"m", w.size()},
          {"alpha", num(ca_alpha)},
          {"threshold", num(thr)}});
  } else if (*c_int) {
    const auto sf = ht::io::read_studies_csv(in_studies);
    if (in_method == "cct") {
      if (!(in_lo < in_hi))
        throw ht::domain_error("cct grid needs --lo < --hi");
      const auto runs = ht::cct_invert_grid(sf.studies, sf.weights, in_level,
                                            in_lo, in_hi, in_n);
      json comps = json::array();
      for (const auto& r : runs)
        comps.push_back({{"lo", num(r.first)}, {"hi", num(r.second)}});
      emit({{"method", "cct"}, {"level", num(in_level)},
            {"components", comps}});
      return 0;
    }
    const auto kind = parse_method(in_method);
    const auto iv =
        ht::invert_1d(sf.studies, kind, sf.weights, in_level, exact_m_max);
    json out = interval_json(iv);
    out["method"] = in_method;
    out["level"] = num(in_level);
    if (iv.empty) {
      out["lower_bound_stat"] = num(ht::lower_bound_stat(sf.studies,
                                                         sf.weights));
      out["threshold"] =
          num(ht::invert_threshold(kind, sf.weights, in_level, exact_m_max));
    }
    emit(out);
  } else if (*c_reg) {
    const auto sf = ht::io::read_substudies_json(rg_subs);
    const auto kind = parse_method(rg_method);
    ht::RegionHandle region;
    std::vector<std::size_t> dropped;
    if (rg_adaptive) {
      auto res = ht::adaptive_nonempty(sf.substudies, kind, sf.weights,
                                       rg_level, exact_m_max);
      region = std::move(res.region);
      dropped = std::move(res.dropped);
    } else {
      region = ht::build_region(sf.substudies, kind, sf.weights, rg_level,
                                exact_m_max);
    }
    json out = {{"method", rg_method},
                {"level", num(rg_level)},
                {"d", region.d},
                {"status", region.nonempty() ? "ok" : "EMPTY"},
                {"min_score", num(region.min_score)},
                {"threshold", num(region.threshold)},
                {"bounded", region.bounded},
                {"dropped", dropped}};
    if (region.nonempty())
      out["point_estimate"] = vec(region.point_estimate());
    if (!rg_contour.empty()) {
      write_contour_csv(rg_contour, ht::contour_2d(region, rg_angles));
      out["contour"] = rg_contour;
    }
    emit(out);
  } else if (*c_slice) {
    const auto sf = ht::io::read_substudies_json(sl_subs);
    const auto kind = parse_method(sl_method);
    const auto region = ht::build_region(sf.substudies, kind, sf.weights,
                                         sl_level, exact_m_max);
    const auto spec = parse_slice(sl_fixed, sl_free);
    if (spec.free_coords.size() == 1) {
      const auto iv =
          ht::slice_interval(region, spec.fixed, spec.free_coords[0]);
      json out = interval_json(iv);
      out["free"] = spec.free_coords;
      emit(out);
    } else {
      const auto pts = ht::slice_contour(region, spec.fixed,
                                         spec.free_coords[0],
                                         spec.free_coords[1], sl_angles);
      json out = {{"free", spec.free_coords},
                  {"status", pts.empty() ? "EMPTY" : "ok"}};
      if (!pts.empty() && !sl_contour.empty()) {
        write_contour_csv(sl_contour, pts);
        out["contour"] = sl_contour;
      } else if (!pts.empty()) {
        json arr = json::array();
        for (const auto& p : pts)
          arr.push_back({num(p(0)), num(p(1))});
        out["boundary"] = arr;
      }
      emit(out);
    }
  } else if (*c_simci) {
    const auto sf = ht::io::read_substudies_json(sc_subs);
    const auto kind = parse_method(sc_method);
    const auto region = ht::build_region(sf.substudies, kind, sf.weights,
                                         sc_level, exact_m_max);
    const auto b = parse_doubles(sc_b, "b");
    const auto iv = ht::simultaneous_ci(
        region, Eigen::Map<const Eigen::VectorXd>(
                    b.data(), static_cast<Eigen::Index>(b.size())));
    json out = interval_json(iv);
    out["b"] = b;
    out["level"] = num(sc_level);
    emit(out);
  } else if (*c_dac) {
    const auto X = ht::io::read_samples_csv(da_samples);
    const auto kind = parse_method(da_method);
    const auto region =
        ht::dac_region(X, da_d0, kind, da_level, {}, exact_m_max);
    json out = {{"method", da_method},
                {"level", num(da_level)},
                {"d", region.d},
                {"d0", da_d0},
                {"m", region.substudies.size()},
                {"status", region.nonempty() ? "ok" : "EMPTY"},
                {"min_score", num(region.min_score)},
                {"threshold", num(region.threshold)}};
    if (region.nonempty())
      out["point_estimate"] = vec(region.point_estimate());
    if (!da_b.empty()) {
      const auto b = parse_doubles(da_b, "b");
      const auto iv = ht::simultaneous_ci(
          region, Eigen::Map<const Eigen::VectorXd>(
                      b.data(), static_cast<Eigen::Index>(b.size())));
      out["simci"] = interval_json(iv);
    }
    emit(out);
  } else if (*c_net) {
    std::vector<ht::Contrast> contrasts;
    if (!nm_contrasts.empty())
      contrasts = ht::io::read_contrasts_csv(nm_contrasts);
    else if (!nm_arms.empty())
      contrasts = ht::expand_arms(ht::io::read_arms_csv(nm_arms));
    else
      throw ht::domain_error("netmeta needs --contrasts or --arms");
    const std::string ref =
        nm_ref.empty() ? ht::default_reference(contrasts) : nm_ref;
    json out = {{"reference", ref}, {"method", nm_method},
                {"level", num(nm_level)}};
    if (nm_method == "wls") {
      const auto fit = ht::wls_fit(contrasts, ref);
      out["treatments"] = fit.design.treatments;
      out["theta_hat"] = vec(fit.theta_hat);
      if (nm_pairwise) {
        const int d = fit.d();
        std::vector<Eigen::VectorXd> dirs;
        std::vector<std::pair<std::string, std::string>> labels;
        for (int i = 0; i < d; ++i) {
          Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
          b(i) = 1.0;
          dirs.push_back(b);
          labels.emplace_back(fit.design.treatments[i], ref);
        }
        for (int i = 0; i < d; ++i)
          for (int j = i + 1; j < d; ++j) {
            Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
            b(i) = 1.0;
            b(j) = -1.0;
            dirs.push_back(b);
            labels.emplace_back(fit.design.treatments[i],
                                fit.design.treatments[j]);
          }
        const auto cis = ht::wls_simultaneous(fit, nm_level, dirs);
        json arr = json::array();
        for (std::size_t k = 0; k < cis.size(); ++k)
          arr.push_back({{"treat_a", labels[k].first},
                         {"treat_b", labels[k].second},
                         {"lo", num(cis[k].lo)},
                         {"hi", num(cis[k].hi)}});
        out["intervals"] = arr;
      }
    } else {
      const auto kind = parse_method(nm_method);
      const auto fit =
          ht::hcct_fit(contrasts, ref, nm_level, kind, exact_m_max);
      out["treatments"] = fit.design.treatments;
      out["theta_hat"] = vec(fit.theta_hat);
      json dropped = json::array();
      for (std::size_t j : fit.dropped)
        dropped.push_back({{"index", j},
                           {"study", contrasts[j].study},
                           {"treat_a", contrasts[j].treat_a},
                           {"treat_b", contrasts[j].treat_b}});
      out["dropped"] = dropped;
      if (nm_pairwise) {
        json arr = json::array();
        for (const auto& ci : ht::all_pairwise_cis(fit, nm_level))
          arr.push_back({{"treat_a", ci.treat_a},
                         {"treat_b", ci.treat_b},
                         {"lo", num(ci.ci.lo)},
                         {"hi", num(ci.ci.hi)}});
        out["intervals"] = arr;
      }
    }
    emit(out);
  } else if (*c_sim) {
    const auto rhos = parse_doubles(si_rho, "rho");
    auto corr_kind = ht::CorrSpec::Kind::Equi;
    if (si_corr == "identity") corr_kind = ht::CorrSpec::Kind::Identity;
    else if (si_corr == "equi") corr_kind = ht::CorrSpec::Kind::Equi;
    else if (si_corr == "ar1") corr_kind = ht::CorrSpec::Kind::AR1;
    else throw ht::domain_error("unknown --corr '" + si_corr + "'");
    std::printf("experiment,method,corr,rho,m,d,n,d0,alpha,level,reps,seed,"
                "value,mean_width,empty_rate\n");
    for (double rho : rhos) {
      ht::CorrSpec spec{rho == 0.0 && corr_kind != ht::CorrSpec::Kind::AR1
                            ? ht::CorrSpec::Kind::Identity
                            : corr_kind,
                        rho, si_m};
      double value = 0.0, width = 0.0, empty = 0.0;
      if (si_exp == "fpr") {
        value = ht::experiment_fpr(parse_method(si_method), spec, si_alpha,
                                   si_reps, si_seed);
      } else if (si_exp == "power") {
        value = ht::experiment_power(parse_method(si_method), spec,
                                     {si_r, si_s, si_m}, si_alpha, si_reps,
                                     si_seed);
      } else if (si_exp == "coverage") {
        const auto res = ht::experiment_coverage_1d(
            spec, si_level, si_reps, si_seed, parse_method(si_method));
        value = res.coverage;
        width = res.mean_width;
        empty = res.empty_rate;
      } else if (si_exp == "dac") {
        value = ht::experiment_dac(
            si_dist == "lognormal" ? ht::DacDist::LogNormal
                                   : ht::DacDist::Normal,
            si_d, si_n, si_d0, rho, si_level, si_reps, si_seed,
            parse_method(si_method));
      } else {
        throw ht::domain_error("unknown --experiment '" + si_exp + "'");
      }
      std::printf("%s,%s,%s,%.9g,%d,%d,%d,%d,%.9g,%.9g,%d,%llu,%.9g,%.9g,"
                  "%.9g\n",
                  si_exp.c_str(), si_method.c_str(), si_corr.c_str(), rho,
                  si_m, si_d, si_n, si_d0, si_alpha, si_level, si_reps,
                  static_cast<unsigned long long>(si_seed), value, width,
                  empty);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ht::io::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ht::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

// File-format readers shared by the CLI: studies.csv, substudies.json,
// samples.csv, contrasts.csv, arms.csv.
#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "heavytail/confregion.hpp"
#include "heavytail/netmeta.hpp"

namespace heavytail::io {

struct parse_error : domain_error {
  using domain_error::domain_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw parse_error("cannot parse " + what + " from '" + s + "'");
  }
}

inline std::vector<std::vector<std::string>> read_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(split_csv(line));
  }
  return rows;
}

}  // namespace detail

struct StudiesFile {
  std::vector<StudySummary1D> studies;
  std::vector<double> weights;  // normalized; equal when column blank
};

// Header: theta_hat,sigma_hat,df,weight — df blank = infinity, weight blank
// = equal weighting.
inline StudiesFile read_studies_csv(const std::string& path) {
  auto rows = detail::read_csv(path);
  if (rows.empty()) throw parse_error(path + ": empty file");
  if (rows.front().empty() || rows.front()[0] != "theta_hat")
    throw parse_error(path + ": expected header theta_hat,sigma_hat,df,weight");
  StudiesFile out;
  bool any_weight = false;
  std::vector<double> weights;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() < 2) throw parse_error(path + ": too few fields in row");
    StudySummary1D s;
    s.theta_hat = detail::parse_double(f[0], "theta_hat");
    s.sigma_hat = detail::parse_double(f[1], "sigma_hat");
    if (!(s.sigma_hat > 0.0)) throw parse_error(path + ": sigma_hat <= 0");
    s.df = (f.size() > 2 && !f[2].empty())
               ? detail::parse_double(f[2], "df")
               : std::numeric_limits<double>::infinity();
    if (!(s.df > 0.0)) throw parse_error(path + ": df <= 0");
    double w = -1.0;
    if (f.size() > 3 && !f[3].empty()) {
      w = detail::parse_double(f[3], "weight");
      any_weight = true;
    }
    out.studies.push_back(s);
    weights.push_back(w);
  }
  if (out.studies.empty()) throw parse_error(path + ": no study rows");
  const double equal = 1.0 / static_cast<double>(out.studies.size());
  double sum = 0.0;
  for (double& w : weights) {
    if (w < 0.0) {
      if (any_weight)
        throw parse_error(path + ": weight column must be all-or-none");
      w = equal;
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw parse_error(path + ": weights sum to zero");
  for (double& w : weights) w /= sum;
  out.weights = std::move(weights);
  return out;
}

struct SubstudiesFile {
  int d = 0;
  std::vector<SubStudy> substudies;
  std::vector<double> weights;
};

// {d, substudies: [{P:[[..]], xi:[..], sigma:[[..]], df, weight}]}
inline SubstudiesFile read_substudies_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw parse_error(path + ": invalid JSON: " + e.what());
  }
  SubstudiesFile out;
  try {
    out.d = j.at("d").get<int>();
    bool any_weight = false;
    std::vector<double> weights;
    for (const auto& js : j.at("substudies")) {
      SubStudy s;
      const auto xi = js.at("xi").get<std::vector<double>>();
      const int dj = static_cast<int>(xi.size());
      s.xi = Eigen::Map<const Eigen::VectorXd>(xi.data(), dj);
      const auto pm = js.at("P").get<std::vector<std::vector<double>>>();
      const auto sm = js.at("sigma").get<std::vector<std::vector<double>>>();
      if (static_cast<int>(pm.size()) != dj ||
          static_cast<int>(sm.size()) != dj)
        throw parse_error(path + ": P/sigma row count must equal len(xi)");
      s.P.resize(dj, out.d);
      s.sigma.resize(dj, dj);
      for (int r = 0; r < dj; ++r) {
        if (static_cast<int>(pm[r].size()) != out.d)
          throw parse_error(path + ": P must be d_j x d");
        if (static_cast<int>(sm[r].size()) != dj)
          throw parse_error(path + ": sigma must be d_j x d_j");
        for (int c = 0; c < out.d; ++c) s.P(r, c) = pm[r][c];
        for (int c = 0; c < dj; ++c) s.sigma(r, c) = sm[r][c];
      }
      s.df = std::numeric_limits<double>::infinity();
      if (js.contains("df") && !js["df"].is_null())
        s.df = js["df"].get<double>();
      double w = -1.0;
      if (js.contains("weight") && !js["weight"].is_null()) {
        w = js["weight"].get<double>();
        any_weight = true;
      }
      out.substudies.push_back(std::move(s));
      weights.push_back(w);
    }
    if (out.substudies.empty()) throw parse_error(path + ": no substudies");
    const double equal = 1.0 / static_cast<double>(out.substudies.size());
    double sum = 0.0;
    for (double& w : weights) {
      if (w < 0.0) {
        if (any_weight)
          throw parse_error(path + ": weight must be all-or-none");
        w = equal;
      }
      sum += w;
    }
    for (double& w : weights) w /= sum;
    out.weights = std::move(weights);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(path + ": schema error: " + e.what());
  }
  return out;
}

// Header-free numeric matrix, one observation per row.
inline Eigen::MatrixXd read_samples_csv(const std::string& path) {
  auto rows = detail::read_csv(path);
  if (rows.empty()) throw parse_error(path + ": empty file");
  const std::size_t d = rows.front().size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != d)
      throw parse_error(path + ": ragged row in sample matrix");
    for (std::size_t c = 0; c < d; ++c)
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          detail::parse_double(rows[r][c], "sample entry");
  }
  return X;
}

// Header: study,treat1,treat2,te,se_te[,df]
inline std::vector<Contrast> read_contrasts_csv(const std::string& path) {
  auto rows = detail::read_csv(path);
  if (rows.empty()) throw parse_error(path + ": empty file");
  if (rows.front().empty() || rows.front()[0] != "study")
    throw parse_error(path +
                      ": expected header study,treat1,treat2,te,se_te[,df]");
  std::vector<Contrast> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() < 5) throw parse_error(path + ": too few fields in row");
    Contrast c;
    c.study = f[0];
    c.treat_a = f[1];
    c.treat_b = f[2];
    c.te = detail::parse_double(f[3], "te");
    c.se = detail::parse_double(f[4], "se_te");
    if (!(c.se > 0.0)) throw parse_error(path + ": se_te <= 0");
    if (f.size() > 5 && !f[5].empty())
      c.df = detail::parse_double(f[5], "df");
    out.push_back(std::move(c));
  }
  if (out.empty()) throw parse_error(path + ": no contrast rows");
  return out;
}

// Header: study,treatment,mean,sd,n
inline std::vector<ArmRow> read_arms_csv(const std::string& path) {
  auto rows = detail::read_csv(path);
  if (rows.empty()) throw parse_error(path + ": empty file");
  if (rows.front().empty() || rows.front()[0] != "study")
    throw parse_error(path + ": expected header study,treatment,mean,sd,n");
  std::vector<ArmRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() < 5) throw parse_error(path + ": too few fields in row");
    ArmRow a;
    a.study = f[0];
    a.treatment = f[1];
    a.mean = detail::parse_double(f[2], "mean");
    a.sd = detail::parse_double(f[3], "sd");
    a.n = static_cast<int>(detail::parse_double(f[4], "n"));
    out.push_back(std::move(a));
  }
  if (out.empty()) throw parse_error(path + ": no arm rows");
  return out;
}

}  // namespace heavytail::io

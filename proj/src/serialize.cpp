#include "aggorient/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "aggorient/error.hpp"
#include "aggorient/pointset_io.hpp"

namespace aggorient {

namespace fs = std::filesystem;

Json encode(const Vec2& v) { return Json::array({v.x(), v.y()}); }

Json encode(const RigidTransform& t) {
  return Json{{"translation", encode(t.translation)}, {"angle", t.angle}};
}

Json encode(const Correspondence& mu) {
  Json pairs = Json::array();
  for (const auto& [i, j] : mu.pairs) pairs.push_back(Json::array({i, j}));
  return pairs;
}

Json encode(const MatchResult& m) {
  return Json{{"transform", encode(m.transform)},
              {"pairs", encode(m.correspondence)},
              {"residual", m.residual},
              {"iterations", m.iterations},
              {"converged", m.converged}};
}

Json encode(const PairMatchResult& m) {
  return Json{{"phi_x", encode(m.phi_x)},
              {"phi_y", encode(m.phi_y)},
              {"pairs_x", encode(m.correspondence.mu_x)},
              {"pairs_y", encode(m.correspondence.mu_y)},
              {"residual", m.residual},
              {"iterations", m.iterations},
              {"converged", m.converged}};
}

Json encode(const AggregationRecord& r) {
  return Json{{"x_id", r.x_id},
              {"y_id", r.y_id},
              {"category_x", r.category_x},
              {"category_y", r.category_y},
              {"t_x", encode(r.t_x)},
              {"t_y", encode(r.t_y)},
              {"phi_x", encode(r.phi_x)},
              {"phi_y", encode(r.phi_y)},
              {"center", encode(r.center)},
              {"theta_x", r.theta_x},
              {"theta_y", r.theta_y},
              {"theta_x_norm", r.theta_x_norm},
              {"theta_y_norm", r.theta_y_norm},
              {"symmetric_x", r.symmetric_x},
              {"symmetric_y", r.symmetric_y},
              {"aspect_x", r.aspect_x},
              {"aspect_y", r.aspect_y},
              {"warn_x", r.warn_x},
              {"warn_y", r.warn_y},
              {"residual_x", r.residual_x},
              {"residual_y", r.residual_y},
              {"residual_pair", r.residual_pair},
              {"converged", r.converged}};
}

Json encode(const FourFoldVonMises& p) { return Json{{"gamma", p.gamma}, {"kappa", p.kappa}}; }

Json encode(const SimParams& p) {
  return Json{{"nu_a_x", p.nu_a_x},
              {"nu_b_x", p.nu_b_x},
              {"nu_a_y", p.nu_a_y},
              {"nu_b_y", p.nu_b_y},
              {"sigma2", p.sigma2},
              {"sigma_e2", p.sigma_e2},
              {"r_x", p.r_x},
              {"r_y", p.r_y},
              {"grid", {{"height", p.grid.height}, {"width", p.grid.width}}},
              {"pixels_per_unit", p.pixels_per_unit},
              {"noise_bins", p.noise_bins},
              {"n_cases", p.n_cases},
              {"n_replicates", p.n_replicates},
              {"seed", p.seed},
              {"contact", p.contact == ContactMode::Directed ? "directed" : "uniform"},
              {"contact_model", encode(p.contact_model)},
              {"contact_radius", p.contact_radius}};
}

Json encode(const SimTruth& t) {
  return Json{{"t_x", encode(t.t_x)},
              {"t_y", encode(t.t_y)},
              {"phi_x", encode(t.phi_x)},
              {"phi_y", encode(t.phi_y)},
              {"a_x", t.a_x},
              {"b_x", t.b_x},
              {"a_y", t.a_y},
              {"b_y", t.b_y},
              {"contact_x", encode(t.contact_x)},
              {"contact_y", encode(t.contact_y)},
              {"center", encode(t.center)},
              {"overlap", t.overlap},
              {"theta_x", t.theta_x},
              {"theta_y", t.theta_y}};
}

Json encode(const EstimateErrors& e) {
  return Json{{"t_x_translation", e.t_x_translation},
              {"t_x_angle", e.t_x_angle},
              {"t_y_translation", e.t_y_translation},
              {"t_y_angle", e.t_y_angle},
              {"phi_x_translation", e.phi_x_translation},
              {"phi_x_angle", e.phi_x_angle},
              {"phi_y_translation", e.phi_y_translation},
              {"phi_y_angle", e.phi_y_angle},
              {"theta_x", e.theta_x},
              {"theta_y", e.theta_y}};
}

Json encode(const FitResult& f) {
  Json starts = Json::array();
  for (const auto& s : f.starts) {
    starts.push_back(Json{{"start", encode(s.start)},
                          {"end", encode(s.end)},
                          {"log_likelihood", s.log_likelihood},
                          {"gradient_norm", s.gradient_norm},
                          {"iterations", s.iterations},
                          {"converged", s.converged}});
  }
  return Json{{"gamma", f.params.gamma},
              {"kappa", f.params.kappa},
              {"log_likelihood", f.log_likelihood},
              {"gradient_norm", f.gradient_norm},
              {"iterations", f.iterations},
              {"converged", f.converged},
              {"flat_likelihood", f.flat_likelihood},
              {"starts", std::move(starts)}};
}

Json encode(const TestReport& r) {
  Json j{{"test", r.test},
         {"group", r.group},
         {"null_hypothesis", r.null_hypothesis},
         {"direction", r.direction},
         {"statistic", r.statistic},
         {"critical_value", r.critical_value},
         {"alpha", r.alpha},
         {"mc_reps", r.mc_reps},
         {"n", r.n},
         {"reject", r.reject},
         {"low_precision", r.low_precision},
         {"seed", r.seed},
         {"params", encode(r.params)}};
  if (r.test == "mean") j["gamma0"] = r.gamma0;
  return j;
}

Json encode(const ShapeCategory& c) {
  return Json{{"id", c.id},
              {"members", c.member_ids},
              {"representative", c.representative_id},
              {"symmetric", c.symmetric},
              {"mean_aspect_ratio", c.mean_aspect_ratio}};
}

Vec2 decode_vec2(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

RigidTransform decode_rigid(const Json& j) {
  return RigidTransform(decode_vec2(j.at("translation")), j.at("angle").get<double>());
}

AggregationRecord decode_record(const Json& j) {
  AggregationRecord r;
  r.x_id = j.value("x_id", "");
  r.y_id = j.value("y_id", "");
  r.category_x = j.at("category_x").get<std::string>();
  r.category_y = j.at("category_y").get<std::string>();
  r.t_x = decode_rigid(j.at("t_x"));
  r.t_y = decode_rigid(j.at("t_y"));
  r.phi_x = decode_rigid(j.at("phi_x"));
  r.phi_y = decode_rigid(j.at("phi_y"));
  r.center = decode_vec2(j.at("center"));
  r.theta_x = j.at("theta_x").get<double>();
  r.theta_y = j.at("theta_y").get<double>();
  r.theta_x_norm = j.at("theta_x_norm").get<double>();
  r.theta_y_norm = j.at("theta_y_norm").get<double>();
  r.symmetric_x = j.value("symmetric_x", true);
  r.symmetric_y = j.value("symmetric_y", true);
  r.aspect_x = j.value("aspect_x", 0.0);
  r.aspect_y = j.value("aspect_y", 0.0);
  r.warn_x = j.value("warn_x", false);
  r.warn_y = j.value("warn_y", false);
  r.residual_x = j.value("residual_x", 0.0);
  r.residual_y = j.value("residual_y", 0.0);
  r.residual_pair = j.value("residual_pair", 0.0);
  r.converged = j.value("converged", true);
  return r;
}

FourFoldVonMises decode_von_mises(const Json& j) {
  return {j.at("gamma").get<double>(), j.at("kappa").get<double>()};
}

SimParams decode_sim_params(const Json& j) {
  SimParams p;
  p.nu_a_x = j.at("nu_a_x").get<double>();
  p.nu_b_x = j.at("nu_b_x").get<double>();
  p.nu_a_y = j.at("nu_a_y").get<double>();
  p.nu_b_y = j.at("nu_b_y").get<double>();
  p.sigma2 = j.at("sigma2").get<double>();
  p.sigma_e2 = j.at("sigma_e2").get<double>();
  p.r_x = j.at("r_x").get<double>();
  p.r_y = j.at("r_y").get<double>();
  p.grid.height = j.at("grid").at("height").get<int>();
  p.grid.width = j.at("grid").at("width").get<int>();
  p.pixels_per_unit = j.at("pixels_per_unit").get<double>();
  p.noise_bins = j.at("noise_bins").get<std::size_t>();
  p.n_cases = j.at("n_cases").get<std::size_t>();
  p.n_replicates = j.at("n_replicates").get<std::size_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.contact = j.at("contact").get<std::string>() == "directed" ? ContactMode::Directed : ContactMode::Uniform;
  p.contact_model = decode_von_mises(j.at("contact_model"));
  p.contact_radius = j.at("contact_radius").get<double>();
  return p;
}

SimTruth decode_truth(const Json& j) {
  SimTruth t;
  t.t_x = decode_rigid(j.at("t_x"));
  t.t_y = decode_rigid(j.at("t_y"));
  t.phi_x = decode_rigid(j.at("phi_x"));
  t.phi_y = decode_rigid(j.at("phi_y"));
  t.a_x = j.at("a_x").get<double>();
  t.b_x = j.at("b_x").get<double>();
  t.a_y = j.at("a_y").get<double>();
  t.b_y = j.at("b_y").get<double>();
  t.contact_x = decode_vec2(j.at("contact_x"));
  t.contact_y = decode_vec2(j.at("contact_y"));
  t.center = decode_vec2(j.at("center"));
  t.overlap = j.at("overlap").get<std::size_t>();
  t.theta_x = j.at("theta_x").get<double>();
  t.theta_y = j.at("theta_y").get<double>();
  return t;
}

const CategoryRef* Dataset::category(const std::string& id) const {
  for (const auto& c : categories) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) { io::write_atomic(path, j.dump(2) + "\n"); }

std::vector<Json> read_json_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<Json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_dataset(const fs::path& root, const SimParams& p, const std::vector<SimCase>& cases,
                   const Json& config) {
  struct Cat {
    std::string id;
    double r, nu_a, nu_b;
  };
  std::vector<Cat> cats{{ellipse_category_id(p.r_x), p.r_x, p.nu_a_x, p.nu_b_x}};
  if (ellipse_category_id(p.r_y) != cats.front().id) {
    cats.push_back({ellipse_category_id(p.r_y), p.r_y, p.nu_a_y, p.nu_b_y});
  }

  Json manifest;
  manifest["config"] = config;
  manifest["params"] = encode(p);
  Json jcats = Json::array();
  for (const auto& c : cats) {
    const fs::path rel = fs::path("categories") / (c.id + ".csv");
    io::write_csv(root / rel, ellipse_reference(std::exp(c.nu_a), std::exp(c.nu_b), p.pixels_per_unit));
    jcats.push_back(Json{{"id", c.id}, {"reference", rel.generic_string()}, {"symmetric", true}, {"aspect_ratio", c.r}});
  }
  manifest["categories"] = std::move(jcats);

  Json jcases = Json::array();
  for (const auto& sc : cases) {
    const fs::path rel = fs::path("cases") / sc.id;
    io::write_csv(root / rel / "x.csv", sc.x);
    io::write_csv(root / rel / "y.csv", sc.y);
    io::write_csv(root / rel / "z.csv", sc.z);
    write_json(root / rel / "truth.json", encode(sc.truth));
    Json jc{{"id", sc.id},
            {"dir", rel.generic_string()},
            {"category_x", cats.front().id},
            {"category_y", cats.back().id},
            {"replicate", sc.replicate},
            {"index", sc.index}};
    if (!sc.warnings.empty()) jc["warnings"] = sc.warnings;
    jcases.push_back(std::move(jc));
  }
  manifest["cases"] = std::move(jcases);
  write_json(root / "manifest.json", manifest);
}

Dataset read_dataset(const fs::path& root) {
  const Json m = read_json(root / "manifest.json");
  Dataset ds;
  ds.root = root;
  ds.params = m.value("params", Json());
  try {
    for (const auto& jc : m.value("categories", Json::array())) {
      CategoryRef c;
      c.id = jc.at("id").get<std::string>();
      c.symmetric = jc.value("symmetric", true);
      c.reference = io::read_csv(root / jc.at("reference").get<std::string>());
      c.reference.source_id = c.id;
      ds.categories.push_back(std::move(c));
    }
    for (const auto& jc : m.at("cases")) {
      DatasetCase c;
      c.id = jc.at("id").get<std::string>();
      c.dir = root / jc.at("dir").get<std::string>();
      c.category_x = jc.value("category_x", "");
      c.category_y = jc.value("category_y", "");
      ds.cases.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error((root / "manifest.json").string() + ": " + e.what());
  }
  return ds;
}

std::optional<SimTruth> read_truth(const DatasetCase& c) {
  const fs::path p = c.dir / "truth.json";
  if (!fs::exists(p)) return std::nullopt;
  try {
    return decode_truth(read_json(p));
  } catch (const nlohmann::json::exception& e) {
    throw Error(p.string() + ": " + e.what());
  }
}

}  // namespace aggorient

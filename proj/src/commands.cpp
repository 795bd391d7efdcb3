#include "aggorient/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "aggorient/error.hpp"
#include "aggorient/parallel.hpp"
#include "aggorient/pointset_io.hpp"

namespace aggorient::cli {

namespace fs = std::filesystem;

namespace {

/// Serializes log lines coming from worker threads.
class Log {
 public:
  Log(std::ostream& out, std::string command) : out_(out), command_(std::move(command)) {}

  void operator()(const std::string& msg) {
    std::lock_guard<std::mutex> lock(mu_);
    out_ << command_ << ": " << msg << '\n';
  }

 private:
  std::ostream& out_;
  std::string command_;
  std::mutex mu_;
};

Json common_json(const CommonOptions& c) {
  return Json{{"seed", c.seed},
              {"seed_source", c.seed_given ? "explicit" : "default"},
              {"alpha", c.alpha},
              {"mc_reps", c.mc_reps},
              {"out", c.out.generic_string()}};
}

void note_seed(const CommonOptions& c, Log& log) {
  if (!c.seed_given) log("no --seed given, using default seed " + std::to_string(c.seed));
}

void require_out(const CommonOptions& c) {
  if (c.out.empty()) throw std::invalid_argument("--out is required");
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char ch : s) {
    const bool keep = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_';
    out += keep ? ch : '_';
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return cells;
}

/// Header-addressed rows of a small CSV table.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }
};

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
    } else {
      if (cells.size() != t.header.size()) throw Error(path.string() + ": ragged row: " + line);
      t.rows.push_back(std::move(cells));
    }
  }
  if (t.header.empty()) throw Error(path.string() + ": empty table");
  return t;
}

PointSet load_shape(const fs::path& path) {
  return path.extension() == ".csv" ? io::read_csv(path) : io::load_mask(path);
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

/// Cluster report as written by cmd_cluster.
struct ClusterReport {
  std::vector<CategoryRef> categories;
  std::map<std::string, std::string> label;  // shape id -> category id
};

ClusterReport read_cluster_report(const fs::path& path) {
  const Json j = read_json(path);
  const fs::path base = path.parent_path();
  ClusterReport r;
  for (const auto& jc : j.at("categories")) {
    CategoryRef c;
    c.id = jc.at("id").get<std::string>();
    c.symmetric = jc.value("symmetric", true);
    c.reference = io::read_csv(resolve(base, jc.at("reference").get<std::string>()));
    c.reference.source_id = c.id;
    for (const auto& m : jc.at("members")) r.label[m.get<std::string>()] = c.id;
    r.categories.push_back(std::move(c));
  }
  return r;
}

Json encode_clustering(const ClusteringResult& res, const std::vector<PointSet>& shapes) {
  Json cats = Json::array();
  for (const auto& c : res.categories) {
    Json jc = encode(c);
    jc["reference"] = (fs::path("references") / (safe_name(c.id) + ".csv")).generic_string();
    cats.push_back(std::move(jc));
  }
  Json labels = Json::array();
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    labels.push_back(Json{{"id", shapes[i].source_id}, {"category", res.categories[res.labels[i]].id}});
  }
  return Json{{"k", res.categories.size()}, {"aic", res.aic}, {"categories", std::move(cats)}, {"labels", std::move(labels)}};
}

void write_references(const fs::path& dir, const ClusteringResult& res) {
  for (const auto& c : res.categories) io::write_csv(dir / "references" / (safe_name(c.id) + ".csv"), c.reference);
}

ClusterReport report_from(const ClusteringResult& res, const std::vector<PointSet>& shapes) {
  ClusterReport r;
  for (const auto& c : res.categories) r.categories.push_back({c.id, c.reference, c.symmetric});
  for (std::size_t i = 0; i < shapes.size(); ++i) r.label[shapes[i].source_id] = res.categories[res.labels[i]].id;
  return r;
}

/// An aggregation to analyze, with its point sets on disk.
struct CaseInput {
  std::string id;
  fs::path x, y, z;
  std::string category_x, category_y;
  std::optional<DatasetCase> dataset_case;
};

struct Failure {
  std::string id;
  std::string stage;
  std::string message;
};

Json mean_sd(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  const double sd = v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
  return Json{{"mean", m}, {"sd", sd}, {"n", v.size()}};
}

std::vector<AggregationRecord> read_records(const fs::path& path) {
  std::vector<AggregationRecord> out;
  for (const auto& j : read_json_lines(path)) {
    try {
      out.push_back(decode_record(j));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + ": malformed record: " + e.what());
    }
  }
  return out;
}

constexpr const char* kTestNames[] = {"ks", "uniformity", "mean"};

std::size_t test_index(const std::string& name) {
  for (std::size_t i = 0; i < std::size(kTestNames); ++i) {
    if (name == kTestNames[i]) return i;
  }
  throw std::invalid_argument("unknown test '" + name + "' (expected ks, uniformity or mean)");
}

template <typename F>
int guarded(Log& log, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kFailure;
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return derived_rng(seed, index)(); }

SimParams to_sim_params(const SimulateConfig& c) {
  SimParams p = SimParams::with_ratios(c.r_x, c.r_y, c.minor_axis);
  p.sigma2 = c.sigma * c.sigma;
  p.sigma_e2 = c.sigma_e * c.sigma_e;
  p.grid = {c.grid, c.grid};
  p.pixels_per_unit = c.pixels_per_unit;
  p.noise_bins = c.noise_bins;
  p.n_cases = c.cases;
  p.n_replicates = c.replicates;
  p.seed = c.common.seed;
  if (c.contact == "directed") {
    p.contact = ContactMode::Directed;
  } else if (c.contact != "uniform") {
    throw std::invalid_argument("--contact must be uniform or directed");
  }
  p.contact_model = {c.contact_gamma, c.contact_kappa};
  p.contact_radius = c.contact_radius;
  p.validate();
  return p;
}

Json to_config_json(const SimulateConfig& c) {
  return Json{{"command", "simulate"},
              {"common", common_json(c.common)},
              {"r_x", c.r_x},
              {"r_y", c.r_y},
              {"minor_axis", c.minor_axis},
              {"sigma", c.sigma},
              {"sigma_e", c.sigma_e},
              {"grid", c.grid},
              {"pixels_per_unit", c.pixels_per_unit},
              {"noise_bins", c.noise_bins},
              {"cases", c.cases},
              {"replicates", c.replicates},
              {"contact", c.contact},
              {"contact_gamma", c.contact_gamma},
              {"contact_kappa", c.contact_kappa},
              {"contact_radius", c.contact_radius}};
}

Json to_config_json(const ClusterConfig& c) {
  return Json{{"command", "cluster"},
              {"common", common_json(c.common)},
              {"data", c.data.generic_string()},
              {"shapes", c.shapes.generic_string()},
              {"k_max", c.k_max},
              {"min_split_ratio", c.min_split_ratio},
              {"max_points", c.max_points}};
}

Json to_config_json(const AnalyzeConfig& c) {
  return Json{{"command", "analyze"},
              {"common", common_json(c.common)},
              {"data", c.data.generic_string()},
              {"triples", c.triples.generic_string()},
              {"categories", c.categories.generic_string()},
              {"k_max", c.k_max},
              {"min_split_ratio", c.min_split_ratio},
              {"max_points", c.max_points},
              {"min_aspect", c.min_aspect}};
}

Json to_config_json(const FitConfig& c) {
  return Json{{"command", "fit"},
              {"common", common_json(c.common)},
              {"records", c.records.generic_string()},
              {"bins", c.bins},
              {"curve_points", c.curve_points},
              {"min_group", c.min_group},
              {"include_flagged", c.include_flagged}};
}

Json to_config_json(const TestConfig& c) {
  return Json{{"command", "test"},
              {"common", common_json(c.common)},
              {"records", c.records.generic_string()},
              {"sample", c.sample.generic_string()},
              {"tests", c.tests},
              {"gamma0", c.gamma0},
              {"min_group", c.min_group},
              {"include_flagged", c.include_flagged}};
}

Json to_config_json(const PipelineConfig& c) {
  Json sim = to_config_json(c.simulate);
  sim.erase("command");
  return Json{{"command", "pipeline"},
              {"simulate", std::move(sim)},
              {"max_points", c.max_points},
              {"min_aspect", c.min_aspect},
              {"tests", c.tests},
              {"gamma0", c.gamma0}};
}

std::vector<AngleGroup> group_angles(const std::vector<AggregationRecord>& records, bool include_flagged) {
  std::map<std::string, AngleGroup> groups;
  auto add = [&](const std::string& own, const std::string& partner, double value, bool flagged, bool symmetric) {
    const std::string id = own + "|" + partner;
    AngleGroup& g = groups[id];
    g.id = id;
    g.flagged += flagged ? 1 : 0;
    if (flagged && !include_flagged) return;
    g.values.push_back(value);
    g.normalized = g.normalized && symmetric;
  };
  for (const auto& r : records) {
    add(r.category_x, r.category_y, r.theta_x_norm, r.warn_x, r.symmetric_x);
    add(r.category_y, r.category_x, r.theta_y_norm, r.warn_y, r.symmetric_y);
  }
  std::vector<AngleGroup> out;
  for (auto& [id, g] : groups) out.push_back(std::move(g));
  return out;
}

int cmd_simulate(const SimulateConfig& c, std::ostream& out) {
  Log log(out, "simulate");
  return guarded(log, [&] {
    require_out(c.common);
    note_seed(c.common, log);
    const SimParams p = to_sim_params(c);
    const auto cases = simulate_batch(p);
    std::size_t resampled = 0;
    for (const auto& sc : cases) resampled += sc.warnings.empty() ? 0 : 1;
    write_dataset(c.common.out, p, cases, to_config_json(c));
    log("wrote " + std::to_string(cases.size()) + " cases to " + c.common.out.string() +
        (resampled ? " (" + std::to_string(resampled) + " needed resampling)" : ""));
    return kSuccess;
  });
}

int cmd_cluster(const ClusterConfig& c, std::ostream& out) {
  Log log(out, "cluster");
  return guarded(log, [&] {
    require_out(c.common);
    std::vector<PointSet> shapes;
    if (!c.data.empty()) {
      const Dataset ds = read_dataset(c.data);
      for (const auto& dc : ds.cases) {
        for (const char* which : {"x", "y"}) {
          PointSet ps = io::read_csv(dc.dir / (std::string(which) + ".csv"));
          ps.source_id = dc.id + "/" + which;
          shapes.push_back(std::move(ps));
        }
      }
    } else if (!c.shapes.empty()) {
      std::ifstream in(c.shapes);
      if (!in) throw Error("cannot open " + c.shapes.string());
      std::string line;
      while (std::getline(in, line)) {
        const auto cells = split_csv_line(line);
        if (cells.empty() || cells.front().empty()) continue;
        PointSet ps = load_shape(resolve(c.shapes.parent_path(), cells.front()));
        ps.source_id = cells.front();
        shapes.push_back(std::move(ps));
      }
    } else {
      throw std::invalid_argument("cluster needs --data or --shapes");
    }
    if (shapes.empty()) throw Error("no shapes to cluster");
    log("clustering " + std::to_string(shapes.size()) + " shapes");
    ClusterOptions opts;
    opts.match.max_points = c.max_points;
    opts.min_split_ratio = c.min_split_ratio;
    const ClusteringResult res = cluster_shapes(shapes, std::min(c.k_max, shapes.size()), opts);
    write_references(c.common.out, res);
    Json report = encode_clustering(res, shapes);
    report["config"] = to_config_json(c);
    write_json(c.common.out / "clusters.json", report);
    log("selected K = " + std::to_string(res.categories.size()));
    return kSuccess;
  });
}

int cmd_analyze(const AnalyzeConfig& c, std::ostream& out) {
  Log log(out, "analyze");
  return guarded(log, [&]() -> int {
    require_out(c.common);
    std::vector<CaseInput> inputs;
    std::optional<Dataset> ds;
    double ppu = 10.0;
    if (!c.data.empty()) {
      ds = read_dataset(c.data);
      if (!ds->params.is_null()) ppu = ds->params.value("pixels_per_unit", 10.0);
      for (const auto& dc : ds->cases) {
        inputs.push_back({dc.id, dc.dir / "x.csv", dc.dir / "y.csv", dc.dir / "z.csv", dc.category_x, dc.category_y, dc});
      }
    } else if (!c.triples.empty()) {
      const Table t = read_table(c.triples);
      const auto ci = t.column("id"), cx = t.column("x"), cy = t.column("y"), cz = t.column("z");
      if (!ci || !cx || !cy || !cz) throw Error(c.triples.string() + ": need columns id,x,y,z");
      const auto ccx = t.column("category_x"), ccy = t.column("category_y");
      const fs::path base = c.triples.parent_path();
      for (const auto& row : t.rows) {
        inputs.push_back({row[*ci], resolve(base, row[*cx]), resolve(base, row[*cy]), resolve(base, row[*cz]),
                          ccx ? row[*ccx] : "", ccy ? row[*ccy] : "", std::nullopt});
      }
    } else {
      throw std::invalid_argument("analyze needs --data or --triples");
    }
    if (inputs.empty()) throw Error("no cases to analyze");

    // Categories: an explicit cluster report, else the dataset's own, else cluster here.
    ClusterReport cats;
    std::string category_source;
    if (!c.categories.empty()) {
      cats = read_cluster_report(c.categories);
      category_source = "report";
    } else if (ds && !ds->categories.empty()) {
      cats.categories = ds->categories;
      category_source = "dataset";
    } else {
      category_source = "clustering";
      std::vector<PointSet> shapes;
      for (const auto& in : inputs) {
        try {
          PointSet x = load_shape(in.x), y = load_shape(in.y);
          x.source_id = in.id + "/x";
          y.source_id = in.id + "/y";
          shapes.push_back(std::move(x));
          shapes.push_back(std::move(y));
        } catch (const std::exception& e) {
          log(in.id + ": skipped in clustering: " + e.what());
        }
      }
      if (shapes.empty()) throw Error("no readable primaries to cluster");
      log("clustering " + std::to_string(shapes.size()) + " primaries");
      ClusterOptions opts;
      opts.match.max_points = c.max_points;
      opts.min_split_ratio = c.min_split_ratio;
      cats = report_from(cluster_shapes(shapes, std::min(c.k_max, shapes.size()), opts), shapes);
    }
    auto find_category = [&](const std::string& id) -> const CategoryRef* {
      for (const auto& cat : cats.categories) {
        if (cat.id == id) return &cat;
      }
      return nullptr;
    };
    auto category_of = [&](const CaseInput& in, const char* which, const std::string& named) {
      const auto it = cats.label.find(in.id + "/" + which);
      const std::string id = it != cats.label.end() ? it->second : named;
      const CategoryRef* cat = find_category(id);
      if (!cat) throw StageError("categories", "no category for " + in.id + "/" + which);
      return cat;
    };

    AnalyzeOptions opts;
    opts.match.max_points = c.max_points;
    opts.min_aspect_ratio = c.min_aspect;

    std::vector<std::optional<Json>> lines(inputs.size());
    std::vector<std::optional<Failure>> failures(inputs.size());
    std::vector<std::optional<EstimateErrors>> errors(inputs.size());
    std::vector<AggregationRecord> records(inputs.size());
    parallel_for(inputs.size(), [&](std::size_t i) {
      const CaseInput& in = inputs[i];
      try {
        const CategoryRef* cx = category_of(in, "x", in.category_x);
        const CategoryRef* cy = category_of(in, "y", in.category_y);
        PointSet x, y, z;
        try {
          x = load_shape(in.x);
          y = load_shape(in.y);
          z = load_shape(in.z);
        } catch (const std::exception& e) {
          throw StageError("read", e.what());
        }
        x.source_id = in.id + "/x";
        y.source_id = in.id + "/y";
        AggregationRecord rec = analyze_aggregation(x, y, z, *cx, *cy, opts);
        Json line{{"id", in.id}};
        line.update(encode(rec));
        if (in.dataset_case) {
          if (const auto truth = read_truth(*in.dataset_case)) {
            errors[i] = evaluate_estimates(*truth, rec, ppu);
            line["errors"] = encode(*errors[i]);
          }
        }
        records[i] = std::move(rec);
        lines[i] = std::move(line);
      } catch (const StageError& e) {
        failures[i] = Failure{in.id, e.stage(), e.what()};
      } catch (const std::exception& e) {
        failures[i] = Failure{in.id, "analyze", e.what()};
      }
      if (failures[i]) log(in.id + " failed: " + failures[i]->message);
    });

    std::string body;
    std::size_t n_ok = 0, n_flag_x = 0, n_flag_y = 0, n_nonconverged = 0;
    std::map<std::string, std::size_t> per_category;
    Json jfail = Json::array();
    std::map<std::string, std::vector<double>> err_cols;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (failures[i]) {
        jfail.push_back(Json{{"id", failures[i]->id}, {"stage", failures[i]->stage}, {"error", failures[i]->message}});
        continue;
      }
      ++n_ok;
      body += lines[i]->dump() + "\n";
      const auto& r = records[i];
      ++per_category[r.category_x];
      ++per_category[r.category_y];
      n_flag_x += r.warn_x ? 1 : 0;
      n_flag_y += r.warn_y ? 1 : 0;
      n_nonconverged += r.converged ? 0 : 1;
      if (errors[i]) {
        const Json je = encode(*errors[i]);
        for (const auto& [k, v] : je.items()) err_cols[k].push_back(v.get<double>());
      }
    }
    io::write_atomic(c.common.out, body);

    Json summary{{"config", to_config_json(c)},
                 {"category_source", category_source},
                 {"cases", inputs.size()},
                 {"records", n_ok},
                 {"failed", inputs.size() - n_ok},
                 {"primaries_per_category", per_category},
                 {"aspect_warnings", {{"x", n_flag_x}, {"y", n_flag_y}, {"threshold", c.min_aspect}}},
                 {"not_converged", n_nonconverged},
                 {"failures", std::move(jfail)}};
    if (!err_cols.empty()) {
      Json je;
      for (const auto& [k, v] : err_cols) je[k] = mean_sd(v);
      summary["errors"] = std::move(je);
    }
    fs::path summary_path = c.common.out;
    summary_path.replace_extension(".summary.json");
    write_json(summary_path, summary);
    log(std::to_string(n_ok) + " of " + std::to_string(inputs.size()) + " cases analyzed");
    if (n_ok == 0) return kFailure;
    return n_ok == inputs.size() ? kSuccess : kPartial;
  });
}

int cmd_fit(const FitConfig& c, std::ostream& out) {
  Log log(out, "fit");
  return guarded(log, [&]() -> int {
    require_out(c.common);
    if (c.records.empty()) throw std::invalid_argument("fit needs --records");
    const auto records = read_records(c.records);
    if (records.empty()) throw Error("no records in " + c.records.string());

    Json fitted = Json::array(), skipped = Json::array();
    for (const auto& g : group_angles(records, c.include_flagged)) {
      auto skip = [&](const std::string& why) {
        log("skipping group " + g.id + ": " + why);
        skipped.push_back(Json{{"group", g.id}, {"n", g.values.size()}, {"reason", why}});
      };
      if (!g.normalized) {
        skip("category is not four-fold symmetric");
        continue;
      }
      if (g.values.size() < std::max<std::size_t>(c.min_group, 5)) {
        skip("fewer than " + std::to_string(std::max<std::size_t>(c.min_group, 5)) + " angles");
        continue;
      }
      const AngleSample s{g.values, g.id};
      FitResult fit;
      try {
        fit = mle_fit(s);
      } catch (const FitFailure& e) {
        skip(e.what());
        continue;
      }
      const std::string stem = safe_name(g.id);
      std::ostringstream dens, hist;
      write_density_csv(dens, fit.params, c.curve_points);
      write_histogram_csv(hist, s, c.bins);
      io::write_atomic(c.common.out / (stem + "_density.csv"), dens.str());
      io::write_atomic(c.common.out / (stem + "_histogram.csv"), hist.str());
      if (fit.flat_likelihood) log(g.id + ": likelihood is flat in gamma, the mean direction is poorly determined");
      fitted.push_back(Json{{"group", g.id},
                            {"n", g.values.size()},
                            {"aspect_flagged", g.flagged},
                            {"flagged_included", c.include_flagged},
                            {"fit", encode(fit)},
                            {"density_csv", stem + "_density.csv"},
                            {"histogram_csv", stem + "_histogram.csv"}});
    }

    // correlation of the paired angles per unordered category pair
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> pairs;
    for (const auto& r : records) {
      if (!r.symmetric_x || !r.symmetric_y) continue;
      if ((r.warn_x || r.warn_y) && !c.include_flagged) continue;
      if (r.category_x <= r.category_y) {
        pairs[{r.category_x, r.category_y}].emplace_back(r.theta_x_norm, r.theta_y_norm);
      } else {
        pairs[{r.category_y, r.category_x}].emplace_back(r.theta_y_norm, r.theta_x_norm);
      }
    }
    Json corr = Json::array();
    for (const auto& [key, v] : pairs) {
      Json jc{{"pair", key.first + "|" + key.second}, {"n", v.size()}};
      try {
        const double rho = circular_correlation(v, key.first == key.second);
        jc["rho"] = rho;
        jc["rho_squared"] = rho * rho;
      } catch (const DegenerateError& e) {
        jc["rho"] = nullptr;
        jc["note"] = e.what();
      }
      corr.push_back(std::move(jc));
    }

    write_json(c.common.out / "fit.json", Json{{"config", to_config_json(c)},
                                              {"groups", std::move(fitted)},
                                              {"skipped", std::move(skipped)},
                                              {"correlations", std::move(corr)}});
    return kSuccess;
  });
}

int cmd_test(const TestConfig& c, std::ostream& out) {
  Log log(out, "test");
  return guarded(log, [&]() -> int {
    require_out(c.common);
    note_seed(c.common, log);
    std::vector<std::size_t> selected;
    for (const auto& t : c.tests) selected.push_back(test_index(t));
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
    if (selected.empty()) throw std::invalid_argument("no tests selected");

    std::vector<AngleGroup> groups;
    if (!c.records.empty()) {
      groups = group_angles(read_records(c.records), c.include_flagged);
    } else if (!c.sample.empty()) {
      const Table t = read_table(c.sample);
      const auto ct = t.column("theta");
      if (!ct) throw Error(c.sample.string() + ": need a theta column");
      const auto cg = t.column("group");
      std::map<std::string, AngleGroup> by;
      for (const auto& row : t.rows) {
        const std::string id = cg ? row[*cg] : "sample";
        by[id].id = id;
        by[id].values.push_back(std::stod(row[*ct]));
      }
      for (auto& [id, g] : by) groups.push_back(std::move(g));
    } else {
      throw std::invalid_argument("test needs --records or --sample");
    }
    if (groups.empty()) throw Error("no angles to test");

    Json jgroups = Json::array(), skipped = Json::array();
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const AngleGroup& g = groups[gi];
      const std::size_t need = std::max<std::size_t>(c.min_group, 5);
      if (!g.normalized || g.values.size() < need) {
        const std::string why = g.normalized ? "fewer than " + std::to_string(need) + " angles"
                                             : "category is not four-fold symmetric";
        log("skipping group " + g.id + ": " + why);
        skipped.push_back(Json{{"group", g.id}, {"n", g.values.size()}, {"reason", why}});
        continue;
      }
      const AngleSample s{g.values, g.id};
      s.validate();
      Json reports = Json::array();
      Json jfit;
      std::optional<FitResult> fit;
      try {
        fit = mle_fit(s);
        jfit = encode(*fit);
      } catch (const FitFailure& e) {
        log(g.id + ": " + e.what());
      }
      for (std::size_t ti : selected) {
        const std::uint64_t seed = derive_seed(c.common.seed, gi * std::size(kTestNames) + ti);
        TestReport r;
        if (ti == 0) {
          if (!fit) continue;
          r = ks_test(s, fit->params, c.common.alpha, c.common.mc_reps, seed);
        } else if (ti == 1) {
          r = test_uniformity(s, c.common.alpha, c.common.mc_reps, seed);
        } else {
          r = test_mean(s, c.gamma0, c.common.alpha, c.common.mc_reps, seed);
        }
        log(g.id + " " + r.test + ": statistic " + std::to_string(r.statistic) + ", critical value " +
            std::to_string(r.critical_value) + (r.reject ? ", reject" : ", accept"));
        reports.push_back(encode(r));
      }
      jgroups.push_back(Json{{"group", g.id}, {"n", g.values.size()}, {"fit", std::move(jfit)}, {"tests", std::move(reports)}});
    }
    write_json(c.common.out, Json{{"config", to_config_json(c)}, {"groups", std::move(jgroups)}, {"skipped", std::move(skipped)}});
    return kSuccess;
  });
}

int cmd_pipeline(const PipelineConfig& c, std::ostream& out) {
  Log log(out, "pipeline");
  return guarded(log, [&]() -> int {
    require_out(c.simulate.common);
    const fs::path root = c.simulate.common.out;

    SimulateConfig sim = c.simulate;
    sim.common.out = root / "data";
    AnalyzeConfig an;
    an.common = c.simulate.common;
    an.common.out = root / "records.jsonl";
    an.data = sim.common.out;
    an.max_points = c.max_points;
    an.min_aspect = c.min_aspect;
    FitConfig fit;
    fit.common = c.simulate.common;
    fit.common.out = root / "fit";
    fit.records = an.common.out;
    TestConfig test;
    test.common = c.simulate.common;
    test.common.out = root / "tests.json";
    test.records = an.common.out;
    test.tests = c.tests;
    test.gamma0 = c.gamma0;

    Json steps = Json::object();
    int status = kSuccess;
    auto run = [&](const char* name, int code) {
      steps[name] = code;
      if (code == kPartial) status = kPartial;
      return code != kFailure;
    };
    const bool ok = run("simulate", cmd_simulate(sim, out)) && run("analyze", cmd_analyze(an, out)) &&
                    run("fit", cmd_fit(fit, out)) && run("test", cmd_test(test, out));
    if (!ok) status = kFailure;

    Json summary{{"config", to_config_json(c)}, {"exit_codes", steps}};
    if (ok) {
      Json decisions = Json::array();
      const Json tests = read_json(test.common.out);
      for (const auto& g : tests.at("groups")) {
        for (const auto& r : g.at("tests")) {
          decisions.push_back(Json{{"group", g.at("group")}, {"test", r.at("test")}, {"reject", r.at("reject")}});
        }
      }
      summary["decisions"] = std::move(decisions);
    }
    write_json(root / "pipeline.json", summary);
    return status;
  });
}

}  // namespace aggorient::cli

// Command-line front end: simulate, cluster, analyze, fit, test, pipeline.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aggorient/commands.hpp"

namespace cli = aggorient::cli;

namespace {

void add_common(CLI::App* app, cli::CommonOptions& c, bool out_required = true) {
  app->add_option("--seed", c.seed, "master RNG seed (default 0)");
  app->add_option("--alpha", c.alpha, "test level")->check(CLI::Range(0.0, 1.0));
  app->add_option("--mc-reps", c.mc_reps, "Monte Carlo replicates for critical values");
  auto* out = app->add_option("--out", c.out, "output path");
  if (out_required) out->required();
}

void add_simulate(CLI::App* app, cli::SimulateConfig& s) {
  app->add_option("--rx", s.r_x, "mean aspect ratio of X");
  app->add_option("--ry", s.r_y, "mean aspect ratio of Y");
  app->add_option("--minor-axis", s.minor_axis, "typical semi-minor axis in units");
  app->add_option("--sigma", s.sigma, "sd of the log axis lengths");
  app->add_option("--sigma-e", s.sigma_e, "sd of the boundary noise");
  app->add_option("--grid", s.grid, "grid height and width in pixels");
  app->add_option("--pixels-per-unit", s.pixels_per_unit);
  app->add_option("--noise-bins", s.noise_bins, "angular bins of the boundary noise");
  app->add_option("--cases", s.cases, "cases per replicate");
  app->add_option("--replicates", s.replicates);
  app->add_option("--contact", s.contact, "uniform or directed")->check(CLI::IsMember({"uniform", "directed"}));
  app->add_option("--contact-gamma", s.contact_gamma, "mean direction of directed contacts");
  app->add_option("--contact-kappa", s.contact_kappa, "concentration of directed contacts");
  app->add_option("--contact-radius", s.contact_radius, "contact depth as a fraction of the boundary radius");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orientation analysis of pairwise particle aggregation"};
  app.require_subcommand(1);

  cli::SimulateConfig sim;
  auto* c_sim = app.add_subcommand("simulate", "generate an ellipse aggregation dataset");
  add_common(c_sim, sim.common);
  add_simulate(c_sim, sim);

  cli::ClusterConfig clu;
  auto* c_clu = app.add_subcommand("cluster", "group primaries into shape categories");
  add_common(c_clu, clu.common);
  auto* clu_data = c_clu->add_option("--data", clu.data, "dataset directory");
  c_clu->add_option("--shapes", clu.shapes, "file listing CSV or mask paths")->excludes(clu_data);
  c_clu->add_option("--k-max", clu.k_max);
  c_clu->add_option("--min-split-ratio", clu.min_split_ratio, "largest SSE ratio a split must reach");
  c_clu->add_option("--max-points", clu.max_points);

  cli::AnalyzeConfig an;
  auto* c_an = app.add_subcommand("analyze", "estimate transforms and orientation angles");
  add_common(c_an, an.common);
  auto* an_data = c_an->add_option("--data", an.data, "dataset directory");
  c_an->add_option("--triples", an.triples, "CSV with columns id,x,y,z")->excludes(an_data);
  c_an->add_option("--categories", an.categories, "cluster report (clusters.json)");
  c_an->add_option("--k-max", an.k_max);
  c_an->add_option("--min-split-ratio", an.min_split_ratio, "largest SSE ratio a split must reach");
  c_an->add_option("--max-points", an.max_points);
  c_an->add_option("--min-aspect", an.min_aspect, "aspect ratio below which a primary is flagged");

  cli::FitConfig fit;
  auto* c_fit = app.add_subcommand("fit", "fit the four-fold von Mises model per group");
  add_common(c_fit, fit.common);
  c_fit->add_option("--records", fit.records)->required();
  c_fit->add_option("--bins", fit.bins, "histogram bins");
  c_fit->add_option("--curve-points", fit.curve_points);
  c_fit->add_option("--min-group", fit.min_group);
  c_fit->add_flag("--include-flagged", fit.include_flagged, "keep primaries below the aspect threshold");

  cli::TestConfig test;
  auto* c_test = app.add_subcommand("test", "goodness-of-fit, uniformity and mean direction tests");
  add_common(c_test, test.common);
  auto* t_rec = c_test->add_option("--records", test.records);
  c_test->add_option("--sample", test.sample, "CSV with a theta column")->excludes(t_rec);
  c_test->add_option("--tests", test.tests, "subset of ks,uniformity,mean")->delimiter(',');
  c_test->add_option("--gamma0", test.gamma0, "mean direction under the null");
  c_test->add_option("--min-group", test.min_group);
  c_test->add_flag("--include-flagged", test.include_flagged, "keep primaries below the aspect threshold");

  cli::PipelineConfig pipe;
  pipe.simulate.contact = "directed";
  auto* c_pipe = app.add_subcommand("pipeline", "simulate, analyze, fit and test in one run");
  add_common(c_pipe, pipe.simulate.common);
  add_simulate(c_pipe, pipe.simulate);
  c_pipe->add_option("--max-points", pipe.max_points);
  c_pipe->add_option("--min-aspect", pipe.min_aspect);
  c_pipe->add_option("--tests", pipe.tests)->delimiter(',');
  c_pipe->add_option("--gamma0", pipe.gamma0);

  CLI11_PARSE(app, argc, argv);

  auto seeded = [](CLI::App* a, cli::CommonOptions& c) { c.seed_given = a->count("--seed") > 0; };
  if (c_sim->parsed()) {
    seeded(c_sim, sim.common);
    return cli::cmd_simulate(sim, std::cerr);
  }
  if (c_clu->parsed()) {
    seeded(c_clu, clu.common);
    return cli::cmd_cluster(clu, std::cerr);
  }
  if (c_an->parsed()) {
    seeded(c_an, an.common);
    return cli::cmd_analyze(an, std::cerr);
  }
  if (c_fit->parsed()) {
    seeded(c_fit, fit.common);
    return cli::cmd_fit(fit, std::cerr);
  }
  if (c_test->parsed()) {
    seeded(c_test, test.common);
    return cli::cmd_test(test, std::cerr);
  }
  seeded(c_pipe, pipe.simulate.common);
  return cli::cmd_pipeline(pipe, std::cerr);
}

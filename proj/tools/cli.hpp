#pragma once

// Command-line front end. cli_main is separate from main() so tests can
// drive it with captured streams.

#include "dfm/dfm.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

namespace dfm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

struct SpecArgs {
  std::string config;
  std::string experiment;
  std::uint64_t seed = 42;
  int reps = 0;
  bool resample_labels = false;
  CLI::Option* seed_opt = nullptr;
};

inline void add_spec_options(CLI::App* cmd, SpecArgs& args) {
  auto* cfg = cmd->add_option("--config", args.config, "experiment config file");
  auto* exp = cmd->add_option("--experiment", args.experiment,
                              "built-in experiment: 1a 1b 1c 2a 2b 2c 3a 3b 4");
  cfg->excludes(exp);
  args.seed_opt = cmd->add_option("--seed", args.seed, "base seed (default 42)");
  cmd->add_option("--reps", args.reps, "repetitions per grid point")->check(CLI::PositiveNumber);
  cmd->add_flag("--resample-labels", args.resample_labels,
                "redraw labels for every repetition");
}

inline ExperimentSpec load_spec(const SpecArgs& args) {
  ExperimentSpec spec;
  if (!args.config.empty()) {
    spec = parse_experiment_config_file(args.config);
  } else if (!args.experiment.empty()) {
    spec = builtin_experiment(args.experiment);
  } else {
    throw CLI::RequiredError("--config or --experiment");
  }
  if (args.seed_opt && args.seed_opt->count()) {
    spec.seed = args.seed;
    spec.kmeans.rng = RandomStream{spec.seed, 0};
  }
  if (args.reps > 0) spec.reps = args.reps;
  if (args.resample_labels) spec.resample_labels = true;
  spec.validate();
  return spec;
}

inline std::vector<int> one_based(const std::vector<int>& ids) {
  std::vector<int> out(ids);
  for (auto& v : out) ++v;
  return out;
}

inline std::string labels_text(const std::vector<int>& ids) {
  std::string s;
  for (int v : ids) s += std::to_string(v) + '\n';
  return s;
}

/// Reads a GML graph or a whitespace matrix, chosen by file extension.
inline Matrix read_input_matrix(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  if (path.extension() == ".gml") return gml_adjacency(parse_gml(text));
  return parse_matrix(text);
}

inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Community detection under the distribution-free model", "dfm"};
  app.require_subcommand(1);

  // generate
  SpecArgs gen;
  std::string gen_out = "dfm";
  std::size_t gen_point = 0;
  auto* generate = app.add_subcommand("generate", "sample labels, Omega, A and Ahat for one grid point");
  add_spec_options(generate, gen);
  generate->add_option("--out", gen_out, "output prefix (writes PREFIX_{labels,omega,A,Ahat}.txt)");
  generate->add_option("--point", gen_point, "grid index (default 0)");

  // detect
  std::string det_input, det_out;
  int det_k = 0, det_k0 = 0;
  std::uint64_t det_seed = 42;
  auto* detect = app.add_subcommand("detect", "cluster a GML graph or matrix file; prints one label per line");
  detect->add_option("--input", det_input, "GML file or whitespace matrix")->required();
  detect->add_option("--k", det_k, "number of communities")->required()->check(CLI::PositiveNumber);
  detect->add_option("--k0", det_k0, "rank of P (default K)")->check(CLI::PositiveNumber);
  detect->add_option("--seed", det_seed, "k-means seed (default 42)");
  detect->add_option("--out", det_out, "also write labels here");

  // sweep
  SpecArgs sw;
  std::string sw_out;
  bool sw_timing = false;
  auto* sweep = app.add_subcommand("sweep", "run a synthetic experiment and write a CSV");
  add_spec_options(sweep, sw);
  sweep->add_option("--out", sw_out, "CSV path")->required();
  sweep->add_flag("--timing", sw_timing, "record elapsed_ms (output no longer reproducible)");

  // realdata
  std::string rd_dataset, rd_out, rd_dir;
  std::uint64_t rd_seed = 42;
  int rd_reps = 50;
  bool rd_timing = false;
  auto* realdata = app.add_subcommand("realdata", "noise sweep on the karate or polbooks network");
  realdata->add_option("--dataset", rd_dataset, "karate or polbooks")
      ->required()
      ->check(CLI::IsMember({"karate", "polbooks"}));
  realdata->add_option("--out", rd_out, "CSV path")->required();
  realdata->add_option("--seed", rd_seed, "base seed (default 42)");
  realdata->add_option("--reps", rd_reps, "repetitions per noise level")->check(CLI::PositiveNumber);
  realdata->add_option("--data-dir", rd_dir, "directory with karate.gml, karate_labels.txt, polbooks.gml");
  realdata->add_flag("--timing", rd_timing, "record elapsed_ms");

  // check
  SpecArgs chk;
  auto* check = app.add_subcommand("check", "assumption diagnostics and the sigma_K0 bound per grid point");
  add_spec_options(check, chk);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*generate) {
      const auto spec = load_spec(gen);
      if (gen_point >= spec.grid.size()) throw ValidationError("--point is past the end of the grid");
      const auto pt = spec.at(gen_point);
      const auto labels = sample_labels(spec.n, spec.k,
                                        detail::cell_stream(spec.seed, detail::kLabelsTag, 0, 0));
      const auto omega = build_omega(ModelSpec(spec.connectivity(), labels, pt.rho));
      const auto bundle = sample_bundle(
          omega.omega, pt.distribution, pt.noise,
          detail::cell_stream(spec.seed, detail::kAdjacencyTag, gen_point, 0),
          detail::cell_stream(spec.seed, detail::kNoiseTag, gen_point, 0));
      const std::vector<std::pair<std::string, std::string>> files = {
          {gen_out + "_labels.txt", labels_text(labels.to_one_based())},
          {gen_out + "_omega.txt", format_matrix(omega.omega)},
          {gen_out + "_A.txt", format_matrix(bundle.a)},
          {gen_out + "_Ahat.txt", format_matrix(bundle.ahat)}};
      for (const auto& [path, text] : files) {
        write_text_file(path, text);
        out << path << '\n';
      }
    } else if (*detect) {
      const Matrix ahat = read_input_matrix(det_input);
      const int k0 = det_k0 > 0 ? det_k0 : det_k;
      KMeansConfig cfg;
      cfg.rng = RandomStream{det_seed, 0};
      const auto labels = one_based(dfa(ahat, det_k, k0, cfg));
      out << labels_text(labels);
      if (!det_out.empty()) {
        write_text_file(det_out, labels_text(labels));
        err << det_out << '\n';
      }
    } else if (*sweep) {
      const auto spec = load_spec(sw);
      for (const auto& note : spec.notes) err << "note: " << note << '\n';
      SweepOptions opts;
      opts.timing = sw_timing;
      const auto records = run_sweep(spec, opts);
      write_results_csv(to_rows(row_context(spec), records), sw_out);
      out << sw_out << '\n';
    } else if (*realdata) {
      const std::filesystem::path dir = rd_dir.empty() ? default_data_dir() : std::filesystem::path(rd_dir);
      const Dataset data =
          rd_dataset == "karate" ? load_karate_from_dir(dir) : load_polbooks_from_dir(dir);
      SweepOptions opts;
      opts.timing = rd_timing;
      const auto records = run_realdata(data, realdata_noise_grid(), rd_reps, rd_seed, opts);
      write_results_csv(to_rows(row_context(data, rd_seed), records), rd_out);
      out << rd_out << '\n';
    } else if (*check) {
      const auto spec = load_spec(chk);
      out << "grid " << sweep_key(spec.sweep) << ", n=" << spec.n << " K=" << spec.k
          << " K0=" << spec.k0 << " distribution=" << spec.distribution << '\n';
      for (std::size_t g = 0; g < spec.grid.size(); ++g) {
        const auto pt = spec.at(g);
        const auto labels = sample_labels(spec.n, spec.k,
                                          detail::cell_stream(spec.seed, detail::kLabelsTag, 0, 0));
        const ModelSpec model(spec.connectivity(), labels, pt.rho);
        const auto report = check_assumptions(model, pt.distribution, pt.noise);
        const auto sigma = sigma_lower_bound_check(model);
        const auto delta = delta_separation(build_omega(model).omega, labels, spec.k0);
        out << sweep_key(spec.sweep) << '=' << format_double(spec.grid[g])
            << " gamma=" << format_double(report.gamma_bound)
            << " sparsity=" << format_double(report.sparsity_statistic)
            << " delta=" << format_double(delta.delta)
            << " sigmaK0(Omega)=" << format_double(sigma.sigma_k0_omega)
            << " bound=" << format_double(sigma.bound)
            << " bound_holds=" << (sigma.holds ? "yes" : "no");
        const auto rates = theoretical_rate(model, report.gamma_bound, pt.noise.variance, delta.delta);
        out << " rate=" << format_double(rates.at("with_noise_general")) << '\n';
        for (const auto& flag : report.flags) out << "  warning: " << flag << '\n';
      }
    }
  } catch (const CLI::ParseError& e) {
    err << "dfm: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "dfm: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace dfm::cli

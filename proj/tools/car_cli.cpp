// Command-line front end: models, densities, samples and reports are wired
// into reproducible batch workflows. Every command prints a JSON report on
// standard output; exit code 0 means success / no_evidence / compatible /
// equal, 2 means a reject_CAR / projection_residual / not-equal verdict, and
// 1 means an input or runtime error (with a machine-readable error object).

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "car/coarsening.hpp"
#include "car/factorize.hpp"
#include "car/io.hpp"
#include "car/mechanisms.hpp"
#include "car/polar.hpp"
#include "car/stat_tests.hpp"

namespace {

using nlohmann::json;

struct Output {
  json doc;
  int exit_code = 0;
};

void emit(const json& doc, bool pretty) {
  std::cout << (pretty ? doc.dump(2) : doc.dump()) << "\n";
}

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json vector_on_space(const car::BaseSpace& space, const Eigen::VectorXd& v) {
  return json{{"labels", space.labels()},
              {"weights", vector_json(space.weights())},
              {"values", vector_json(v)}};
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::runtime_error("range must look like lo:hi");
  }
  return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

Eigen::MatrixXd load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json doc;
  in >> doc;
  const auto& rows = doc.at("joint");
  if (!rows.is_array() || rows.empty()) {
    throw std::runtime_error("table file needs a joint array");
  }
  const Eigen::Index ncols = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()), ncols);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != ncols) {
      throw std::runtime_error("table rows have inconsistent lengths");
    }
    for (Eigen::Index c = 0; c < ncols; ++c) {
      table(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    ++r;
  }
  return table;
}

int decision_code(const car::TestReport& report) {
  return report.decision == car::TestReport::Decision::kRejectCar ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-space toolkit for coarsened-data models"};
  app.require_subcommand(1);
  bool pretty = false;
  app.add_flag("--pretty", pretty, "indent the JSON report");

  // validate
  auto* cmd_validate = app.add_subcommand("validate", "check a model file");
  std::string validate_model;
  int validate_trials = 50;
  std::uint64_t validate_seed = 1;
  cmd_validate->add_option("--model", validate_model)->required();
  cmd_validate->add_option("--trials", validate_trials);
  cmd_validate->add_option("--seed", validate_seed);

  // make
  auto* cmd_make = app.add_subcommand("make", "construct a canonical model");
  std::string make_mechanism;
  int make_grid = 0;
  std::string make_out;
  cmd_make
      ->add_option("--mechanism", make_mechanism)
      ->required()
      ->check(CLI::IsMember({"current-status", "right-censored", "missing",
                             "subset", "product"}));
  cmd_make->add_option("--grid", make_grid)->required();
  cmd_make->add_option("-o,--output", make_out);

  // apply
  auto* cmd_apply = app.add_subcommand("apply", "apply S or S* to a vector");
  std::string apply_model, apply_density, apply_direction = "forward";
  cmd_apply->add_option("--model", apply_model)->required();
  cmd_apply->add_option("--density", apply_density)->required();
  cmd_apply->add_option("--direction", apply_direction)
      ->check(CLI::IsMember({"forward", "adjoint"}));

  // polar
  auto* cmd_polar = app.add_subcommand("polar", "describe the polar set");
  std::string polar_model;
  cmd_polar->add_option("--model", polar_model)->required();

  // bipolar
  auto* cmd_bipolar =
      app.add_subcommand("bipolar", "decide whether M-bar equals the bipolar");
  std::string bipolar_model, bipolar_mode = "exact";
  int bipolar_directions = 1000;
  std::uint64_t bipolar_seed = 1;
  cmd_bipolar->add_option("--model", bipolar_model)->required();
  cmd_bipolar->add_option("--mode", bipolar_mode)
      ->check(CLI::IsMember({"exact", "randomized"}));
  cmd_bipolar->add_option("--directions", bipolar_directions);
  cmd_bipolar->add_option("--seed", bipolar_seed);

  // factorize
  auto* cmd_factorize =
      app.add_subcommand("factorize", "KL-project a target onto the model");
  std::string factorize_model, factorize_target;
  double factorize_tol = 1e-12, factorize_eps = 1e-6;
  int factorize_max_iter = 200000;
  cmd_factorize->add_option("--model", factorize_model)->required();
  cmd_factorize->add_option("--target", factorize_target)->required();
  cmd_factorize->add_option("--tol", factorize_tol);
  cmd_factorize->add_option("--max-iter", factorize_max_iter);
  cmd_factorize->add_option("--eps", factorize_eps);

  // simulate
  auto* cmd_simulate = app.add_subcommand("simulate", "draw sample batches");
  std::string sim_model, sim_h, sim_g, sim_table, sim_out, sim_mechanism;
  std::string sim_car = "true";
  Eigen::Index sim_n = 0;
  std::uint64_t sim_seed = 1;
  double sim_rate_y = 1.0, sim_rate_c = 1.0;
  cmd_simulate->add_option("--model", sim_model);
  cmd_simulate->add_option("--h", sim_h);
  cmd_simulate->add_option("--g", sim_g);
  cmd_simulate->add_option("--table", sim_table);
  cmd_simulate->add_option("--mechanism", sim_mechanism)
      ->check(CLI::IsMember({"multiplicative"}));
  cmd_simulate->add_option("--car", sim_car)
      ->check(CLI::IsMember({"true", "false"}));
  cmd_simulate->add_option("--n", sim_n)->required();
  cmd_simulate->add_option("--seed", sim_seed);
  cmd_simulate->add_option("--rate-y", sim_rate_y);
  cmd_simulate->add_option("--rate-c", sim_rate_c);
  cmd_simulate->add_option("-o,--output", sim_out)->required();

  // test
  auto* cmd_test = app.add_subcommand("test", "sample-based CAR tests");
  cmd_test->require_subcommand(1);

  auto* t_product = cmd_test->add_subcommand("product-cell");
  std::string tp_model, tp_samples;
  double tp_alpha = 0.05;
  t_product->add_option("--model", tp_model)->required();
  t_product->add_option("--samples", tp_samples)->required();
  t_product->add_option("--alpha", tp_alpha);

  auto* t_delta = cmd_test->add_subcommand("delta-monotone");
  std::string td_model, td_density;
  t_delta->add_option("--model", td_model)->required();
  t_delta->add_option("--density", td_density)->required();

  auto* t_monotone = cmd_test->add_subcommand("monotone-density");
  std::string tm_samples, tm_range = "0:3";
  int tm_bins = 20;
  double tm_alpha = 0.05;
  t_monotone->add_option("--samples", tm_samples)->required();
  t_monotone->add_option("--bins", tm_bins);
  t_monotone->add_option("--range", tm_range);
  t_monotone->add_option("--alpha", tm_alpha);

  auto* t_kl = cmd_test->add_subcommand("kl-compat");
  std::string tk_model, tk_samples;
  int tk_bootstrap = 500;
  double tk_alpha = 0.05;
  std::uint64_t tk_seed = 1;
  t_kl->add_option("--model", tk_model)->required();
  t_kl->add_option("--samples", tk_samples)->required();
  t_kl->add_option("--bootstrap", tk_bootstrap);
  t_kl->add_option("--alpha", tk_alpha);
  t_kl->add_option("--seed", tk_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    Output out;

    if (cmd_validate->parsed()) {
      const car::CoarseningJoint j = car::io::load_model(validate_model);
      const car::OperatorCheck check =
          car::validate_coarsening(j, validate_trials, validate_seed);
      out.doc = car::io::operator_check_to_json(check);
      out.doc["y_size"] = j.y_size();
      out.doc["x_size"] = j.x_size();
      const bool ok = check.s_one_ok && check.s_star_one_ok &&
                      check.positivity_ok && check.max_defect < 1e-12;
      out.doc["ok"] = ok;
      out.exit_code = ok ? 0 : 1;
    } else if (cmd_make->parsed()) {
      car::CoarseningJoint j = [&]() -> car::CoarseningJoint {
        if (make_mechanism == "current-status") {
          return car::current_status(make_grid);
        }
        if (make_mechanism == "right-censored") {
          return car::right_censored(make_grid);
        }
        if (make_mechanism == "missing") {
          return car::missing_data(car::BaseSpace::uniform(make_grid));
        }
        if (make_mechanism == "subset") {
          return car::subset_coarsening(make_grid);
        }
        return car::product_coarsening(car::BaseSpace::uniform(make_grid),
                                       car::BaseSpace::uniform(make_grid));
      }();
      out.doc = car::io::model_to_json(j);
      if (!make_out.empty()) {
        car::io::save_model(j, make_out);
        out.doc = json{{"written", make_out},
                       {"mechanism", make_mechanism},
                       {"y_size", j.y_size()},
                       {"x_size", j.x_size()}};
      }
    } else if (cmd_apply->parsed()) {
      const car::CoarseningJoint j = car::io::load_model(apply_model);
      const car::io::VectorFile file = car::io::load_vector(apply_density);
      if (apply_direction == "forward") {
        const car::Density h = car::io::bind_density(file, j.y_space_ptr());
        const car::Density image = car::apply_S(j, h);
        out.doc = json{{"direction", "forward"},
                       {"result", vector_on_space(j.x_space(), image.values())}};
      } else {
        const Eigen::VectorXd g = car::io::bind_vector(file, j.x_space());
        const Eigen::VectorXd image = car::apply_S_star(j, g);
        out.doc = json{{"direction", "adjoint"},
                       {"result", vector_on_space(j.y_space(), image)}};
      }
    } else if (cmd_polar->parsed()) {
      const car::CoarseningJoint j = car::io::load_model(polar_model);
      out.doc = car::io::polar_to_json(car::polar_M(j));
    } else if (cmd_bipolar->parsed()) {
      const car::CoarseningJoint j = car::io::load_model(bipolar_model);
      car::ExtensionParams params;
      params.directions = bipolar_directions;
      params.seed = bipolar_seed;
      const car::BipolarVerdict verdict =
          car::check_extension(j, bipolar_mode == "exact", params);
      out.doc = car::io::bipolar_to_json(verdict);
      out.exit_code = verdict.equal ? 0 : 2;
    } else if (cmd_factorize->parsed()) {
      const car::CoarseningJoint j = car::io::load_model(factorize_model);
      const car::io::VectorFile file = car::io::load_vector(factorize_target);
      car::Density f = car::io::bind_density(file, j.x_space_ptr());
      double smoothing = 0.0;
      if (f.values().minCoeff() <= 0.0) {
        smoothing = factorize_eps;
        const Eigen::VectorXd smoothed =
            (1.0 - smoothing) * f.values() +
            smoothing * Eigen::VectorXd::Ones(f.size());
        f = car::make_density(smoothed, j.x_space_ptr());
      }
      car::ProjectionOptions opts;
      opts.tol = factorize_tol;
      opts.max_iter = factorize_max_iter;
      car::FactorizationReport report = car::car_factorize(j, f, opts);
      report.smoothing_eps = smoothing;
      out.doc = car::io::factorization_to_json(report);
      out.exit_code = report.verdict ==
                              car::FactorizationReport::Verdict::kCompatible
                          ? 0
                          : 2;
    } else if (cmd_simulate->parsed()) {
      car::SampleBatch batch;
      if (sim_mechanism == "multiplicative") {
        car::GridSpec spec;
        spec.rate_y = sim_rate_y;
        spec.rate_c = sim_rate_c;
        batch = car::multiplicative_sampler(spec, sim_car == "true", sim_n,
                                            sim_seed);
      } else if (!sim_table.empty()) {
        const Eigen::MatrixXd table = load_table(sim_table);
        if (!sim_model.empty()) {
          const car::CoarseningJoint j = car::io::load_model(sim_model);
          if (table.cols() != j.x_size()) {
            throw std::runtime_error(
                "table columns do not match the model outcomes");
          }
        }
        batch = car::sample_joint(table, sim_n, sim_seed);
      } else {
        if (sim_model.empty() || sim_h.empty() || sim_g.empty()) {
          throw std::runtime_error(
              "simulate needs --model/--h/--g, or --table, or --mechanism "
              "multiplicative");
        }
        const car::CoarseningJoint j = car::io::load_model(sim_model);
        const car::Density h =
            car::io::bind_density(car::io::load_vector(sim_h), j.y_space_ptr());
        const Eigen::VectorXd g =
            car::io::bind_vector(car::io::load_vector(sim_g), j.x_space());
        batch = car::sample_car(j, h, g, sim_n, sim_seed);
      }
      car::io::save_samples(batch, sim_out);
      out.doc = json{{"written", sim_out},
                     {"n", batch.n},
                     {"seed", batch.seed},
                     {"kind", batch.is_real() ? "x_value" : "x_index"}};
    } else if (t_product->parsed()) {
      const car::CoarseningJoint j = car::io::load_model(tp_model);
      const car::SampleBatch samples = car::io::load_samples(tp_samples);
      const car::TestReport report = car::product_cell_test(j, samples, tp_alpha);
      out.doc = car::io::test_report_to_json(report);
      out.exit_code = decision_code(report);
    } else if (t_delta->parsed()) {
      const car::CoarseningJoint j = car::io::load_model(td_model);
      const car::Density p = car::io::bind_density(
          car::io::load_vector(td_density), j.x_space_ptr());
      const auto [is_member, max_violation] = car::delta_monotone_check(j, p);
      out.doc = json{{"name", "delta-monotone"},
                     {"is_member", is_member},
                     {"max_violation", max_violation}};
      out.exit_code = is_member ? 0 : 2;
    } else if (t_monotone->parsed()) {
      const car::SampleBatch samples = car::io::load_samples(tm_samples);
      const auto [lo, hi] = parse_range(tm_range);
      const car::TestReport report =
          car::monotone_density_test(samples, tm_bins, lo, hi, tm_alpha);
      out.doc = car::io::test_report_to_json(report);
      out.exit_code = decision_code(report);
    } else if (t_kl->parsed()) {
      const car::CoarseningJoint j = car::io::load_model(tk_model);
      const car::SampleBatch samples = car::io::load_samples(tk_samples);
      car::KlCompatOptions opts;
      opts.bootstrap = tk_bootstrap;
      opts.alpha = tk_alpha;
      opts.seed = tk_seed;
      const car::TestReport report = car::kl_compat_test(j, samples, opts);
      out.doc = car::io::test_report_to_json(report);
      out.exit_code = decision_code(report);
    }

    emit(out.doc, pretty);
    return out.exit_code;
  } catch (const std::exception& e) {
    emit(json{{"error", json{{"message", e.what()}}}}, pretty);
    return 1;
  }
}

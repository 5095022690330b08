#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "car/io.hpp"
#include "car/mechanisms.hpp"
#include "car/polar.hpp"
#include "car/random.hpp"

using namespace car;
using nlohmann::json;

namespace {

std::filesystem::path tmp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "car_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("model files round-trip bit-stably") {
  const auto path = (tmp_dir() / "model.json").string();
  const CoarseningJoint j = current_status(5);
  io::save_model(j, path);
  const CoarseningJoint back = io::load_model(path);
  CHECK((back.table() - j.table()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(back.y_space().labels() == j.y_space().labels());
  CHECK(back.x_space().labels() == j.x_space().labels());
}

TEST_CASE("stated marginals must match the table") {
  const auto path = (tmp_dir() / "tampered.json").string();
  json doc = io::model_to_json(subset_coarsening(2));
  doc["p0"][0] = doc["p0"][0].get<double>() + 1e-3;
  std::ofstream(path) << doc.dump();
  CHECK_THROWS(io::load_model(path));
}

TEST_CASE("vector files bind against a model space") {
  const CoarseningJoint j = missing_data(BaseSpace::uniform(2));
  const auto path = (tmp_dir() / "density.json").string();
  const Density d = sample_density(j.x_space_ptr(), 3);
  io::save_density(d, path);

  const io::VectorFile file = io::load_vector(path);
  const Density bound = io::bind_density(file, j.x_space_ptr());
  CHECK((bound.values() - d.values()).cwiseAbs().maxCoeff() == 0.0);

  // Positional matching applies when labels are absent.
  json doc;
  doc["weights"] = json::array({0.25, 0.25, 0.5});
  doc["values"] = json::array({1.0, 1.0, 1.0});
  const auto nolabel = (tmp_dir() / "nolabel.json").string();
  std::ofstream(nolabel) << doc.dump();
  CHECK_NOTHROW(io::bind_density(io::load_vector(nolabel), j.x_space_ptr()));

  // Wrong labels or wrong weights are rejected.
  json wrong = doc;
  wrong["labels"] = json::array({"a", "b", "c"});
  std::ofstream(path) << wrong.dump();
  CHECK_THROWS(io::bind_density(io::load_vector(path), j.x_space_ptr()));

  json heavy = doc;
  heavy["weights"] = json::array({0.3, 0.2, 0.5});
  std::ofstream(path) << heavy.dump();
  CHECK_THROWS(io::bind_density(io::load_vector(path), j.x_space_ptr()));
}

TEST_CASE("sample CSV round-trips both record kinds") {
  const auto path = (tmp_dir() / "samples.csv").string();

  SampleBatch finite;
  finite.n = 4;
  finite.indices = {0, 2, 2, 1};
  io::save_samples(finite, path);
  const SampleBatch finite_back = io::load_samples(path);
  CHECK(finite_back.indices == finite.indices);
  CHECK_FALSE(finite_back.is_real());

  SampleBatch real;
  real.n = 3;
  real.values = {0.25, 1.0 / 3.0, 2.7182818284590452};
  io::save_samples(real, path);
  const SampleBatch real_back = io::load_samples(path);
  REQUIRE(real_back.values.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(real_back.values[i] == real.values[i]);

  std::ofstream(path) << "wrong_header\n1\n";
  CHECK_THROWS(io::load_samples(path));
}

TEST_CASE("report serializers emit the contract fields") {
  const CoarseningJoint j = current_status(3);

  const json polar = io::polar_to_json(polar_M(j));
  CHECK(polar.contains("affine_dim_m_polar"));
  CHECK(polar.contains("span_basis"));
  CHECK(polar.contains("interior_point"));

  const Density one(j.x_space_ptr(), Eigen::VectorXd::Ones(j.x_size()));
  const json inside = io::membership_to_json(membership_M(j, one));
  CHECK(inside["verdict"] == "inside");
  CHECK(inside.contains("witness_h"));
  CHECK_FALSE(inside.contains("separator"));

  const json verdict = io::bipolar_to_json(check_extension(j, true));
  CHECK(verdict["equal"] == false);
  CHECK(verdict.contains("witness"));
  CHECK(verdict.contains("kl_gap"));
  CHECK(verdict["mode"] == "exact");
}

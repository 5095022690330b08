#include "car/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace car::io {

namespace {

using nlohmann::json;

constexpr double kMarginalTol = 1e-9;

json open_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json doc;
  in >> doc;
  return doc;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

Eigen::VectorXd vector_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) {
    throw std::runtime_error(std::string(what) + " must be an array");
  }
  Eigen::VectorXd v(arr.size());
  Eigen::Index i = 0;
  for (const auto& entry : arr) v[i++] = entry.get<double>();
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

std::vector<std::string> labels_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) {
    throw std::runtime_error(std::string(what) + " must be an array");
  }
  std::vector<std::string> labels;
  labels.reserve(arr.size());
  for (const auto& entry : arr) labels.push_back(entry.get<std::string>());
  return labels;
}

}  // namespace

CoarseningJoint model_from_json(const json& doc) {
  const auto y_labels = labels_from_json(doc.at("y_labels"), "y_labels");
  const auto x_labels = labels_from_json(doc.at("x_labels"), "x_labels");
  const auto& rows = doc.at("joint");
  if (!rows.is_array() || rows.size() != y_labels.size()) {
    throw std::runtime_error("joint must have one row per Y label");
  }
  Eigen::MatrixXd table(static_cast<Eigen::Index>(y_labels.size()),
                        static_cast<Eigen::Index>(x_labels.size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    const Eigen::VectorXd values = vector_from_json(row, "joint row");
    if (values.size() != table.cols()) {
      throw std::runtime_error("joint row length does not match x_labels");
    }
    table.row(r++) = values.transpose();
  }
  CoarseningJoint j = build_joint(std::move(table), y_labels, x_labels);
  if (doc.contains("q0")) {
    const Eigen::VectorXd q0 = vector_from_json(doc.at("q0"), "q0");
    if (q0.size() != j.y_size() ||
        (q0 - j.y_space().weights()).cwiseAbs().maxCoeff() > kMarginalTol) {
      throw std::runtime_error("q0 does not match the computed row sums");
    }
  }
  if (doc.contains("p0")) {
    const Eigen::VectorXd p0 = vector_from_json(doc.at("p0"), "p0");
    if (p0.size() != j.x_size() ||
        (p0 - j.x_space().weights()).cwiseAbs().maxCoeff() > kMarginalTol) {
      throw std::runtime_error("p0 does not match the computed column sums");
    }
  }
  return j;
}

CoarseningJoint load_model(const std::string& path) {
  return model_from_json(open_json(path));
}

json model_to_json(const CoarseningJoint& j) {
  json doc;
  doc["y_labels"] = j.y_space().labels();
  doc["x_labels"] = j.x_space().labels();
  json rows = json::array();
  for (Eigen::Index r = 0; r < j.y_size(); ++r) {
    rows.push_back(vector_to_json(j.table().row(r).transpose()));
  }
  doc["joint"] = std::move(rows);
  doc["q0"] = vector_to_json(j.y_space().weights());
  doc["p0"] = vector_to_json(j.x_space().weights());
  return doc;
}

void save_model(const CoarseningJoint& j, const std::string& path) {
  write_text(path, model_to_json(j).dump(2) + "\n");
}

VectorFile load_vector(const std::string& path) {
  const json doc = open_json(path);
  VectorFile file;
  if (doc.contains("labels")) {
    file.labels = labels_from_json(doc.at("labels"), "labels");
  }
  file.weights = vector_from_json(doc.at("weights"), "weights");
  file.values = vector_from_json(doc.at("values"), "values");
  if (file.weights.size() != file.values.size()) {
    throw std::runtime_error("weights/values length mismatch");
  }
  if (file.labels &&
      static_cast<Eigen::Index>(file.labels->size()) != file.values.size()) {
    throw std::runtime_error("labels/values length mismatch");
  }
  return file;
}

Eigen::VectorXd bind_vector(const VectorFile& file, const BaseSpace& space) {
  if (file.values.size() != space.size()) {
    throw std::runtime_error("vector length does not match the model space");
  }
  if (file.labels && *file.labels != space.labels()) {
    throw std::runtime_error("vector labels do not match the model space");
  }
  if ((file.weights - space.weights()).cwiseAbs().maxCoeff() > kMarginalTol) {
    throw std::runtime_error("vector weights do not match the model space");
  }
  return file.values;
}

Density bind_density(const VectorFile& file, const BaseSpacePtr& space) {
  return Density(space, bind_vector(file, *space));
}

json density_to_json(const Density& d) {
  json doc;
  doc["labels"] = d.space().labels();
  doc["weights"] = vector_to_json(d.space().weights());
  doc["values"] = vector_to_json(d.values());
  return doc;
}

void save_density(const Density& d, const std::string& path) {
  write_text(path, density_to_json(d).dump(2) + "\n");
}

SampleBatch load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("samples file is empty: " + path);
  }
  while (!header.empty() &&
         (header.back() == '\r' || header.back() == '\n')) {
    header.pop_back();
  }
  SampleBatch batch;
  const bool real_valued = header == "x_value";
  if (!real_valued && header != "x_index") {
    throw std::runtime_error("samples header must be x_index or x_value");
  }
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.pop_back();
    }
    if (line.empty()) continue;
    if (real_valued) {
      batch.values.push_back(std::stod(line));
    } else {
      batch.indices.push_back(static_cast<Eigen::Index>(std::stoll(line)));
    }
  }
  batch.n = static_cast<Eigen::Index>(real_valued ? batch.values.size()
                                                  : batch.indices.size());
  return batch;
}

void save_samples(const SampleBatch& batch, const std::string& path) {
  std::ostringstream out;
  if (batch.is_real()) {
    out << "x_value\n";
    json probe;  // reuse the JSON float printer for lossless round trips
    for (double v : batch.values) {
      probe = v;
      out << probe.dump() << "\n";
    }
  } else {
    out << "x_index\n";
    for (Eigen::Index idx : batch.indices) out << idx << "\n";
  }
  write_text(path, out.str());
}

json operator_check_to_json(const OperatorCheck& check) {
  return json{{"s_one_ok", check.s_one_ok},
              {"s_star_one_ok", check.s_star_one_ok},
              {"positivity_ok", check.positivity_ok},
              {"norm_estimate", check.norm_estimate},
              {"max_defect", check.max_defect}};
}

json polar_to_json(const PolarDescription& desc) {
  json doc;
  doc["affine_dim_m_polar"] = desc.affine_dim_m_polar;
  doc["span_dim"] = desc.span_basis.cols();
  doc["feasible"] = desc.feasible;
  if (desc.interior_point) {
    doc["interior_point"] = vector_to_json(*desc.interior_point);
  } else {
    doc["interior_point"] = nullptr;
  }
  json basis = json::array();
  for (Eigen::Index c = 0; c < desc.span_basis.cols(); ++c) {
    basis.push_back(vector_to_json(desc.span_basis.col(c)));
  }
  doc["span_basis"] = std::move(basis);
  return doc;
}

json membership_to_json(const MembershipCert& cert) {
  json doc;
  doc["verdict"] =
      cert.verdict == MembershipCert::Verdict::kInside ? "inside" : "outside";
  doc["tolerance"] = cert.tolerance;
  if (cert.witness_h) {
    doc["witness_h"] = vector_to_json(cert.witness_h->values());
    doc["defect"] = cert.defect;
  }
  if (cert.separator) {
    doc["separator"] = json{{"phi", vector_to_json(cert.separator->phi)},
                            {"offset", cert.separator->offset},
                            {"margin", cert.separator->margin}};
  }
  return doc;
}

json bipolar_to_json(const BipolarVerdict& verdict) {
  json doc;
  doc["equal"] = verdict.equal;
  doc["mode"] = verdict.mode;
  doc["membership_tol"] = verdict.membership_tol;
  doc["note"] = verdict.note;
  if (verdict.mode == "exact") {
    doc["vertices_checked"] = verdict.vertices_checked;
  } else {
    doc["directions"] = verdict.directions;
    doc["seed"] = verdict.seed;
  }
  if (verdict.witness) {
    doc["witness"] = vector_to_json(verdict.witness->values());
  }
  if (verdict.kl_gap) doc["kl_gap"] = *verdict.kl_gap;
  return doc;
}

json factorization_to_json(const FactorizationReport& report) {
  json doc;
  doc["verdict"] =
      report.verdict == FactorizationReport::Verdict::kCompatible
          ? "compatible"
          : "projection_residual";
  doc["h_star"] = vector_to_json(report.h_star.values());
  doc["k_star"] = vector_to_json(report.k_star.values());
  doc["g_star"] = vector_to_json(report.g_star);
  doc["kl_value"] = report.kl_value;
  doc["slack"] = vector_to_json(report.slack);
  doc["iterations"] = report.iterations;
  doc["converged"] = report.converged;
  doc["slack_tol"] = report.slack_tol;
  doc["smoothing_eps"] = report.smoothing_eps;
  return doc;
}

json test_report_to_json(const TestReport& report) {
  json doc;
  doc["name"] = report.name;
  doc["statistic"] = report.statistic;
  doc["threshold"] = report.threshold;
  doc["decision"] = report.decision == TestReport::Decision::kRejectCar
                        ? "reject_CAR"
                        : "no_evidence";
  doc["n"] = report.n;
  doc["alpha"] = report.alpha;
  if (report.calibration == TestReport::CalibrationKind::kBootstrap) {
    doc["calibration"] = json{{"kind", "bootstrap"},
                              {"B", report.bootstrap_b},
                              {"seed", report.seed}};
  } else {
    doc["calibration"] = json{{"kind", "closed_form"}};
  }
  if (report.name == "product-cell") {
    doc["a1"] = report.a1;
    doc["a2"] = report.a2;
  }
  if (report.name == "kl-compat") doc["kl_value"] = report.kl_value;
  if (report.bin_counts.size() > 0) {
    doc["bin_counts"] = vector_to_json(report.bin_counts);
  }
  return doc;
}

}  // namespace car::io

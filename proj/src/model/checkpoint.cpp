#include "ccasgnn/model/checkpoint.hpp"

#include <fstream>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::model {
using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw DataError("matrix entry count does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

namespace {

json row_json(const Eigen::RowVectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::RowVectorXd row_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::RowVectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

json checkpoint_json(const Model& model) {
  json params = json::object();
  for (const auto& [name, m] : model.params.tensors) params[name] = matrix_json(m);
  return {
      {"format", kCheckpointFormat},
      {"config", to_json(model.config)},
      {"params", std::move(params)},
      {"normalizer", {{"mean", row_json(model.normalizer.mean)}, {"scale", row_json(model.normalizer.scale)}}},
  };
}

Model model_from_checkpoint(const json& j) {
  try {
    const int format = j.at("format").get<int>();
    if (format != kCheckpointFormat) {
      throw DataError("unsupported checkpoint format " + std::to_string(format));
    }
    Model model;
    model.config = model_config_from_json(j.at("config"));
    for (const auto& [name, m] : j.at("params").items()) {
      model.params.tensors.emplace(name, matrix_from_json(m));
    }
    if (j.contains("normalizer")) {
      model.normalizer.mean = row_from_json(j.at("normalizer").at("mean"));
      model.normalizer.scale = row_from_json(j.at("normalizer").at("scale"));
    } else {
      model.normalizer = data::FeatureNormalizer::identity(model.config.feature_dim);
    }
    const ModelParams expected = init_params(model.config, 0);
    for (const auto& [name, m] : expected.tensors) {
      if (!model.params.contains(name)) throw DataError("checkpoint lacks parameter " + name);
      const auto& got = model.params.at(name);
      if (got.rows() != m.rows() || got.cols() != m.cols()) {
        throw DataError("checkpoint parameter " + name + " has shape " + numcore::shape_string(got) +
                        ", config implies " + numcore::shape_string(m));
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << checkpoint_json(model).dump() << '\n';
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  return model_from_checkpoint(j);
}

}  // namespace ccasgnn::model

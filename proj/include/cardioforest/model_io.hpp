#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cardioforest/dataio.hpp"
#include "cardioforest/ensemble.hpp"
#include "cardioforest/features.hpp"

#include <json.hpp>

namespace cardio {

// Fitted preprocessing carried inside the model file. The imputer's fitted
// columns define the raw input features and their order; kept_columns index
// into that list after standardization.
struct Preprocess {
  std::optional<ImputerState> imputer;
  std::optional<StandardizerState> standardizer;
  std::optional<PcaState> pca;
  std::vector<std::size_t> kept_columns;

  std::vector<std::string> input_feature_names() const {
    return imputer ? imputer->fitted_columns : std::vector<std::string>{};
  }
};

// Fills missing cells with stored medians, standardizes, selects the kept
// columns, and optionally projects through the PCA state.
Matrix apply_preprocess(const Preprocess& pp, const Dataset& ds);

struct ModelFile {
  int format_version = 1;
  std::string model_type;  // cardioforest | gbm | xgb | lgbm
  std::vector<std::string> feature_names;  // names the trees consume
  std::optional<ForestModel> forest;
  std::optional<BoostedModel> boosted;
  Preprocess preprocess;
};

nlohmann::json model_to_json(const ModelFile& mf);
ModelFile model_from_json(const nlohmann::json& j);

void save_model_file(const ModelFile& mf, const std::string& path);
ModelFile load_model_file(const std::string& path);

}  // namespace cardio

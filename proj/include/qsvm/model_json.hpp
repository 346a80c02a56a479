#pragma once

#include <json.hpp>

#include "qsvm/svm.hpp"

namespace qsvm {

nlohmann::ordered_json model_to_json(const BinarySvmModel& model);
BinarySvmModel model_from_json(const nlohmann::json& j);

}  // namespace qsvm

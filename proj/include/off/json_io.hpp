#ifndef OFF_JSON_IO_HPP
#define OFF_JSON_IO_HPP

#include "off/dataset.hpp"
#include "off/glm.hpp"
#include "off/metrics.hpp"
#include "off/models.hpp"
#include "off/synthetic.hpp"

#include <json.hpp>

#include <variant>

namespace off {

void to_json(nlohmann::json& j, const Schema& s);
void from_json(const nlohmann::json& j, Schema& s);

void to_json(nlohmann::json& j, const LogisticParams& p);
void from_json(const nlohmann::json& j, LogisticParams& p);

void to_json(nlohmann::json& j, const FitConfig& c);
void from_json(const nlohmann::json& j, FitConfig& c);

void to_json(nlohmann::json& j, const InjectionSpec& s);
void from_json(const nlohmann::json& j, InjectionSpec& s);

using AnyModel = std::variant<MultiModel, OffLrModel, NbOffModel, CspModel, BaseModel, ImputedModel>;

// Every model carries a "model_type" tag and an echo of its schema.
nlohmann::json model_to_json(const AnyModel& model);
AnyModel model_from_json(const nlohmann::json& j);
Vector predict_any(const AnyModel& model, const LabeledDataset& ds);
int fit_count_of(const AnyModel& model);

namespace metrics {
void to_json(nlohmann::json& j, const EvalReport& r);
}

namespace synthetic {
void to_json(nlohmann::json& j, const FamilyParams& p);
void from_json(const nlohmann::json& j, FamilyParams& p);
} // namespace synthetic

} // namespace off

#endif // OFF_JSON_IO_HPP

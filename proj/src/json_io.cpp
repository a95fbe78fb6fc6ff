#include "off/json_io.hpp"

#include "off/error.hpp"

namespace off {

using nlohmann::json;

namespace {

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const json& j)
{
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

json matrix_json(const Matrix& m)
{
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        rows.push_back(vector_json(m.row(i).transpose()));
    }
    return rows;
}

Matrix matrix_from(const json& j, Index cols)
{
    Matrix m(static_cast<Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Vector row = vector_from(j[i]);
        if (row.size() != cols) {
            throw Error(ErrorCode::DimensionMismatch, "ragged matrix in JSON");
        }
        m.row(static_cast<Index>(i)) = row.transpose();
    }
    return m;
}

json submodel_json(const Submodel& m)
{
    if (const auto* p = std::get_if<LogisticParams>(&m)) {
        json j = *p;
        j["kind"] = "logistic";
        return j;
    }
    const auto& g = std::get<GroupMeanModel>(m);
    json groups = json::array();
    for (const auto& [key, group] : g.groups()) {
        groups.push_back({{"key", key}, {"weight", group.weight}, {"positive", group.positive}});
    }
    return {{"kind", "group_mean"}, {"dim", g.dim()}, {"groups", groups}};
}

Submodel submodel_from(const json& j)
{
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "logistic") {
        return j.get<LogisticParams>();
    }
    if (kind == "group_mean") {
        std::map<std::vector<double>, GroupMeanModel::Group> groups;
        for (const auto& g : j.at("groups")) {
            groups[g.at("key").get<std::vector<double>>()] =
                GroupMeanModel::Group{g.at("weight").get<double>(), g.at("positive").get<double>()};
        }
        return GroupMeanModel::from_groups(j.at("dim").get<Index>(), std::move(groups));
    }
    throw Error(ErrorCode::InvalidArgument, "unknown submodel kind '" + kind + "'");
}

std::string kind_name(SubmodelKind k) { return k == SubmodelKind::logistic ? "logistic" : "group_mean"; }

} // namespace

void to_json(json& j, const Schema& s)
{
    j = json{{"base", s.base_names}, {"optional", s.optional_names}, {"label", s.label_name}};
}

void from_json(const json& j, Schema& s)
{
    s.base_names = j.value("base", std::vector<std::string>{});
    s.optional_names = j.value("optional", std::vector<std::string>{});
    s.label_name = j.at("label").get<std::string>();
    s.validate();
}

void to_json(json& j, const LogisticParams& p) { j = json{{"weights", vector_json(p.weights)}, {"intercept", p.intercept}}; }

void from_json(const json& j, LogisticParams& p)
{
    p.weights = vector_from(j.at("weights"));
    p.intercept = j.at("intercept").get<double>();
}

void to_json(json& j, const FitConfig& c)
{
    j = json{{"l2_penalty", c.l2_penalty}, {"max_iters", c.max_iters}, {"grad_tol", c.grad_tol}};
}

void from_json(const json& j, FitConfig& c)
{
    const FitConfig defaults;
    c.l2_penalty = j.value("l2_penalty", defaults.l2_penalty);
    c.max_iters = j.value("max_iters", defaults.max_iters);
    c.grad_tol = j.value("grad_tol", defaults.grad_tol);
    c.validate();
}

void to_json(json& j, const InjectionSpec& s)
{
    j = json::array();
    for (const auto& f : s.features) {
        json item{{"feature", f.feature}, {"slope", f.slope}};
        if (f.center) {
            item["center"] = *f.center;
        }
        j.push_back(item);
    }
}

void from_json(const json& j, InjectionSpec& s)
{
    s.features.clear();
    for (const auto& item : j) {
        FeatureInjection f;
        f.feature = item.at("feature").get<std::string>();
        f.slope = item.at("slope").get<double>();
        if (item.contains("center") && !item.at("center").is_null()) {
            f.center = item.at("center").get<double>();
        }
        s.features.push_back(std::move(f));
    }
}

json model_to_json(const AnyModel& model)
{
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, MultiModel>) {
                json subs = json::object();
                for (const auto& [key, entry] : m.entries()) {
                    json e = submodel_json(entry.model);
                    e["source"] = entry.source.to_bitstring(m.schema().r());
                    subs[key.to_bitstring(m.schema().r())] = e;
                }
                return {{"model_type", "multi"}, {"schema", m.schema()}, {"submodel_kind", kind_name(m.kind())},
                        {"fit_count", m.fit_count()}, {"submodels", subs}};
            } else if constexpr (std::is_same_v<T, OffLrModel>) {
                return {{"model_type", "off_lr"}, {"schema", m.schema}, {"w", vector_json(m.w)}, {"t", m.t},
                        {"omega", matrix_json(m.omega)}, {"beta", vector_json(m.beta)}, {"s", vector_json(m.s)},
                        {"fit_count", m.fit_count}};
            } else if constexpr (std::is_same_v<T, NbOffModel>) {
                return {{"model_type", "nb_off"}, {"schema", m.schema}, {"prior_log_odds", m.prior_log_odds},
                        {"base_log_ratio", matrix_json(m.base_log_ratio)},
                        {"optional_log_ratio", matrix_json(m.optional_log_ratio)}};
            } else if constexpr (std::is_same_v<T, CspModel>) {
                return {{"model_type", "csp"}, {"schema", m.schema}, {"provider_base", submodel_json(m.provider_base)},
                        {"provider_full", submodel_json(m.provider_full)}};
            } else if constexpr (std::is_same_v<T, BaseModel>) {
                return {{"model_type", "base"}, {"schema", m.schema}, {"model", submodel_json(m.model)}};
            } else {
                return {{"model_type", "imputed"}, {"schema", m.schema}, {"params", m.params},
                        {"add_indicator", m.add_indicator}};
            }
        },
        model);
}

AnyModel model_from_json(const json& j)
{
    const auto type = j.at("model_type").get<std::string>();
    const auto schema = j.at("schema").get<Schema>();
    if (type == "multi") {
        std::map<SubsetKey, MultiModel::Entry> entries;
        for (const auto& [bits, e] : j.at("submodels").items()) {
            entries.emplace(SubsetKey::from_bitstring(bits),
                            MultiModel::Entry{SubsetKey::from_bitstring(e.at("source").get<std::string>()),
                                              submodel_from(e)});
        }
        const auto kind = j.at("submodel_kind").get<std::string>() == "logistic" ? SubmodelKind::logistic
                                                                                  : SubmodelKind::group_mean;
        return MultiModel(schema, kind, std::move(entries), j.value("fit_count", 0));
    }
    if (type == "off_lr") {
        OffLrModel m;
        m.schema = schema;
        m.w = vector_from(j.at("w"));
        m.t = j.at("t").get<double>();
        m.omega = matrix_from(j.at("omega"), m.w.size());
        m.beta = vector_from(j.at("beta"));
        m.s = vector_from(j.at("s"));
        m.fit_count = j.value("fit_count", 0);
        if (m.w.size() != schema.n() || m.beta.size() != schema.r() || m.s.size() != schema.r() ||
            m.omega.rows() != schema.r()) {
            throw Error(ErrorCode::DimensionMismatch, "OFF-LR parameters do not match schema");
        }
        return m;
    }
    if (type == "nb_off") {
        NbOffModel m;
        m.schema = schema;
        m.prior_log_odds = j.at("prior_log_odds").get<double>();
        m.base_log_ratio = matrix_from(j.at("base_log_ratio"), 2);
        m.optional_log_ratio = matrix_from(j.at("optional_log_ratio"), 2);
        return m;
    }
    if (type == "csp") {
        return CspModel{schema, submodel_from(j.at("provider_base")), submodel_from(j.at("provider_full"))};
    }
    if (type == "base") {
        return BaseModel{schema, submodel_from(j.at("model"))};
    }
    if (type == "imputed") {
        return ImputedModel{schema, j.at("params").get<LogisticParams>(), j.at("add_indicator").get<bool>()};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model_type '" + type + "'");
}

Vector predict_any(const AnyModel& model, const LabeledDataset& ds)
{
    return std::visit([&](const auto& m) { return m.predict(ds); }, model);
}

int fit_count_of(const AnyModel& model)
{
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, MultiModel>) {
                return m.fit_count();
            } else if constexpr (std::is_same_v<T, OffLrModel>) {
                return m.fit_count;
            } else if constexpr (std::is_same_v<T, CspModel>) {
                return 2;
            } else {
                return 1;
            }
        },
        model);
}

void metrics::to_json(json& j, const EvalReport& r)
{
    j = json::object();
    for (const auto& [name, m] : r.metrics) {
        json item{{"value", m.value}, {"count", m.count}};
        if (m.std_error) {
            item["std_error"] = *m.std_error;
        }
        j[name] = item;
    }
}

void synthetic::to_json(json& j, const FamilyParams& p)
{
    j = json{{"w", vector_json(p.w)},          {"t", p.t},
             {"base_cov_scale", p.base_cov_scale}, {"u", matrix_json(p.u)},
             {"lambda", vector_json(p.lambda)}, {"v", matrix_json(p.v)},
             {"tau0", vector_json(p.tau0)},     {"tau1", vector_json(p.tau1)},
             {"eta", p.eta}};
}

void synthetic::from_json(const json& j, FamilyParams& p)
{
    p.w = vector_from(j.at("w"));
    p.t = j.value("t", 0.0);
    p.base_cov_scale = j.value("base_cov_scale", 1.0);
    p.u = matrix_from(j.at("u"), p.w.size());
    p.lambda = vector_from(j.at("lambda"));
    p.v = matrix_from(j.at("v"), p.w.size());
    p.tau0 = vector_from(j.at("tau0"));
    p.tau1 = vector_from(j.at("tau1"));
    p.eta = j.value("eta", 1.0);
    p.validate();
}

} // namespace off

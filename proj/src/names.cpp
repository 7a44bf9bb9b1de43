#include "driftflow/names.hpp"

namespace driftflow {

const char* method_str(Method m) {
    switch (m) {
        case Method::dfm: return "dfm";
        case Method::flow_matching: return "flow_matching";
        case Method::drift_model: return "drift_model";
    }
    return "?";
}

std::optional<Method> method_from_str(const std::string& s) {
    if (s == "dfm") return Method::dfm;
    if (s == "flow_matching") return Method::flow_matching;
    if (s == "drift_model") return Method::drift_model;
    return std::nullopt;
}

const char* cost_kind_str(CostKind k) {
    switch (k) {
        case CostKind::sq_euclid_half: return "sq_euclid_half";
        case CostKind::euclid: return "euclid";
    }
    return "?";
}

std::optional<CostKind> cost_kind_from_str(const std::string& s) {
    if (s == "sq_euclid_half") return CostKind::sq_euclid_half;
    if (s == "euclid") return CostKind::euclid;
    return std::nullopt;
}

const char* time_sampler_kind_str(TimeSamplerSpec::Kind k) {
    switch (k) {
        case TimeSamplerSpec::Kind::uniform: return "uniform";
        case TimeSamplerSpec::Kind::lognorm: return "lognorm";
    }
    return "?";
}

std::optional<TimeSamplerSpec::Kind> time_sampler_kind_from_str(const std::string& s) {
    if (s == "uniform") return TimeSamplerSpec::Kind::uniform;
    if (s == "lognorm") return TimeSamplerSpec::Kind::lognorm;
    return std::nullopt;
}

const char* embed_mode_str(TimeEmbedSpec::Mode m) {
    switch (m) {
        case TimeEmbedSpec::Mode::t_r: return "t_r";
        case TimeEmbedSpec::Mode::t_dt: return "t_dt";
        case TimeEmbedSpec::Mode::t_r_dt: return "t_r_dt";
    }
    return "?";
}

std::optional<TimeEmbedSpec::Mode> embed_mode_from_str(const std::string& s) {
    if (s == "t_r") return TimeEmbedSpec::Mode::t_r;
    if (s == "t_dt") return TimeEmbedSpec::Mode::t_dt;
    if (s == "t_r_dt") return TimeEmbedSpec::Mode::t_r_dt;
    return std::nullopt;
}

const char* parameterization_str(Parameterization p) {
    switch (p) {
        case Parameterization::mean_velocity: return "mean_velocity";
        case Parameterization::direct_state: return "direct_state";
    }
    return "?";
}

std::optional<Parameterization> parameterization_from_str(const std::string& s) {
    if (s == "mean_velocity") return Parameterization::mean_velocity;
    if (s == "direct_state") return Parameterization::direct_state;
    return std::nullopt;
}

std::optional<DatasetName> dataset_name_from_str(const std::string& s) {
    for (DatasetName n : {DatasetName::letter_f, DatasetName::letter_m,
                          DatasetName::two_moons, DatasetName::checkerboard,
                          DatasetName::gaussian_iso})
        if (s == dataset_name_str(n)) return n;
    return std::nullopt;
}

std::optional<SourceKind> source_kind_from_str(const std::string& s) {
    for (SourceKind k : {SourceKind::circle_uniform, SourceKind::gaussian_iso})
        if (s == source_kind_str(k)) return k;
    return std::nullopt;
}

} // namespace driftflow

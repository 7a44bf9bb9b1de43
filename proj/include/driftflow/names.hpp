#pragma once

#include "driftflow/kernelops.hpp"
#include "driftflow/netcore.hpp"
#include "driftflow/synthdata.hpp"
#include "driftflow/timepath.hpp"
#include "driftflow/trainer.hpp"

#include <optional>
#include <string>

namespace driftflow {

// Canonical string forms of the enum-valued settings, shared by the config
// parser, the checkpoint header, and the CLI. The from-string parsers return
// nullopt on unknown input so callers choose the error type.

const char* method_str(Method m);
std::optional<Method> method_from_str(const std::string& s);

const char* cost_kind_str(CostKind k);
std::optional<CostKind> cost_kind_from_str(const std::string& s);

const char* time_sampler_kind_str(TimeSamplerSpec::Kind k);
std::optional<TimeSamplerSpec::Kind> time_sampler_kind_from_str(const std::string& s);

const char* embed_mode_str(TimeEmbedSpec::Mode m);
std::optional<TimeEmbedSpec::Mode> embed_mode_from_str(const std::string& s);

const char* parameterization_str(Parameterization p);
std::optional<Parameterization> parameterization_from_str(const std::string& s);

std::optional<DatasetName> dataset_name_from_str(const std::string& s);
std::optional<SourceKind> source_kind_from_str(const std::string& s);

} // namespace driftflow

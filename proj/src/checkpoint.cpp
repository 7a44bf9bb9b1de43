#include "driftflow/checkpoint.hpp"

#include "driftflow/errors.hpp"
#include "driftflow/names.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>

namespace driftflow {

using nlohmann::json;

namespace {

void write_le_double(std::ofstream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(buf, 8);
}

double read_le_double(std::ifstream& in) {
    char buf[8];
    in.read(buf, 8);
    if (in.gcount() != 8) throw io_error("checkpoint: truncated parameter data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return std::bit_cast<double>(bits);
}

} // namespace

void save_checkpoint(const std::string& path, const TransportNet& net,
                     const CheckpointMeta& meta) {
    json header;
    header["format"] = "driftflow-checkpoint";
    header["version"] = 1;
    header["widths"] = {net.input_dim(), net.hidden, net.hidden, net.data_dim};
    header["data_dim"] = net.data_dim;
    header["hidden"] = net.hidden;
    header["class_count"] = net.class_count;
    header["embed"] = {{"mode", embed_mode_str(net.embed.mode)},
                       {"fourier_features", net.embed.fourier_features},
                       {"base_freq", net.embed.base_freq}};
    header["parameterization"] = parameterization_str(net.parameterization);
    header["step"] = meta.step;
    if (meta.method) header["method"] = method_str(*meta.method);
    header["param_count"] = net.param_count();
    if (meta.source) {
        header["source"] = {{"kind", source_kind_str(meta.source->kind)},
                            {"radius_or_std", meta.source->radius_or_std}};
    }
    if (meta.dataset) {
        header["dataset"] = {{"name", dataset_name_str(meta.dataset->name)},
                             {"scale", meta.dataset->scale},
                             {"noise_std", meta.dataset->noise_std},
                             {"class_count", meta.dataset->class_count}};
    }
    if (!meta.config_hash.empty()) header["config_hash"] = meta.config_hash;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << header.dump() << "\n";
    for (long i = 0; i < net.params.size(); ++i) write_le_double(out, net.params(i));
    if (!out) throw io_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw io_error("checkpoint: missing header line");

    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw io_error(std::string("checkpoint: bad header json: ") + e.what());
    }

    Checkpoint ckpt;
    try {
        if (header.at("format") != "driftflow-checkpoint")
            throw io_error("checkpoint: unrecognized format tag");
        TransportNet& net = ckpt.net;
        net.data_dim = header.at("data_dim").get<int>();
        net.hidden = header.at("hidden").get<int>();
        net.class_count = header.value("class_count", 0);
        const json& e = header.at("embed");
        const std::string mode = e.at("mode").get<std::string>();
        if (auto m = embed_mode_from_str(mode))
            net.embed.mode = *m;
        else
            throw io_error("checkpoint: unknown embed mode '" + mode + "'");
        net.embed.fourier_features = e.at("fourier_features").get<int>();
        net.embed.base_freq = e.at("base_freq").get<double>();
        const std::string par = header.at("parameterization").get<std::string>();
        if (auto p = parameterization_from_str(par))
            net.parameterization = *p;
        else
            throw io_error("checkpoint: unknown parameterization '" + par + "'");

        ckpt.meta.step = header.at("step").get<long>();
        if (header.contains("method")) {
            const std::string ms = header["method"].get<std::string>();
            if (auto m = method_from_str(ms))
                ckpt.meta.method = *m;
            else
                throw io_error("checkpoint: unknown method '" + ms + "'");
        }
        if (header.contains("source")) {
            SourceSpec src;
            const json& s = header["source"];
            const std::string kind = s.at("kind").get<std::string>();
            if (auto k = source_kind_from_str(kind))
                src.kind = *k;
            else
                throw io_error("checkpoint: unknown source kind '" + kind + "'");
            src.radius_or_std = s.at("radius_or_std").get<double>();
            ckpt.meta.source = src;
        }
        if (header.contains("dataset")) {
            DatasetSpec ds;
            const json& d = header["dataset"];
            const std::string dn = d.at("name").get<std::string>();
            if (auto n = dataset_name_from_str(dn))
                ds.name = *n;
            else
                throw io_error("checkpoint: unknown dataset '" + dn + "'");
            ds.scale = d.at("scale").get<double>();
            ds.noise_std = d.at("noise_std").get<double>();
            ds.class_count = d.at("class_count").get<int>();
            ckpt.meta.dataset = ds;
        }
        ckpt.meta.config_hash = header.value("config_hash", "");

        const long expect = header.at("param_count").get<long>();
        if (expect != ckpt.net.param_count())
            throw io_error("checkpoint: param_count does not match architecture");
        ckpt.net.params.resize(expect);
        for (long i = 0; i < expect; ++i) ckpt.net.params(i) = read_le_double(in);
        char extra;
        if (in.read(&extra, 1) && in.gcount() == 1)
            throw io_error("checkpoint: trailing bytes after parameters");
        if (!ckpt.net.params.allFinite())
            throw io_error("checkpoint: non-finite parameters");
    } catch (const json::exception& e) {
        throw io_error(std::string("checkpoint: header field error: ") + e.what());
    }
    return ckpt;
}

} // namespace driftflow

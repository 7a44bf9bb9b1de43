#include "driftflow/cli.hpp"

#include "driftflow/checkpoint.hpp"
#include "driftflow/config.hpp"
#include "driftflow/errors.hpp"
#include "driftflow/evalkit.hpp"
#include "driftflow/names.hpp"
#include "driftflow/sampler.hpp"
#include "driftflow/svg.hpp"
#include "driftflow/trainer.hpp"
#include "driftflow/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

namespace driftflow {

namespace {

using nlohmann::ordered_json;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const argument_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const metric_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const divergence_error& e) {
        std::fprintf(stderr, "divergence: %s\n", e.what());
        return 2;
    } catch (const io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    }
}

struct TrainArgs {
    std::string config_path;
};

void do_train(const TrainArgs& args) {
    RunConfig cfg = load_run_config(args.config_path);
    std::filesystem::create_directories(cfg.out_dir);

    TrainResult result = train(cfg.train, cfg.source, cfg.dataset);

    const std::string ckpt_path = cfg.out_dir + "/checkpoint.bin";
    CheckpointMeta meta;
    meta.step = cfg.train.steps;
    meta.method = cfg.train.method;
    meta.source = cfg.source;
    meta.dataset = cfg.dataset;
    meta.config_hash = cfg.config_hash;
    save_checkpoint(ckpt_path, result.net, meta);
    result.report.checkpoint_path = ckpt_path;

    const std::string csv_path = cfg.out_dir + "/train_report.csv";
    write_report_csv(result.report, csv_path);
    write_text(cfg.out_dir + "/config.json", run_config_to_json(cfg));

    ordered_json summary;
    summary["method"] = method_str(cfg.train.method);
    summary["steps"] = cfg.train.steps;
    summary["seed"] = cfg.train.seed;
    summary["config_hash"] = cfg.config_hash;
    summary["checkpoint"] = ckpt_path;
    summary["report_csv"] = csv_path;
    if (!result.report.loss.empty()) {
        summary["final_loss"] = result.report.loss.back();
        summary["final_mean_drift_norm"] = result.report.mean_drift_norm.back();
    }
    summary["wall_time_sec"] = result.report.wall_time_sec;
    write_text(cfg.out_dir + "/train_report.json", summary.dump(2) + "\n");

    std::printf("trained %s for %ld steps (%.1f s), checkpoint %s\n",
                method_str(cfg.train.method), cfg.train.steps,
                result.report.wall_time_sec, ckpt_path.c_str());
}

struct SampleArgs {
    std::string checkpoint;
    std::string out;
    int nfe = 20;
    int n = 512;
    std::uint64_t seed = 0;
    std::string trajectory_dir;
    std::string svg_path;
    std::string source_kind;
    std::optional<double> source_param;
};

void do_sample(const SampleArgs& args) {
    if (args.nfe < 1) throw argument_error("sample: nfe must be >= 1");
    if (args.n < 1) throw argument_error("sample: n must be >= 1");
    Checkpoint ckpt = load_checkpoint(args.checkpoint);

    SourceSpec src;
    if (!args.source_kind.empty()) {
        if (auto k = source_kind_from_str(args.source_kind))
            src.kind = *k;
        else
            throw argument_error("sample: unknown source kind '" + args.source_kind + "'");
        if (args.source_param) src.radius_or_std = *args.source_param;
    } else if (ckpt.meta.source) {
        src = *ckpt.meta.source;
        if (args.source_param) src.radius_or_std = *args.source_param;
    } else {
        throw argument_error("sample: checkpoint records no source distribution; "
                             "pass --source-kind");
    }
    src.validate();

    PointBatch source = sample_source(src, args.n, args.seed);
    if (ckpt.net.class_count > 0) {
        // balanced round-robin labels for conditional checkpoints
        IntVector labels(args.n);
        for (int i = 0; i < args.n; ++i) labels[i] = i % ckpt.net.class_count;
        source.labels = labels;
    }

    TimeGrid grid = TimeGrid::uniform(args.nfe);
    // flow-matching heads were trained with equal time inputs only, so read
    // them as velocity fields instead of feeding an unseen time gap
    const Stepping stepping =
        ckpt.meta.method && *ckpt.meta.method == Method::flow_matching
            ? Stepping::velocity
            : Stepping::two_time;
    GenerateResult result =
        generate(ckpt.net, source, grid, !args.trajectory_dir.empty(), stepping);

    write_csv(result.output, args.out);
    if (!args.trajectory_dir.empty()) {
        std::filesystem::create_directories(args.trajectory_dir);
        const std::string manifest = write_trajectory(args.trajectory_dir, grid, result);
        std::printf("trajectory manifest %s\n", manifest.c_str());
    }
    if (!args.svg_path.empty())
        write_scatter_svg(args.svg_path, source.data, result.output.data);

    std::printf("sampled %d points at nfe %d -> %s\n", args.n, args.nfe,
                args.out.c_str());
}

struct EvalArgs {
    std::string generated;
    std::string reference_csv;
    std::string dataset_name;
    double scale = 0.0;       // 0 = dataset default
    double noise_std = -1.0;  // <0 = dataset default
    int class_count = -1;     // <0 = dataset default
    int ref_n = 0;            // 0 = match generated
    std::uint64_t ref_seed = 1;
    std::uint64_t seed = 0;
    bool subsample = false;
    std::string metric = "emd";
    std::string out_json;
};

void do_eval(const EvalArgs& args) {
    if (args.metric != "emd")
        throw argument_error("eval: unknown metric '" + args.metric + "' (only emd)");
    PointBatch generated = read_csv(args.generated);

    PointBatch reference;
    if (!args.reference_csv.empty()) {
        reference = read_csv(args.reference_csv);
    } else if (!args.dataset_name.empty()) {
        auto name = dataset_name_from_str(args.dataset_name);
        if (!name) throw argument_error("eval: unknown dataset '" + args.dataset_name + "'");
        DatasetSpec spec = default_dataset(*name);
        if (args.scale > 0.0) spec.scale = args.scale;
        if (args.noise_std >= 0.0) spec.noise_std = args.noise_std;
        if (args.class_count >= 0) spec.class_count = args.class_count;
        spec.validate();
        const int n = args.ref_n > 0 ? args.ref_n : generated.n();
        reference = sample_target(spec, n, args.ref_seed);
    } else {
        throw argument_error("eval: pass --reference or --dataset");
    }

    if (generated.n() != reference.n() && !args.subsample)
        throw argument_error(
            "eval: generated and reference counts differ (" +
            std::to_string(generated.n()) + " vs " + std::to_string(reference.n()) +
            "); pass --subsample to equalize");

    const double value = emd_to_target(generated, reference, args.seed);

    ordered_json report;
    report["metric"] = "emd";
    report["value"] = value;
    report["n"] = std::min(generated.n(), reference.n());
    report["seed"] = args.seed;
    report["config_hash"] = "";
    const std::string text = report.dump(2) + "\n";
    std::printf("%s", text.c_str());
    if (!args.out_json.empty()) write_text(args.out_json, text);
}

struct VerifyArgs {
    std::string suite;
    std::uint64_t seed = 0;
    int instances = 0;
    long train_steps = 0;
};

int do_verify(const VerifyArgs& args) {
    VerifyOptions opts;
    opts.seed = args.seed;
    opts.instances = args.instances;
    opts.train_steps = args.train_steps;
    SuiteResult res = run_verify_suite(args.suite, opts);
    std::printf("suite %s: %d instances, %d failures; %s\n", res.suite.c_str(),
                res.instances, res.failures, res.detail.c_str());
    if (!res.passed()) {
        std::printf("FAIL: first failing instance seed %llu (%s = %.6e)\n",
                    static_cast<unsigned long long>(res.first_fail_seed),
                    res.margin_desc.c_str(), res.worst_margin);
        return 4;
    }
    std::printf("PASS (%s = %.6e)\n", res.margin_desc.c_str(), res.worst_margin);
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"driftflow: two-time transport models on 2-D synthetic data"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* cmd_train = app.add_subcommand("train", "train a model from a JSON config");
    cmd_train->add_option("--config", train_args.config_path, "run config JSON path")
        ->required();

    SampleArgs sample_args;
    CLI::App* cmd_sample = app.add_subcommand("sample", "generate points from a checkpoint");
    cmd_sample->add_option("--checkpoint", sample_args.checkpoint, "checkpoint path")
        ->required();
    cmd_sample->add_option("--out", sample_args.out, "output CSV path")->required();
    cmd_sample->add_option("--nfe", sample_args.nfe, "number of transport steps");
    cmd_sample->add_option("--n", sample_args.n, "number of points");
    cmd_sample->add_option("--seed", sample_args.seed, "source sampling seed");
    cmd_sample->add_option("--trajectory", sample_args.trajectory_dir,
                           "directory for per-step state CSVs");
    cmd_sample->add_option("--svg", sample_args.svg_path, "scatter plot output path");
    cmd_sample->add_option("--source-kind", sample_args.source_kind,
                           "override source kind (circle_uniform | gaussian_iso)");
    double source_param = 0.0;
    CLI::Option* sp = cmd_sample->add_option("--source-param", source_param,
                                             "override source radius/std");

    EvalArgs eval_args;
    CLI::App* cmd_eval = app.add_subcommand("eval", "score generated points");
    cmd_eval->add_option("--generated", eval_args.generated, "generated CSV path")
        ->required();
    cmd_eval->add_option("--reference", eval_args.reference_csv, "reference CSV path");
    cmd_eval->add_option("--dataset", eval_args.dataset_name,
                         "reference dataset name (sampled fresh)");
    cmd_eval->add_option("--scale", eval_args.scale, "dataset scale override");
    cmd_eval->add_option("--noise-std", eval_args.noise_std, "dataset noise override");
    cmd_eval->add_option("--class-count", eval_args.class_count,
                         "dataset class count override");
    cmd_eval->add_option("--ref-n", eval_args.ref_n, "reference sample count");
    cmd_eval->add_option("--ref-seed", eval_args.ref_seed, "reference sampling seed");
    cmd_eval->add_option("--seed", eval_args.seed, "subsampling seed");
    cmd_eval->add_flag("--subsample", eval_args.subsample,
                       "allow unequal counts (deterministic subsample)");
    cmd_eval->add_option("--metric", eval_args.metric, "metric name (emd)");
    cmd_eval->add_option("--out", eval_args.out_json, "metric report JSON path");

    VerifyArgs verify_args;
    CLI::App* cmd_verify = app.add_subcommand("verify", "run a property suite");
    std::string suites;
    for (const auto& s : verify_suite_names()) suites += (suites.empty() ? "" : " | ") + s;
    cmd_verify->add_option("--suite", verify_args.suite, "one of: " + suites)->required();
    cmd_verify->add_option("--seed", verify_args.seed, "suite seed");
    cmd_verify->add_option("--instances", verify_args.instances,
                           "override instance count (0 = default)");
    cmd_verify->add_option("--train-steps", verify_args.train_steps,
                           "override training steps (infinitesimal_limit)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (cmd_train->parsed()) return guarded([&] { do_train(train_args); });
    if (cmd_sample->parsed()) {
        if (sp->count() > 0) sample_args.source_param = source_param;
        return guarded([&] { do_sample(sample_args); });
    }
    if (cmd_eval->parsed()) return guarded([&] { do_eval(eval_args); });
    if (cmd_verify->parsed()) {
        int code = 0;
        const int guard_code = guarded([&] { code = do_verify(verify_args); });
        return guard_code != 0 ? guard_code : code;
    }
    return 1;
}

} // namespace driftflow

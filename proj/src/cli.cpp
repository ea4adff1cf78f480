#include "parttrack/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parttrack/activity.hpp"
#include "parttrack/errors.hpp"
#include "parttrack/forest.hpp"
#include "parttrack/metrics.hpp"
#include "parttrack/proposals.hpp"
#include "parttrack/rng.hpp"
#include "parttrack/synth.hpp"
#include "parttrack/trial_io.hpp"

namespace fs = std::filesystem;

namespace parttrack {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_run_json(const fs::path& where, const std::string& command,
                    const std::vector<std::string>& args) {
    std::error_code ec;
    fs::create_directories(where, ec);
    nlohmann::ordered_json doc;
    doc["command"] = command;
    doc["args"] = args;
    std::ofstream out(where / "run.json");
    if (!out) throw IoError("cannot write run.json in " + where.string());
    out << doc.dump(1) << '\n';
}

struct TrainingFlags {
    TrainingConfig config;
    bool optimal = false;

    void attach(CLI::App& app) {
        app.add_option("--trees", config.n_trees, "number of trees T")->check(CLI::PositiveNumber);
        app.add_option("--max-depth", config.max_depth, "maximum tree depth D_max")
            ->check(CLI::NonNegativeNumber);
        app.add_option("--min-gain", config.min_gain, "minimum split gain g_min");
        app.add_option("--samples-per-image", config.samples_per_image,
                       "training pixels sampled per image N")
            ->check(CLI::PositiveNumber);
        app.add_option("--theta-max", config.theta_max, "offset magnitude bound (pixel-meters)");
        app.add_option("--tau-max", config.tau_max, "threshold magnitude bound (meters)");
        app.add_option("--offsets", config.count_offsets, "candidate offset pairs per tree")
            ->check(CLI::PositiveNumber);
        app.add_option("--thresholds", config.count_thresholds, "candidate thresholds per tree")
            ->check(CLI::PositiveNumber);
        app.add_option("--threads", config.threads, "worker cap for candidate scans")
            ->check(CLI::PositiveNumber);
        app.add_flag("--optimal", optimal,
                     "start from the best-found preset (depth 12, gain 0, theta 250, N 3000)");
    }

    // --optimal supplies the preset for everything not explicitly overridden.
    void resolve(const CLI::App& app) {
        if (!optimal) return;
        const TrainingConfig preset = TrainingConfig::optimal();
        if (app.count("--max-depth") == 0) config.max_depth = preset.max_depth;
        if (app.count("--min-gain") == 0) config.min_gain = preset.min_gain;
        if (app.count("--theta-max") == 0) config.theta_max = preset.theta_max;
        if (app.count("--samples-per-image") == 0)
            config.samples_per_image = preset.samples_per_image;
    }
};

struct ProposalFlags {
    ProposalConfig config;
    int population = 3000;
    double delta_hand = 0.05;
    double delta_head = 0.10;
    bool conventional_scoring = false;

    void attach(CLI::App& app) {
        app.add_option("--seed-threshold-left", config.start_threshold[0],
                       "seed probability threshold, left hand");
        app.add_option("--seed-threshold-right", config.start_threshold[1],
                       "seed probability threshold, right hand");
        app.add_option("--seed-threshold-head", config.start_threshold[2],
                       "seed probability threshold, head");
        app.add_option("--bandwidth-hands", config.bandwidth[0],
                       "mean-shift bandwidth for hands (meters)");
        app.add_option("--bandwidth-head", config.bandwidth[2],
                       "mean-shift bandwidth for the head (meters)");
        app.add_option("--merge-radius", config.merge_radius, "mode merge radius (meters)");
        app.add_option("--max-iterations", config.max_iterations, "mean-shift iteration cap");
        app.add_option("--epsilon", config.convergence_epsilon,
                       "mean-shift convergence step (meters)");
        app.add_option("--seed-cap", config.seed_cap, "max seeds per part");
        app.add_flag("--unweighted-denominator", config.unweighted_denominator,
                     "use the kernel-only denominator in the mean-shift step");
        app.add_option("--population", population, "classified pixels per frame")
            ->check(CLI::PositiveNumber);
        app.add_option("--delta-hand", delta_hand, "hand scoring distance (meters)");
        app.add_option("--delta-head", delta_head, "head scoring distance (meters)");
        app.add_flag("--conventional-scoring", conventional_scoring,
                     "score spurious modes for absent parts as FP instead of FN");
    }

    void resolve() { config.bandwidth[1] = config.bandwidth[0]; }

    double delta_for_slot(int slot) const { return slot == 2 ? delta_head : delta_hand; }
};

int cmd_synth(const std::string& template_name, int count, const std::string& out_dir,
              std::uint64_t seed, SceneConfig scene, const std::vector<std::string>& args) {
    const auto& registry = template_registry();
    for (int i = 0; i < count; ++i) {
        const TrialTemplate& tmpl =
            template_name == "mixed"
                ? registry[static_cast<std::size_t>(i) % registry.size()]
                : template_by_name(template_name);
        const SceneScript script = script_trial(tmpl, Rng::derive(seed, 2 * i), scene);
        char id[32];
        std::snprintf(id, sizeof id, "trial_%03d", i);
        write_trial((fs::path(out_dir) / id).string(), id, script, scene,
                    Rng::derive(seed, 2 * i + 1));
        std::cout << id << ": " << tmpl.name << ", " << script.frames.size() << " frames\n";
    }
    write_run_json(out_dir, "synth", args);
    return kExitOk;
}

int cmd_train(const std::vector<std::string>& train_paths, const std::string& out_model,
              TrainingConfig config, const std::vector<std::string>& args) {
    const auto dirs = expand_trial_dirs(train_paths);
    const std::vector<LabeledFrame> frames = load_training_frames(dirs);
    if (frames.empty()) throw InvalidInputError("no training frames found");
    std::cout << "training on " << frames.size() << " frames from " << dirs.size()
              << " trials\n";

    const auto start = std::chrono::steady_clock::now();
    const DecisionForest forest = train_forest(frames, config);
    const auto elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (std::size_t t = 0; t < forest.trees.size(); ++t)
        std::cout << "tree " << t << ": " << forest.trees[t].nodes.size() << " nodes, depth "
                  << forest.trees[t].depth() << "\n";
    std::cout << "trained in " << fmt(elapsed) << " s\n";

    save_forest(out_model, forest);
    write_run_json(fs::path(out_model).parent_path().empty()
                       ? fs::path(".")
                       : fs::path(out_model).parent_path(),
                   "train", args);
    return kExitOk;
}

ConfusionMatrix pixel_confusion(const DecisionForest& forest, const DepthImage& segmented,
                                const LabelImage& labels) {
    ConfusionMatrix cm(kPartCount);
    for (int y = 0; y < segmented.height(); ++y) {
        for (int x = 0; x < segmented.width(); ++x) {
            if (!segmented.valid(x, y)) continue;
            const std::uint8_t label = labels.at(x, y);
            if (label == kBackgroundLabel) continue;
            const Pdf pdf = classify_pixel(forest, segmented, {x, y});
            cm.add(static_cast<int>(part_of_label(label)), static_cast<int>(argmax_part(pdf)));
        }
    }
    return cm;
}

int cmd_evaluate(const std::string& model_path, const std::vector<std::string>& holdout_paths,
                 const std::string& out_dir, std::uint64_t seed, const ProposalFlags& prop,
                 const std::vector<std::string>& args) {
    const DecisionForest forest = load_forest(model_path);
    const auto dirs = expand_trial_dirs(holdout_paths);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir);

    const std::vector<double> grid = default_threshold_grid();
    ConfusionMatrix cm(kPartCount);
    // counts[slot][grid index] accumulated over every holdout frame
    std::vector<std::array<BinaryCounts, kProposablePartCount>> counts(grid.size());

    std::size_t frame_index = 0;
    for (const auto& dir : dirs) {
        const TrialManifest manifest = load_manifest(dir);
        for (const auto& record : manifest.frames) {
            const TrialFrameData data = load_frame(dir, record);
            const DepthImage segmented =
                segment_foreground(data.depth, manifest.segmentation_threshold);
            cm += pixel_confusion(forest, segmented, data.labels);

            std::vector<ClassifiedPixel> population;
            if (segmented.count_valid() > 0)
                population = classify_population(forest, segmented, manifest.k, prop.population,
                                                 Rng::derive(seed, frame_index));
            for (int slot = 0; slot < kProposablePartCount; ++slot) {
                const FramePartTruth& truth = record.parts[static_cast<std::size_t>(slot)];
                std::optional<ThresholdSweeper> sweeper;
                if (!population.empty())
                    sweeper.emplace(population, kProposableParts[static_cast<std::size_t>(slot)],
                                    prop.config);
                for (std::size_t g = 0; g < grid.size(); ++g) {
                    ModeFrameObservation obs;
                    obs.present = truth.present;
                    obs.truth = truth.center;
                    if (sweeper)
                        for (const PartMode& mode : sweeper->modes_at(grid[g]))
                            obs.modes.push_back(mode.position);
                    counts[g][static_cast<std::size_t>(slot)] += score_proposals_all_modes(
                        {&obs, 1}, prop.delta_for_slot(slot), prop.conventional_scoring);
                }
            }
            ++frame_index;
        }
    }

    write_confusion_csv((fs::path(out_dir) / "confusion.csv").string(), cm,
                        std::span<const char* const>(kPartNames.data(), kPartNames.size()));
    write_uar_csv((fs::path(out_dir) / "uar.csv").string(), cm,
                  std::span<const char* const>(kPartNames.data(), kPartNames.size()));

    std::vector<PartSummary> summary;
    double ap_total = 0.0;
    for (int slot = 0; slot < kProposablePartCount; ++slot) {
        PRCurve curve = pr_curve(grid, [&](double t) {
            const auto it = std::lower_bound(grid.begin(), grid.end(), t);
            return counts[static_cast<std::size_t>(it - grid.begin())]
                         [static_cast<std::size_t>(slot)];
        });
        const std::string part =
            part_name(kProposableParts[static_cast<std::size_t>(slot)]);
        write_pr_csv((fs::path(out_dir) / ("pr_" + part + ".csv")).string(), curve);
        const double ap = average_precision(curve);
        ap_total += ap;
        summary.push_back({part, ap, eer_threshold(curve)});
    }
    write_part_summary_csv((fs::path(out_dir) / "summary.csv").string(), summary);

    std::cout << "uar " << fmt(uar(cm)) << "\n";
    std::cout << "map " << fmt(ap_total / kProposablePartCount) << "\n";
    write_run_json(out_dir, "evaluate", args);
    return kExitOk;
}

void apply_sweep_value(TrainingConfig& config, std::vector<LabeledFrame>& frames,
                       const std::string& param, double value) {
    if (param == "trees")
        config.n_trees = static_cast<int>(value);
    else if (param == "max-depth")
        config.max_depth = static_cast<int>(value);
    else if (param == "min-gain")
        config.min_gain = value;
    else if (param == "samples-per-image")
        config.samples_per_image = static_cast<int>(value);
    else if (param == "theta-max")
        config.theta_max = value;
    else if (param == "tau-max")
        config.tau_max = value;
    else if (param == "offsets")
        config.count_offsets = static_cast<int>(value);
    else if (param == "thresholds")
        config.count_thresholds = static_cast<int>(value);
    else if (param == "images") {
        const auto keep = static_cast<std::size_t>(value);
        if (keep < 1 || keep > frames.size())
            throw InvalidInputError("images value out of range");
        frames.resize(keep);
    } else {
        throw InvalidInputError("unknown sweep parameter: " + param);
    }
}

int cmd_sweep(const std::string& param, const std::vector<double>& values,
              const std::vector<std::string>& train_paths,
              const std::vector<std::string>& holdout_paths, const std::string& out_csv,
              const TrainingConfig& base, const std::vector<std::string>& args) {
    const std::vector<LabeledFrame> train_frames =
        load_training_frames(expand_trial_dirs(train_paths));
    if (train_frames.empty()) throw InvalidInputError("no training frames found");

    struct Holdout {
        DepthImage segmented;
        LabelImage labels;
    };
    std::vector<Holdout> holdout;
    for (const auto& dir : expand_trial_dirs(holdout_paths)) {
        const TrialManifest manifest = load_manifest(dir);
        for (const auto& record : manifest.frames) {
            TrialFrameData data = load_frame(dir, record);
            holdout.push_back({segment_foreground(data.depth, manifest.segmentation_threshold),
                               std::move(data.labels)});
        }
    }
    if (holdout.empty()) throw InvalidInputError("no holdout frames found");

    std::ofstream out(out_csv);
    if (!out) throw IoError("cannot write " + out_csv);
    out << "param_value,uar\n";
    for (const double value : values) {
        TrainingConfig config = base;
        std::vector<LabeledFrame> frames = train_frames;
        apply_sweep_value(config, frames, param, value);
        const DecisionForest forest = train_forest(frames, config);
        ConfusionMatrix cm(kPartCount);
        for (const auto& frame : holdout) cm += pixel_confusion(forest, frame.segmented, frame.labels);
        const double u = uar(cm);
        out << fmt(value) << ',' << fmt(u) << '\n';
        out.flush();
        std::cout << param << "=" << fmt(value) << " uar " << fmt(u) << "\n";
    }
    const fs::path parent = fs::path(out_csv).parent_path();
    write_run_json(parent.empty() ? fs::path(".") : parent, "sweep", args);
    return kExitOk;
}

int cmd_track(const std::string& model_path, const std::vector<std::string>& trial_paths,
              const std::string& regions_path, const std::string& precedence_path,
              const std::string& out_dir, std::uint64_t seed, const ProposalFlags& prop,
              const std::vector<std::string>& args) {
    const DecisionForest forest = load_forest(model_path);
    const std::vector<ActivityRegion> regions =
        regions_path.empty() ? default_regions() : load_regions(regions_path);
    const StepPrecedence precedence = precedence_path.empty()
                                          ? StepPrecedence::standard()
                                          : load_precedence(precedence_path);
    const auto dirs = expand_trial_dirs(trial_paths);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir);

    std::ofstream steps_csv(fs::path(out_dir) / "steps.csv");
    if (!steps_csv) throw IoError("cannot write steps.csv");
    steps_csv << "trial_id,tp,fp,tn,fn,f1\n";

    // Per (action, part-slot): per-trial counts for the Table-2-style report.
    std::map<std::string, std::array<std::vector<BinaryCounts>, kProposablePartCount>> by_action;
    BinaryCounts aggregate;
    int undefined_f1 = 0;
    std::size_t frame_index = 0;

    for (const auto& dir : dirs) {
        const TrialManifest manifest = load_manifest(dir);
        TrialTracker tracker(regions, precedence);
        std::ofstream timeline(fs::path(out_dir) /
                               ("timeline_" + manifest.trial_id + ".csv"));
        if (!timeline) throw IoError("cannot write timeline for " + manifest.trial_id);
        timeline << "frame,left_activity,right_activity,steps_completed\n";

        std::map<std::string, std::array<BinaryCounts, kProposablePartCount>> trial_by_action;
        for (std::size_t f = 0; f < manifest.frames.size(); ++f) {
            const auto& record = manifest.frames[f];
            const TrialFrameData data = load_frame(dir, record);
            const DepthImage segmented =
                segment_foreground(data.depth, manifest.segmentation_threshold);
            PartProposals proposals;
            if (segmented.count_valid() > 0)
                proposals = propose_parts(forest, segmented, manifest.k, prop.population,
                                          prop.config, Rng::derive(seed, frame_index));
            ++frame_index;

            const auto position = [&proposals](BodyPart part) -> std::optional<WorldPoint> {
                const auto mode = proposals.final_proposal(part);
                if (!mode) return std::nullopt;
                return mode->position;
            };
            const auto active =
                tracker.observe(position(BodyPart::left_hand), position(BodyPart::right_hand));
            timeline << f << ',' << activity_name(active[0]) << ',' << activity_name(active[1])
                     << ',' << tracker.completed_count() << '\n';

            for (int slot = 0; slot < kProposablePartCount; ++slot) {
                const FramePartTruth& truth = record.parts[static_cast<std::size_t>(slot)];
                FinalFrameObservation obs;
                obs.present = truth.present;
                obs.truth = truth.center;
                if (const auto mode = proposals.final_proposal(
                        kProposableParts[static_cast<std::size_t>(slot)]))
                    obs.proposal = mode->position;
                trial_by_action[record.action][static_cast<std::size_t>(slot)] +=
                    score_final_proposals({&obs, 1}, prop.delta_for_slot(slot),
                                          prop.conventional_scoring);
            }
        }

        const BinaryCounts confusion = trial_confusion(tracker.flags(), manifest.intended_steps);
        aggregate += confusion;
        steps_csv << manifest.trial_id << ',' << confusion.tp << ',' << confusion.fp << ','
                  << confusion.tn << ',' << confusion.fn << ',';
        if (confusion.tp + confusion.fp > 0 && confusion.tp + confusion.fn > 0)
            steps_csv << fmt(f_beta(confusion, 1.0));
        else
            ++undefined_f1;
        steps_csv << '\n';

        for (auto& [action, slots] : trial_by_action)
            for (int slot = 0; slot < kProposablePartCount; ++slot)
                by_action[action][static_cast<std::size_t>(slot)].push_back(
                    slots[static_cast<std::size_t>(slot)]);
    }

    std::ofstream agg(fs::path(out_dir) / "aggregate.csv");
    if (!agg) throw IoError("cannot write aggregate.csv");
    agg << "tp,fp,tn,fn,f1,trials,undefined_f1_trials\n";
    const bool f1_defined = aggregate.tp + aggregate.fp > 0 && aggregate.tp + aggregate.fn > 0;
    agg << aggregate.tp << ',' << aggregate.fp << ',' << aggregate.tn << ',' << aggregate.fn
        << ',' << (f1_defined ? fmt(f_beta(aggregate, 1.0)) : std::string()) << ',' << dirs.size()
        << ',' << undefined_f1 << '\n';

    std::ofstream f05(fs::path(out_dir) / "f05_by_action.csv");
    if (!f05) throw IoError("cannot write f05_by_action.csv");
    f05 << "action,part,mean_f05,trials_used,trials_undefined\n";
    for (const auto& [action, slots] : by_action) {
        for (int slot = 0; slot < kProposablePartCount; ++slot) {
            double total = 0.0;
            int used = 0, undefined = 0;
            for (const BinaryCounts& c : slots[static_cast<std::size_t>(slot)]) {
                if (c.tp + c.fp > 0 && c.tp + c.fn > 0) {
                    total += f_beta(c, 0.5);
                    ++used;
                } else {
                    ++undefined;
                }
            }
            f05 << action << ',' << part_name(kProposableParts[static_cast<std::size_t>(slot)])
                << ',' << (used > 0 ? fmt(total / used) : std::string()) << ',' << used << ','
                << undefined << '\n';
        }
    }

    if (f1_defined) std::cout << "aggregate f1 " << fmt(f_beta(aggregate, 1.0)) << "\n";
    std::cout << "steps tp " << aggregate.tp << " fp " << aggregate.fp << " tn " << aggregate.tn
              << " fn " << aggregate.fn << "\n";
    write_run_json(out_dir, "track", args);
    return kExitOk;
}

int dispatch(const std::vector<std::string>& args);

int cmd_rerun(const std::string& run_path) {
    std::ifstream in(run_path);
    if (!in) throw IoError("cannot read " + run_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed run file: ") + e.what());
    }
    std::vector<std::string> args;
    try {
        for (const auto& a : doc.at("args")) args.push_back(a.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed run file: ") + e.what());
    }
    return dispatch(args);
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"depth-image body-part tracking pipeline"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic labeled trials");
    std::string synth_template = "mixed";
    int synth_count = 1;
    std::string synth_out;
    std::uint64_t synth_seed = 1;
    SceneConfig scene;
    synth->add_option("--template", synth_template, "trial template name or 'mixed'");
    synth->add_option("--count", synth_count, "number of trials")->check(CLI::PositiveNumber);
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->add_option("--noise-sigma", scene.noise_sigma, "depth noise sigma (meters)");
    synth->add_option("--width", scene.width, "raster width")->check(CLI::PositiveNumber);
    synth->add_option("--height", scene.height, "raster height")->check(CLI::PositiveNumber);

    // train
    auto* train = app.add_subcommand("train", "train a decision forest");
    std::vector<std::string> train_dirs;
    std::string train_out;
    std::uint64_t train_seed = 1;
    TrainingFlags train_flags;
    train->add_option("--train", train_dirs, "training trial directories")->required();
    train->add_option("--out", train_out, "output model file")->required();
    train->add_option("--seed", train_seed, "RNG seed");
    train_flags.attach(*train);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "per-pixel and proposal metrics on a holdout");
    std::string eval_model, eval_out;
    std::vector<std::string> eval_dirs;
    std::uint64_t eval_seed = 1;
    ProposalFlags eval_prop;
    evaluate->add_option("--model", eval_model, "trained model file")->required();
    evaluate->add_option("--holdout", eval_dirs, "holdout trial directories")->required();
    evaluate->add_option("--out", eval_out, "output directory")->required();
    evaluate->add_option("--seed", eval_seed, "RNG seed");
    eval_prop.attach(*evaluate);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "retrain while varying one parameter");
    std::string sweep_param, sweep_out;
    std::vector<double> sweep_values;
    std::vector<std::string> sweep_train, sweep_holdout;
    std::uint64_t sweep_seed = 1;
    TrainingFlags sweep_flags;
    sweep->add_option("--param", sweep_param, "parameter to vary")->required();
    sweep->add_option("--values", sweep_values, "values to sweep")->required();
    sweep->add_option("--train", sweep_train, "training trial directories")->required();
    sweep->add_option("--holdout", sweep_holdout, "holdout trial directories")->required();
    sweep->add_option("--out", sweep_out, "output CSV path")->required();
    sweep->add_option("--seed", sweep_seed, "RNG seed");
    sweep_flags.attach(*sweep);

    // track
    auto* track = app.add_subcommand("track", "activity and step tracking over trials");
    std::string track_model, track_regions, track_precedence, track_out;
    std::vector<std::string> track_dirs;
    std::uint64_t track_seed = 1;
    ProposalFlags track_prop;
    track->add_option("--model", track_model, "trained model file")->required();
    track->add_option("--trials", track_dirs, "trial directories")->required();
    track->add_option("--regions", track_regions, "activity region JSON (default scene layout)");
    track->add_option("--precedence", track_precedence, "step precedence JSON");
    track->add_option("--out", track_out, "output directory")->required();
    track->add_option("--seed", track_seed, "RNG seed");
    track_prop.attach(*track);

    // rerun
    auto* rerun = app.add_subcommand("rerun", "re-execute a recorded run.json");
    std::string rerun_path;
    rerun->add_option("run", rerun_path, "path to run.json")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (synth->parsed()) {
        scene.k = CameraIntrinsics::scaled_default(scene.width, scene.height);
        return cmd_synth(synth_template, synth_count, synth_out, synth_seed, scene, args);
    }
    if (train->parsed()) {
        train_flags.resolve(*train);
        train_flags.config.rng_seed = train_seed;
        return cmd_train(train_dirs, train_out, train_flags.config, args);
    }
    if (evaluate->parsed()) {
        eval_prop.resolve();
        return cmd_evaluate(eval_model, eval_dirs, eval_out, eval_seed, eval_prop, args);
    }
    if (sweep->parsed()) {
        sweep_flags.resolve(*sweep);
        sweep_flags.config.rng_seed = sweep_seed;
        return cmd_sweep(sweep_param, sweep_values, sweep_train, sweep_holdout, sweep_out,
                         sweep_flags.config, args);
    }
    if (track->parsed()) {
        track_prop.resolve();
        return cmd_track(track_model, track_dirs, track_regions, track_precedence, track_out,
                         track_seed, track_prop, args);
    }
    if (rerun->parsed()) return cmd_rerun(rerun_path);
    return kExitUsage;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        return dispatch(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace parttrack

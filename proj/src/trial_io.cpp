#include "parttrack/trial_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "parttrack/errors.hpp"
#include "parttrack/pgm_io.hpp"
#include "parttrack/rng.hpp"

namespace fs = std::filesystem;

namespace parttrack {

namespace {

constexpr std::array<const char*, 3> kTruthPartNames = {"left_hand", "right_hand", "head"};

nlohmann::ordered_json steps_to_json(const StepFlags& flags) {
    nlohmann::ordered_json out;
    for (int s = 0; s < kStepCount; ++s)
        out[kStepNames[static_cast<std::size_t>(s)]] = flags[static_cast<std::size_t>(s)];
    return out;
}

StepFlags steps_from_json(const nlohmann::json& doc) {
    StepFlags flags{};
    for (int s = 0; s < kStepCount; ++s)
        flags[static_cast<std::size_t>(s)] =
            doc.at(kStepNames[static_cast<std::size_t>(s)]).get<bool>();
    return flags;
}

}  // namespace

TrialManifest write_trial(const std::string& dir, const std::string& trial_id,
                          const SceneScript& script, const SceneConfig& config,
                          std::uint64_t rng_seed) {
    if (script.frames.empty()) throw InvalidInputError("script has no frames");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create trial directory " + dir + ": " + ec.message());

    TrialManifest manifest;
    manifest.trial_id = trial_id;
    manifest.template_name = script.template_name;
    manifest.frame_count = static_cast<int>(script.frames.size());
    manifest.width = config.width;
    manifest.height = config.height;
    manifest.k = config.k;
    manifest.segmentation_threshold = config.segmentation_threshold;
    manifest.intended_steps = script.intended_steps;

    for (std::size_t i = 0; i < script.frames.size(); ++i) {
        const RenderedFrame rendered =
            render_frame(script.frames[i], config.k, config.width, config.height,
                         config.noise_sigma, Rng::derive(rng_seed, i));
        char depth_name[32], label_name[32];
        std::snprintf(depth_name, sizeof depth_name, "frame_%04zu.pgm", i);
        std::snprintf(label_name, sizeof label_name, "frame_%04zu_labels.pgm", i);
        write_depth_pgm((fs::path(dir) / depth_name).string(), rendered.depth);
        write_label_pgm((fs::path(dir) / label_name).string(), rendered.labels);

        TrialFrameRecord record;
        record.depth_file = depth_name;
        record.label_file = label_name;
        record.action = script.frames[i].action;
        record.activity = script.frames[i].activity;
        for (int p = 0; p < 3; ++p) {
            const PartRender& pr = rendered.parts[static_cast<std::size_t>(p)];
            record.parts[static_cast<std::size_t>(p)] = {pr.present, pr.center};
        }
        manifest.frames.push_back(std::move(record));
    }

    nlohmann::ordered_json doc;
    doc["trial_id"] = manifest.trial_id;
    doc["template"] = manifest.template_name;
    doc["frame_count"] = manifest.frame_count;
    doc["width"] = manifest.width;
    doc["height"] = manifest.height;
    doc["intrinsics"] = {{"fx", manifest.k.fx},
                         {"fy", manifest.k.fy},
                         {"cx", manifest.k.cx},
                         {"cy", manifest.k.cy}};
    doc["segmentation_threshold"] = manifest.segmentation_threshold;
    doc["intended_steps"] = steps_to_json(manifest.intended_steps);
    doc["frames"] = nlohmann::ordered_json::array();
    for (const auto& record : manifest.frames) {
        nlohmann::ordered_json frame;
        frame["depth"] = record.depth_file;
        frame["labels"] = record.label_file;
        frame["action"] = record.action;
        frame["activity"] = record.activity;
        nlohmann::ordered_json parts;
        for (int p = 0; p < 3; ++p) {
            const FramePartTruth& truth = record.parts[static_cast<std::size_t>(p)];
            nlohmann::ordered_json part;
            part["present"] = truth.present;
            if (truth.present)
                part["center"] = {truth.center.x, truth.center.y, truth.center.z};
            parts[kTruthPartNames[static_cast<std::size_t>(p)]] = std::move(part);
        }
        frame["parts"] = std::move(parts);
        doc["frames"].push_back(std::move(frame));
    }

    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw IoError("cannot write manifest in " + dir);
    out << doc.dump(1) << '\n';
    return manifest;
}

TrialManifest load_manifest(const std::string& dir) {
    const fs::path path = fs::path(dir) / "manifest.json";
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest " + path.string() + ": " + e.what());
    }

    TrialManifest manifest;
    try {
        manifest.trial_id = doc.at("trial_id").get<std::string>();
        manifest.template_name = doc.value("template", std::string());
        manifest.frame_count = doc.at("frame_count").get<int>();
        manifest.width = doc.at("width").get<int>();
        manifest.height = doc.at("height").get<int>();
        const auto& k = doc.at("intrinsics");
        manifest.k = {k.at("fx").get<double>(), k.at("fy").get<double>(),
                      k.at("cx").get<double>(), k.at("cy").get<double>()};
        manifest.segmentation_threshold = doc.at("segmentation_threshold").get<double>();
        manifest.intended_steps = steps_from_json(doc.at("intended_steps"));
        for (const auto& frame : doc.at("frames")) {
            TrialFrameRecord record;
            record.depth_file = frame.at("depth").get<std::string>();
            record.label_file = frame.at("labels").get<std::string>();
            record.action = frame.at("action").get<std::string>();
            record.activity = frame.at("activity").get<std::string>();
            for (int p = 0; p < 3; ++p) {
                const auto& part = frame.at("parts").at(kTruthPartNames[static_cast<std::size_t>(p)]);
                FramePartTruth& truth = record.parts[static_cast<std::size_t>(p)];
                truth.present = part.at("present").get<bool>();
                if (truth.present) {
                    const auto& c = part.at("center");
                    truth.center = {c.at(0).get<double>(), c.at(1).get<double>(),
                                    c.at(2).get<double>()};
                }
            }
            manifest.frames.push_back(std::move(record));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest " + path.string() + ": " + e.what());
    }
    if (manifest.frame_count != static_cast<int>(manifest.frames.size()))
        throw IoError("manifest frame_count mismatch in " + path.string());
    return manifest;
}

TrialFrameData load_frame(const std::string& dir, const TrialFrameRecord& record) {
    return {read_depth_pgm((fs::path(dir) / record.depth_file).string()),
            read_label_pgm((fs::path(dir) / record.label_file).string())};
}

std::vector<std::string> expand_trial_dirs(std::span<const std::string> paths) {
    std::vector<std::string> out;
    for (const auto& path : paths) {
        if (!fs::is_directory(path)) throw IoError("not a directory: " + path);
        if (fs::exists(fs::path(path) / "manifest.json")) {
            out.push_back(path);
            continue;
        }
        bool found = false;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) {
                out.push_back(entry.path().string());
                found = true;
            }
        }
        if (!found) throw IoError("no trials under " + path);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<LabeledFrame> load_training_frames(std::span<const std::string> trial_dirs) {
    std::vector<LabeledFrame> frames;
    for (const auto& dir : trial_dirs) {
        const TrialManifest manifest = load_manifest(dir);
        for (const auto& record : manifest.frames) {
            TrialFrameData data = load_frame(dir, record);
            frames.push_back({segment_foreground(data.depth, manifest.segmentation_threshold),
                              std::move(data.labels)});
        }
    }
    return frames;
}

}  // namespace parttrack

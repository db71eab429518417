// Command-line front end: track, eval, synth, ablate, plot.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rotsiam/ablation.hpp"
#include "rotsiam/config.hpp"
#include "rotsiam/eval.hpp"
#include "rotsiam/plot.hpp"
#include "rotsiam/sequence_io.hpp"
#include "rotsiam/synth.hpp"

namespace fs = std::filesystem;
using namespace rotsiam;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot write");
    out << text;
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<fs::path> trace_files(const fs::path& runs) {
    std::vector<fs::path> files;
    if (fs::is_regular_file(runs)) return {runs};
    if (!fs::is_directory(runs)) throw std::runtime_error(runs.string() + ": no such file or directory");
    for (const auto& e : fs::directory_iterator(runs)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error(runs.string() + ": no trace CSV files");
    return files;
}

nlohmann::json number(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

struct TrackArgs {
    std::string config, frames, gt, out, protocol = "otb", tracker = "rotsiam", name;
};

int run_track(const TrackArgs& a) {
    const TrackerConfig cfg = a.config.empty() ? TrackerConfig{} : load_config(a.config);
    cfg.validate();
    SequenceRecord seq = load_sequence(a.frames, a.gt, a.name);
    std::unique_ptr<SequenceTracker> tracker;
    if (a.tracker == "echo") tracker = std::make_unique<GroundTruthEcho>(seq.groundtruth);
    else tracker = std::make_unique<RotationTracker>(cfg);
    const RunTrace trace = a.protocol == "vot" ? vot_run(*tracker, seq) : otb_run(*tracker, seq);
    write_text(a.out, format_trace_csv(trace, seq.groundtruth));
    return 0;
}

struct EvalArgs {
    std::string protocol = "otb", runs, out;
    int eao_lo = 108, eao_hi = 371;
};

int run_eval(const EvalArgs& a) {
    nlohmann::ordered_json j;
    j["protocol"] = a.protocol;
    std::vector<LoadedTrace> loaded;
    for (const auto& f : trace_files(a.runs)) loaded.push_back(load_trace_csv(f));
    j["sequences"] = loaded.size();

    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    std::vector<double> all_ov, all_err;
    std::vector<RunTrace> traces;
    double acc_sum = 0.0;
    for (const auto& lt : loaded) {
        std::vector<double> ov, err;
        for (std::size_t f = 0; f < lt.trace.size(); ++f) {
            if (lt.trace.status[f] == FrameStatus::Skipped) continue;
            ov.push_back(lt.trace.overlaps[f]);
            err.push_back(center_distance(lt.trace.predicted[f], lt.groundtruth[f]));
        }
        nlohmann::ordered_json s;
        s["name"] = lt.name;
        s["frames"] = lt.trace.size();
        if (a.protocol == "otb") {
            s["auc"] = auc(success_curve(ov));
            s["precision20"] = precision_at(err);
        } else {
            const double acc = accuracy(lt.trace);
            s["accuracy"] = acc;
            s["failures"] = lt.trace.failures.size();
            acc_sum += acc;
        }
        per.push_back(s);
        all_ov.insert(all_ov.end(), ov.begin(), ov.end());
        all_err.insert(all_err.end(), err.begin(), err.end());
        traces.push_back(lt.trace);
    }
    if (a.protocol == "otb") {
        j["auc"] = auc(success_curve(all_ov));
        j["precision20"] = precision_at(all_err);
    } else {
        const Robustness r = robustness(traces);
        j["accuracy"] = acc_sum / static_cast<double>(loaded.size());
        j["robustness"] = {{"failures_per_sequence", r.failures_per_sequence},
                           {"failures_per_100_frames", r.failures_per_100_frames}};
        j["eao"] = number(eao(traces, a.eao_lo, a.eao_hi));
        j["eao_interval"] = {a.eao_lo, a.eao_hi};
    }
    j["per_sequence"] = per;
    write_text(a.out, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rotation-aware Siamese tracker: tracking, evaluation and synthetic sequences"};
    app.require_subcommand(1);

    TrackArgs ta;
    auto* track = app.add_subcommand("track", "Run the tracker on one sequence and write a trace CSV");
    track->add_option("--config", ta.config, "Tracker settings file (defaults if omitted)");
    track->add_option("--frames", ta.frames, "Frame directory")->required();
    track->add_option("--gt", ta.gt, "Ground-truth file")->required();
    track->add_option("--out", ta.out, "Trace CSV")->required();
    track->add_option("--protocol", ta.protocol, "otb (one pass) or vot (reset on failure)")
        ->check(CLI::IsMember({"otb", "vot"}));
    track->add_option("--tracker", ta.tracker, "rotsiam or echo (replays the ground truth)")
        ->check(CLI::IsMember({"rotsiam", "echo"}));
    track->add_option("--name", ta.name, "Sequence name");

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Summarize trace CSVs as JSON");
    eval->add_option("--protocol", ea.protocol, "otb or vot")->required()->check(CLI::IsMember({"otb", "vot"}));
    eval->add_option("--runs", ea.runs, "Trace CSV or directory of them")->required();
    eval->add_option("--out", ea.out, "JSON summary")->required();
    eval->add_option("--eao-lo", ea.eao_lo, "Shortest segment length in the EAO average")->check(CLI::PositiveNumber);
    eval->add_option("--eao-hi", ea.eao_hi, "Longest segment length in the EAO average")->check(CLI::PositiveNumber);

    std::string script, synth_out, synth_name;
    std::optional<std::uint64_t> seed;
    auto* synth = app.add_subcommand("synth", "Render a synthetic sequence");
    synth->add_option("--script", script, "Motion script")->required();
    synth->add_option("--seed", seed, "Texture and noise seed (overrides the script)");
    synth->add_option("--out", synth_out, "Output directory")->required();

    std::string grid, seqs, ablate_out;
    unsigned threads = 0;
    auto* ablate = app.add_subcommand("ablate", "Run the angle/mask/update on-off grid");
    ablate->add_option("--grid", grid, "Grid file")->required();
    ablate->add_option("--seqs", seqs, "Directory of sequences")->required();
    ablate->add_option("--out", ablate_out, "CSV report")->required();
    ablate->add_option("--threads", threads, "Worker threads (0: all cores)");

    std::string plot_in, plot_out;
    auto* plot = app.add_subcommand("plot", "Success, precision and expected-overlap curves as SVG");
    plot->add_option("--in", plot_in, "Trace CSV or directory of them")->required();
    plot->add_option("--out", plot_out, "SVG file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 2;
    }

    const char* command = app.get_subcommands().front()->get_name().c_str();
    try {
        if (*track) return run_track(ta);
        if (*eval) {
            if (ea.eao_hi < ea.eao_lo) throw std::invalid_argument("--eao-hi must be >= --eao-lo");
            return run_eval(ea);
        }
        if (*synth) {
            MotionScript ms = load_motion_script(script);
            if (seed) ms.seed = *seed;
            write_sequence(synth_sequence(ms, fs::path(synth_out).filename().string()), synth_out);
            return 0;
        }
        if (*ablate) {
            const AblationGrid g = load_ablation_grid(grid);
            const auto sequences = load_sequences(seqs);
            if (sequences.empty()) throw std::runtime_error(seqs + ": no sequences found");
            AblationOptions opts{g.eao_lo, g.eao_hi, threads};
            write_text(ablate_out, format_ablation_csv(run_ablation(g.expand(), sequences, opts)));
            return 0;
        }
        if (*plot) {
            std::vector<LoadedTrace> traces;
            for (const auto& f : trace_files(plot_in)) traces.push_back(load_trace_csv(f));
            write_text(plot_out, render_svg(trace_panels(traces)));
            return 0;
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "error: " << command << ": " << msg << '\n';
        return 1;
    }
    return 1;
}

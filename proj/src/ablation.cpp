#include "rotsiam/ablation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rotsiam {

std::vector<LabeledConfig> AblationGrid::expand() const {
    for (const auto& a : axes) {
        if (a != "angle" && a != "mask" && a != "update") throw std::invalid_argument("ablation grid: unknown axis '" + a + "'");
    }
    const std::size_t n = axes.size();
    std::vector<LabeledConfig> out;
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        LabeledConfig lc{{}, base};
        for (std::size_t i = 0; i < n; ++i) {
            const bool on = (bits >> (n - 1 - i)) & 1U;
            if (axes[i] == "angle") lc.cfg.angle_enabled = on;
            if (axes[i] == "mask") lc.cfg.mask_enabled = on;
            if (axes[i] == "update") lc.cfg.update_enabled = on;
            lc.label += (i ? "+" : "") + axes[i] + (on ? "=on" : "=off");
        }
        if (n == 0) lc.label = "base";
        out.push_back(std::move(lc));
    }
    return out;
}

AblationGrid parse_ablation_grid(const std::string& text) {
    AblationGrid g;
    for (const auto& [k, v] : parse_key_values(text)) {
        if (k == "axes") {
            g.axes.clear();
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item.erase(0, item.find_first_not_of(" \t"));
                item.erase(item.find_last_not_of(" \t") + 1);
                if (!item.empty()) g.axes.push_back(item);
            }
        } else if (k == "eao_lo") {
            g.eao_lo = std::stoi(v);
        } else if (k == "eao_hi") {
            g.eao_hi = std::stoi(v);
        } else {
            apply_setting(g.base, k, v);
        }
    }
    g.base.validate();
    g.expand();  // rejects unknown axes early
    return g;
}

AblationGrid load_ablation_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ablation grid " + path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_ablation_grid(ss.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

namespace {

struct SequenceResult {
    std::vector<double> otb_overlaps;   // frames after the first
    std::vector<double> center_err;
    RunTrace vot;
    double accuracy = 0.0;
};

SequenceResult evaluate(const TrackerConfig& cfg, const SequenceRecord& seq) {
    SequenceResult r;
    {
        RotationTracker t(cfg);
        const RunTrace trace = otb_run(t, seq);
        for (std::size_t f = 1; f < trace.size(); ++f) {
            r.otb_overlaps.push_back(trace.overlaps[f]);
            r.center_err.push_back(center_distance(trace.predicted[f], seq.groundtruth[f]));
        }
    }
    RotationTracker t(cfg);
    r.vot = vot_run(t, seq);
    r.accuracy = accuracy(r.vot);
    return r;
}

}  // namespace

std::vector<AblationRow> run_ablation(const std::vector<LabeledConfig>& configs, const std::vector<SequenceRecord>& seqs,
                                      const AblationOptions& opts) {
    for (const auto& c : configs) c.cfg.validate();
    for (const auto& s : seqs) s.validate();

    const std::size_t jobs = configs.size() * seqs.size();
    std::vector<SequenceResult> results(jobs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            try {
                results[j] = evaluate(configs[j / seqs.size()].cfg, seqs[j % seqs.size()]);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    unsigned n_threads = opts.threads ? opts.threads : std::max(1U, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(jobs, 1)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    std::vector<AblationRow> rows;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        AblationRow row;
        row.label = configs[c].label;
        row.angle_enabled = configs[c].cfg.angle_enabled;
        row.mask_enabled = configs[c].cfg.mask_enabled;
        row.update_enabled = configs[c].cfg.update_enabled;
        row.sequences = seqs.size();
        std::vector<double> ov, err;
        std::vector<RunTrace> traces;
        double acc = 0.0;
        for (std::size_t s = 0; s < seqs.size(); ++s) {
            const auto& r = results[c * seqs.size() + s];
            ov.insert(ov.end(), r.otb_overlaps.begin(), r.otb_overlaps.end());
            err.insert(err.end(), r.center_err.begin(), r.center_err.end());
            traces.push_back(r.vot);
            acc += r.accuracy;
            row.frames += seqs[s].size();
        }
        row.auc = auc(success_curve(ov));
        row.precision20 = precision_at(err);
        row.mean_iou = ov.empty() ? 0.0 : std::accumulate(ov.begin(), ov.end(), 0.0) / static_cast<double>(ov.size());
        row.accuracy = seqs.empty() ? 0.0 : acc / static_cast<double>(seqs.size());
        const Robustness rb = robustness(traces);
        row.failures_per_sequence = rb.failures_per_sequence;
        row.failures_per_100_frames = rb.failures_per_100_frames;
        row.eao = eao(traces, opts.eao_lo, opts.eao_hi);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_ablation_csv(const std::vector<AblationRow>& rows) {
    std::ostringstream o;
    o << "label,angle,mask,update,sequences,frames,auc,precision20,mean_iou,accuracy,failures_per_sequence,"
         "failures_per_100_frames,eao\n";
    o << std::setprecision(10);
    auto num = [&](double v) -> std::ostream& {
        if (std::isnan(v)) return o << "nan";
        return o << v;
    };
    for (const auto& r : rows) {
        o << r.label << ',' << r.angle_enabled << ',' << r.mask_enabled << ',' << r.update_enabled << ',' << r.sequences
          << ',' << r.frames << ',';
        num(r.auc) << ',';
        num(r.precision20) << ',';
        num(r.mean_iou) << ',';
        num(r.accuracy) << ',';
        num(r.failures_per_sequence) << ',';
        num(r.failures_per_100_frames) << ',';
        num(r.eao) << '\n';
    }
    return o.str();
}

}  // namespace rotsiam

#include "rotsiam/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rotsiam {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw std::invalid_argument("config: " + key + " expects a boolean, got '" + v + "'");
}

int parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    int out = 0;
    try {
        out = std::stoi(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
    return out;
}

}  // namespace

double parse_real(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.empty()) throw std::invalid_argument("empty number");
    const auto pi = s.find("pi");
    if (pi == std::string::npos) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != s.size() || !std::isfinite(v)) throw std::invalid_argument("bad number '" + text + "'");
        return v;
    }
    double factor = 1.0;
    std::string head = s.substr(0, pi);
    if (head == "-") {
        factor = -1.0;
    } else if (!head.empty() && head != "+") {
        if (head.back() != '*') throw std::invalid_argument("bad number '" + text + "'");
        factor = parse_real(head.substr(0, head.size() - 1));
    }
    double v = factor * kPi;
    const std::string tail = s.substr(pi + 2);
    if (!tail.empty()) {
        if (tail.front() != '/') throw std::invalid_argument("bad number '" + text + "'");
        const double d = parse_real(tail.substr(1));
        if (d == 0.0) throw std::invalid_argument("division by zero in '" + text + "'");
        v /= d;
    }
    return v;
}

void TrackerConfig::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
    if (M < 1 || M % 2 == 0) fail("M must be a positive odd count");
    if (N < 1 || N % 2 == 0) fail("N must be a positive odd count");
    if (!(scale_step > 0.0)) fail("scale_step must be positive");
    if (!(angle_step > 0.0)) fail("angle_step must be positive");
    if (!(angle_penalty > 0.0 && angle_penalty <= 1.0)) fail("angle_penalty must be in (0, 1]");
    if (!(scale_penalty > 0.0 && scale_penalty <= 1.0)) fail("scale_penalty must be in (0, 1]");
    if (!(th_r >= 1.0)) fail("th_r must be >= 1");
    if (!(lambda_S >= 0.0 && lambda_S <= 1.0)) fail("lambda_S must be in [0, 1]");
    if (!(lambda_U >= 0.0 && lambda_U <= 1.0)) fail("lambda_U must be in [0, 1]");
    if (!(window_weight >= 0.0 && window_weight <= 1.0)) fail("window_weight must be in [0, 1]");
    if (fusion_weight_lo < 0.0 || fusion_weight_hi < 0.0 || std::abs(fusion_weight_lo + fusion_weight_hi - 1.0) > 1e-9) {
        fail("fusion weights must be non-negative and sum to 1");
    }
    if (upsample < 1) fail("upsample must be >= 1");
    if (!(score_sharpness >= 0.0 && score_sharpness <= 200.0)) fail("score_sharpness must be in [0, 200]");
    if (mask_band_lo < 0 || mask_band_lo > 3 || mask_band_hi < 0 || mask_band_hi > 2) {
        fail("mask bands must leave at least two cells unmasked");
    }
    if (!(min_scale > 0.0 && min_scale <= 1.0 && max_scale >= 1.0)) fail("scale bounds must bracket 1");
}

void apply_setting(TrackerConfig& cfg, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    auto real = [&]() {
        try {
            return parse_real(v);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config: " + key + ": " + e.what());
        }
    };
    if (key == "M") cfg.M = parse_int(key, v);
    else if (key == "N") cfg.N = parse_int(key, v);
    else if (key == "scale_step") cfg.scale_step = real();
    else if (key == "angle_step") cfg.angle_step = real();
    else if (key == "angle_penalty") cfg.angle_penalty = real();
    else if (key == "scale_penalty") cfg.scale_penalty = real();
    else if (key == "th_r") cfg.th_r = real();
    else if (key == "lambda_S") cfg.lambda_S = real();
    else if (key == "lambda_U") cfg.lambda_U = real();
    else if (key == "window_weight") cfg.window_weight = real();
    else if (key == "fusion_weight_lo") cfg.fusion_weight_lo = real();
    else if (key == "fusion_weight_hi") cfg.fusion_weight_hi = real();
    else if (key == "upsample") cfg.upsample = parse_int(key, v);
    else if (key == "penalty_before_window") cfg.penalty_before_window = parse_bool(key, v);
    else if (key == "center_template") cfg.center_template = parse_bool(key, v);
    else if (key == "normalized_correlation") cfg.normalized_correlation = parse_bool(key, v);
    else if (key == "score_sharpness") cfg.score_sharpness = real();
    else if (key == "extractor") cfg.extractor.kind = parse_extractor_kind(v);
    else if (key == "extractor_seed") cfg.extractor.seed = static_cast<std::uint64_t>(std::stoull(v));
    else if (key == "conv1_channels") cfg.extractor.conv1_channels = parse_int(key, v);
    else if (key == "conv2_channels") cfg.extractor.conv2_channels = parse_int(key, v);
    else if (key == "conv3_channels") cfg.extractor.conv3_channels = parse_int(key, v);
    else if (key == "lo_window") cfg.extractor.lo_window = parse_int(key, v);
    else if (key == "hi_window") cfg.extractor.hi_window = parse_int(key, v);
    else if (key == "extractor_manifest") cfg.extractor.manifest = v;
    else if (key == "mask_enabled") cfg.mask_enabled = parse_bool(key, v);
    else if (key == "angle_enabled") cfg.angle_enabled = parse_bool(key, v);
    else if (key == "update_enabled") cfg.update_enabled = parse_bool(key, v);
    else if (key == "mask_band_lo") cfg.mask_band_lo = parse_int(key, v);
    else if (key == "mask_band_hi") cfg.mask_band_hi = parse_int(key, v);
    else if (key == "mask_lo") cfg.mask_lo = parse_bool(key, v);
    else if (key == "mask_hi") cfg.mask_hi = parse_bool(key, v);
    else if (key == "min_scale") cfg.min_scale = real();
    else if (key == "max_scale") cfg.max_scale = real();
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

std::map<std::string, std::string> parse_key_values(const std::string& text, std::string* rest) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::size_t consumed = 0;
    while (std::getline(in, line)) {
        const std::size_t line_len = line.size() + 1;
        std::string body = line;
        const auto hash = body.find('#');
        if (hash != std::string::npos) body.erase(hash);
        body = trim(body);
        if (body.empty()) {
            consumed += line_len;
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            if (rest) {
                *rest = text.substr(std::min(consumed, text.size()));
                return out;
            }
            throw std::invalid_argument("expected 'key = value', got '" + body + "'");
        }
        const std::string key = trim(body.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("empty key in '" + body + "'");
        out[key] = trim(body.substr(eq + 1));
        consumed += line_len;
    }
    if (rest) rest->clear();
    return out;
}

TrackerConfig parse_config(const std::string& text) {
    TrackerConfig cfg;
    for (const auto& [k, v] : parse_key_values(text)) apply_setting(cfg, k, v);
    cfg.validate();
    return cfg;
}

TrackerConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config " + path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const TrackerConfig& c) {
    std::ostringstream o;
    o << std::setprecision(17);
    auto b = [](bool v) { return v ? "true" : "false"; };
    o << "M = " << c.M << "\nN = " << c.N << "\nscale_step = " << c.scale_step << "\nangle_step = " << c.angle_step
      << "\nangle_penalty = " << c.angle_penalty << "\nscale_penalty = " << c.scale_penalty << "\nth_r = " << c.th_r
      << "\nlambda_S = " << c.lambda_S << "\nlambda_U = " << c.lambda_U << "\nwindow_weight = " << c.window_weight
      << "\nfusion_weight_lo = " << c.fusion_weight_lo << "\nfusion_weight_hi = " << c.fusion_weight_hi
      << "\nupsample = " << c.upsample << "\npenalty_before_window = " << b(c.penalty_before_window) << "\ncenter_template = " << b(c.center_template)
      << "\nnormalized_correlation = " << b(c.normalized_correlation) << "\nscore_sharpness = " << c.score_sharpness
      << "\nextractor = " << to_string(c.extractor.kind) << "\nextractor_seed = " << c.extractor.seed
      << "\nconv1_channels = " << c.extractor.conv1_channels << "\nconv2_channels = " << c.extractor.conv2_channels
      << "\nconv3_channels = " << c.extractor.conv3_channels << "\nlo_window = " << c.extractor.lo_window
      << "\nhi_window = " << c.extractor.hi_window;
    if (!c.extractor.manifest.empty()) o << "\nextractor_manifest = " << c.extractor.manifest.string();
    o << "\nmask_enabled = " << b(c.mask_enabled) << "\nangle_enabled = " << b(c.angle_enabled)
      << "\nupdate_enabled = " << b(c.update_enabled) << "\nmask_band_lo = " << c.mask_band_lo
      << "\nmask_band_hi = " << c.mask_band_hi << "\nmask_lo = " << b(c.mask_lo) << "\nmask_hi = " << b(c.mask_hi)
      << "\nmin_scale = " << c.min_scale << "\nmax_scale = " << c.max_scale << '\n';
    return o.str();
}

}  // namespace rotsiam

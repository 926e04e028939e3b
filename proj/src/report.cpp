#include "gbpi/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

namespace gbpi {

void check_config(const RunConfig& cfg) {
    if (cfg.bins < 1) throw ConfigError("bin count must be at least 1");
    if (!(cfg.lo < cfg.hi)) throw ConfigError("range needs LO < HI");
    if (cfg.bounds.depth == 0) throw ConfigError("depth must be positive");
    if (cfg.bounds.linear.splits_expr < 1 || cfg.bounds.interval.splits_var < 1)
        throw ConfigError("split counts must be positive");
    if (cfg.samples == 0) throw ConfigError("sample count must be positive");
}

std::pair<Rational, Rational> parse_range(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("range must look like LO:HI");
    try {
        return {parse_decimal(text.substr(0, colon)), parse_decimal(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ConfigError("range must look like LO:HI, got '" + text + "'");
    }
}

namespace {

std::string down(const Rational& q) { return shortest_repr(to_double_down(q)); }
std::string up(const ExtReal& q) { return shortest_repr(q.up()); }
std::string up(const Rational& q) { return shortest_repr(to_double_up(q)); }

}  // namespace

std::string bounds_csv(const BinnedBounds& b) {
    std::ostringstream os;
    os << "bin_lo,bin_hi,unnorm_lb,unnorm_ub,norm_lb,norm_ub\n";
    for (const auto& r : b.bins) {
        auto [lo, hi] = outward(r.bin.range);
        os << shortest_repr(lo) << ',' << shortest_repr(hi) << ',' << down(r.lb) << ',' << up(r.ub) << ','
           << down(r.norm_lb) << ',' << up(r.norm_ub) << '\n';
    }
    os << "Z,," << down(b.z_lb) << ',' << up(b.z_ub) << ",,\n";
    return os.str();
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double number(const std::string& s, int line) {
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    try {
        std::size_t used = 0;
        double d = std::stod(s, &used);
        if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
    throw CsvError("line " + std::to_string(line) + ": bad number '" + s + "'");
}

}  // namespace

CsvBounds read_bounds_csv(std::istream& in) {
    CsvBounds out;
    std::string line;
    if (!std::getline(in, line) || line.rfind("bin_lo,bin_hi,unnorm_lb,unnorm_ub,norm_lb,norm_ub", 0) != 0)
        throw CsvError("missing bounds header");
    int n = 1;
    bool z = false;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        auto f = split_commas(line);
        if (f.size() != 6) throw CsvError("line " + std::to_string(n) + ": expected 6 fields");
        if (f[0] == "Z") {
            out.z_lb = number(f[2], n);
            out.z_ub = number(f[3], n);
            z = true;
            continue;
        }
        out.bins.push_back(CsvRow{number(f[0], n), number(f[1], n), number(f[2], n), number(f[3], n), number(f[4], n),
                                  number(f[5], n)});
    }
    if (!z) throw CsvError("missing Z row");
    if (out.bins.empty()) throw CsvError("no bins");
    return out;
}

std::string render_svg(const CsvBounds& b) {
    constexpr double kW = 640, kH = 360, kMargin = 40;
    const double plot_w = kW - 2 * kMargin, plot_h = kH - 2 * kMargin;
    double top = 0;
    for (const auto& r : b.bins) top = std::max(top, std::min(1.0, r.norm_ub));
    if (top <= 0) top = 1;
    const double bw = plot_w / static_cast<double>(b.bins.size());
    auto y = [&](double v) { return kMargin + plot_h * (1 - std::min(v, top) / top); };
    char buf[256];
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\" viewBox=\"0 0 640 360\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"360\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", kMargin,
                  kH - kMargin, kW - kMargin, kH - kMargin);
    os << buf;
    std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", kMargin,
                  kMargin, kMargin, kH - kMargin);
    os << buf;
    for (std::size_t i = 0; i < b.bins.size(); ++i) {
        const auto& r = b.bins[i];
        double x = kMargin + bw * static_cast<double>(i);
        double ylb = y(r.norm_lb), yub = y(r.norm_ub);
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#4a78b0\" stroke=\"none\"/>\n",
                      x + 0.1 * bw, ylb, 0.8 * bw, kH - kMargin - ylb);
        os << buf;
        double cx = x + 0.5 * bw;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#b03a2e\" stroke-width=\"1.5\"/>\n"
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#b03a2e\" stroke-width=\"1.5\"/>\n",
                      cx, ylb, cx, yub, x + 0.3 * bw, yub, x + 0.7 * bw, yub);
        os << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" font-family=\"sans-serif\">%s</text>\n"
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">%s</text>\n",
                  kMargin, kH - kMargin + 16, shortest_repr(b.bins.front().bin_lo).c_str(), kW - kMargin,
                  kH - kMargin + 16, shortest_repr(b.bins.back().bin_hi).c_str());
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">%s</text>\n",
                  kMargin - 4, kMargin + 4, shortest_repr(top).c_str());
    os << buf;
    os << "</svg>\n";
    return os.str();
}

std::vector<WeightedSample> read_sample_file(std::istream& in) {
    std::vector<WeightedSample> out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        double v = 0, w = 1;
        if (!(ls >> v)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw CsvError("sample file line " + std::to_string(n) + ": expected value<TAB>weight");
        }
        if (!(ls >> w)) w = 1;
        if (!(w >= 0) || !std::isfinite(v)) throw CsvError("sample file line " + std::to_string(n) + ": bad sample");
        out.push_back({v, w, false});
    }
    if (out.empty()) throw CsvError("sample file has no samples");
    return out;
}

namespace {

bool in_bin(double v, const Bin& b) {
    if (std::isnan(v)) return false;
    return b.contains(Rational(v));
}

BinCheck judge(std::string label, double est, double sigma, double lb, double ub) {
    BinCheck c{std::move(label), est, sigma, lb, ub, true};
    c.pass = !(est - 3 * sigma > ub) && !(est + 3 * sigma < lb);
    return c;
}

}  // namespace

Validation validate_unnormalized(const BinnedBounds& b, const std::vector<WeightedSample>& s) {
    Validation v;
    const double n = static_cast<double>(s.size());
    double wmax = 0;
    for (const auto& x : s) {
        wmax = std::max(wmax, x.weight);
        if (x.truncated) ++v.truncated;
    }
    auto stats = [&](auto&& pick) {
        double sum = 0, sumsq = 0;
        for (const auto& x : s) {
            double w = pick(x) ? x.weight : 0.0;
            sum += w;
            sumsq += w * w;
        }
        double mean = sum / n;
        double var = std::max(0.0, sumsq / n - mean * mean);
        double se = std::sqrt(var / std::max(1.0, n - 1));
        return std::pair{mean, std::max(se, wmax / n)};
    };
    for (const auto& r : b.bins) {
        auto [est, se] = stats([&](const WeightedSample& x) { return x.weight > 0 && in_bin(x.value, r.bin); });
        v.checks.push_back(judge(r.bin.str(), est, se, to_double_down(r.lb), r.ub.up()));
    }
    auto [z, zse] = stats([](const WeightedSample& x) { return x.weight > 0; });
    v.checks.push_back(judge("Z", z, zse, to_double_down(b.z_lb), b.z_ub.up()));
    for (const auto& c : v.checks) v.pass = v.pass && c.pass;
    return v;
}

Validation validate_normalized(const BinnedBounds& b, const std::vector<WeightedSample>& s) {
    Validation v;
    v.normalized = true;
    double total = 0, sumsq = 0;
    for (const auto& x : s) {
        total += x.weight;
        sumsq += x.weight * x.weight;
    }
    if (!(total > 0)) throw std::invalid_argument("samples carry no weight");
    const double ess = total * total / sumsq;
    for (const auto& r : b.bins) {
        double in = 0;
        for (const auto& x : s)
            if (in_bin(x.value, r.bin)) in += x.weight;
        double p = in / total;
        double se = std::max(std::sqrt(p * (1 - p) / ess), 1 / ess);
        v.checks.push_back(judge(r.bin.str(), p, se, to_double_down(r.norm_lb), to_double_up(r.norm_ub)));
    }
    for (const auto& c : v.checks) v.pass = v.pass && c.pass;
    return v;
}

std::string validation_report(const Validation& v) {
    std::ostringstream os;
    os << (v.normalized ? "normalized" : "unnormalized") << " check at 3 sigma\n";
    char buf[256];
    for (const auto& c : v.checks) {
        std::snprintf(buf, sizeof buf, "%-24s est %.6g +- %.3g  bounds [%.6g, %.6g]  %s\n", c.label.c_str(), c.estimate,
                      3 * c.sigma, c.lb, c.ub, c.pass ? "ok" : "VIOLATION");
        os << buf;
    }
    if (v.truncated > 0) os << v.truncated << " run(s) hit the step budget and count as weight 0\n";
    os << (v.pass ? "PASS" : "FAIL") << '\n';
    return os.str();
}

}  // namespace gbpi

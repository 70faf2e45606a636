#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gofperm/cli.hpp"

namespace gofperm {

nlohmann::ordered_json error_json(const std::string& kind, const std::string& message) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kResultSchemaVersion;
    doc["error"] = {{"kind", kind}, {"message", message}};
    return doc;
}

nlohmann::ordered_json result_json(const RunConfig& config, const Dataset& data,
                                   const GofTestResult& result,
                                   const std::vector<Statistic>& statistics) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kResultSchemaVersion;
    doc["input"] = config.example.empty() ? config.input_path : "example:" + config.example;
    doc["response"] = config.response;
    doc["covariates"] = config.covariates;
    doc["n"] = data.n();
    doc["p"] = data.p();
    doc["target"] = result.spec.ordering.label(data.column_names());
    doc["method"] = result.spec.method.name();
    doc["K"] = result.spec.n_perms;
    doc["seed"] = result.spec.master_seed;
    doc["exhaustive"] = result.exhaustive;
    doc["order_by_original"] = result.spec.order_by_original;

    const Statistic primary = statistics.front();
    doc["statistic"] = to_string(primary);
    doc["t_observed"] = result.outcome(primary).observed;
    doc["p_value"] = result.outcome(primary).p_value;

    auto results = nlohmann::ordered_json::array();
    for (Statistic s : statistics) {
        nlohmann::ordered_json r;
        r["statistic"] = to_string(s);
        r["t_observed"] = result.outcome(s).observed;
        r["p_value"] = result.outcome(s).p_value;
        results.push_back(std::move(r));
    }
    doc["results"] = std::move(results);

    nlohmann::ordered_json coef;
    const auto& names = data.column_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        coef[names[j]] = result.observed_fit.theta_hat[static_cast<Eigen::Index>(j)];
    }
    doc["coefficients"] = std::move(coef);
    doc["sigma_hat"] = result.observed_fit.sigma_hat;
    doc["traces"] = result.replicate_traces.size();
    return doc;
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<double> ticks(double lo, double hi, int target = 6) {
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return out;
}

struct Frame {
    double xmin, xmax, ymin, ymax;
    [[nodiscard]] double px(double x) const { return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight); }
    [[nodiscard]] double py(double y) const {
        return kTop + (ymax - y) / (ymax - ymin) * (kHeight - kTop - kBottom);
    }
};

std::string step_path(const ResidualProcess& proc, const Frame& f) {
    std::string d = "M" + fmt(f.px(f.xmin)) + ' ' + fmt(f.py(0.0));
    for (std::size_t j = 0; j < proc.size(); ++j) {
        d += "H" + fmt(f.px(proc.keys[j]));
        d += "V" + fmt(f.py(proc.cum[j]));
    }
    d += "H" + fmt(f.px(f.xmax));
    return d;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const GofTestResult& result, const std::string& key_label, Statistic annotated) {
    std::vector<const ResidualProcess*> all{&result.observed_process};
    for (const auto& t : result.replicate_traces) all.push_back(&t);

    Frame f{0.0, 0.0, 0.0, 0.0};
    bool first = true;
    for (const auto* proc : all) {
        for (std::size_t j = 0; j < proc->size(); ++j) {
            if (first) {
                f.xmin = f.xmax = proc->keys[j];
                first = false;
            }
            f.xmin = std::min(f.xmin, proc->keys[j]);
            f.xmax = std::max(f.xmax, proc->keys[j]);
            f.ymin = std::min(f.ymin, proc->cum[j]);
            f.ymax = std::max(f.ymax, proc->cum[j]);
        }
    }
    const double xpad = std::max(1e-9, 0.03 * (f.xmax - f.xmin));
    const double ypad = std::max(1e-9, 0.08 * (f.ymax - f.ymin));
    f.xmin -= xpad;
    f.xmax += xpad;
    f.ymin -= ypad;
    f.ymax += ypad;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // axes and grid
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kTop, y1 = kHeight - kBottom;
    svg << "<g stroke=\"#e5e5e5\" stroke-width=\"1\">\n";
    for (double t : ticks(f.ymin, f.ymax)) {
        svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(f.py(t)) << "\" x2=\"" << fmt(x1) << "\" y2=\""
            << fmt(f.py(t)) << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(f.py(0.0)) << "\" x2=\"" << fmt(x1) << "\" y2=\""
        << fmt(f.py(0.0)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
        << fmt(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(f.xmin, f.xmax)) {
        svg << "<text x=\"" << fmt(f.px(t)) << "\" y=\"" << fmt(y1 + 16) << "\" text-anchor=\"middle\">"
            << fmt(t, "%g") << "</text>\n";
    }
    for (double t : ticks(f.ymin, f.ymax)) {
        svg << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(f.py(t) + 4) << "\" text-anchor=\"end\">"
            << fmt(t, "%g") << "</text>\n";
    }
    svg << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(kHeight - 14)
        << "\" text-anchor=\"middle\">" << escape_xml(key_label) << "</text>\n";
    svg << "<text transform=\"translate(18," << fmt((y0 + y1) / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">cumulative standardized residuals</text>\n";

    svg << "<g fill=\"none\" stroke=\"#9a9a9a\" stroke-opacity=\"0.35\" stroke-width=\"0.8\">\n";
    for (const auto& t : result.replicate_traces) svg << "<path d=\"" << step_path(t, f) << "\"/>\n";
    svg << "</g>\n";
    svg << "<path d=\"" << step_path(result.observed_process, f)
        << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";

    const auto& o = result.outcome(annotated);
    svg << "<text x=\"" << fmt(x0) << "\" y=\"" << fmt(y0 - 12) << "\" font-size=\"14\">"
        << escape_xml(result.spec.ordering.kind == OrderingKey::Kind::FullModel ? "full model check"
                                                                                 : "partial model check")
        << ": p = " << fmt(o.p_value, "%.4g") << " (" << to_string(annotated) << ", "
        << result.spec.method.name() << ", K = " << result.spec.n_perms << ")</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string study_csv(const MCResult& result) {
    std::ostringstream out;
    out << "scenario,statistic,alpha,rate,stderr,n_reps\n";
    const std::string name = to_string(result.scenario.family);
    for (Statistic s : {Statistic::KS, Statistic::CvM}) {
        for (std::size_t a = 0; a < result.alphas.size(); ++a) {
            out << name << ',' << to_string(s) << ',' << format_shortest(result.alphas[a]) << ','
                << format_shortest(result.rate(s, a)) << ',' << format_shortest(result.stderr_of(s, a)) << ','
                << result.n_reps << '\n';
        }
    }
    return out.str();
}

nlohmann::ordered_json study_json(const MCResult& result, const StudyConfig& config) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kResultSchemaVersion;
    doc["family"] = to_string(result.scenario.family);
    doc["n"] = result.scenario.n;
    doc["params"] = result.scenario.params;
    doc["seed"] = result.scenario.seed;
    doc["target"] = config.target;
    doc["method"] = result.test.method.name();
    doc["K"] = result.test.n_perms;
    doc["n_reps"] = result.n_reps;
    doc["alphas"] = result.alphas;
    auto rows = nlohmann::ordered_json::array();
    for (Statistic s : {Statistic::KS, Statistic::CvM}) {
        for (std::size_t a = 0; a < result.alphas.size(); ++a) {
            rows.push_back({{"statistic", to_string(s)},
                            {"alpha", result.alphas[a]},
                            {"rate", result.rate(s, a)},
                            {"stderr", result.stderr_of(s, a)}});
        }
    }
    doc["rejection_rates"] = std::move(rows);
    return doc;
}

}  // namespace gofperm

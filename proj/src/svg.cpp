#include "journeymap/svg.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <string_view>

#include "journeymap/error.hpp"

namespace journey {

namespace {

constexpr std::array<std::string_view, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                       "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(std::string_view text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::string render_scatter(const Embedding& embedding, const std::vector<std::size_t>& clusters,
                           const std::vector<int>& outcomes, const std::vector<std::size_t>& medoids,
                           const ScatterStyle& style) {
    const std::size_t n = embedding.xy.size();
    if (clusters.size() != n || outcomes.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "scatter annotations do not match the embedding size");
    }
    double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [x, y] = embedding.xy[i];
        if (i == 0) {
            min_x = max_x = x;
            min_y = max_y = y;
        }
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    }
    const double span_x = max_x - min_x > 0 ? max_x - min_x : 1.0;
    const double span_y = max_y - min_y > 0 ? max_y - min_y : 1.0;
    const double plot_w = style.width - 2.0 * style.margin;
    const double plot_h = style.height - 2.0 * style.margin;
    auto px = [&](double x) { return style.margin + (x - min_x) / span_x * plot_w; };
    // SVG y grows downwards.
    auto py = [&](double y) { return style.height - style.margin - (y - min_y) / span_y * plot_h; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) + "\" height=\"" +
           std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
           std::to_string(style.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + std::to_string(style.margin) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" +
           escape(style.title) + "</text>\n";
    out += "<rect x=\"" + std::to_string(style.margin) + "\" y=\"" + std::to_string(style.margin) + "\" width=\"" +
           fmt(plot_w) + "\" height=\"" + fmt(plot_h) + "\" fill=\"none\" stroke=\"#cccccc\"/>\n";

    for (std::size_t i = 0; i < n; ++i) {
        const bool is_medoid = std::find(medoids.begin(), medoids.end(), i) != medoids.end();
        const auto colour = kPalette[clusters[i] % kPalette.size()];
        const std::string stroke = is_medoid ? "stroke=\"black\" stroke-width=\"2.5\"" : "stroke=\"white\" stroke-width=\"0.8\"";
        const double r = is_medoid ? 7.0 : 5.0;
        const double x = px(embedding.xy[i][0]);
        const double y = py(embedding.xy[i][1]);
        const std::string title = "<title>" + escape(embedding.ids[i]) + " cluster " + std::to_string(clusters[i]) +
                                  (outcomes[i] == 1 ? " purchase" : " non-purchase") + "</title>";
        if (outcomes[i] == 1) {
            out += "<circle class=\"pt\" cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"" + fmt(r) + "\" fill=\"" +
                   std::string(colour) + "\" " + stroke + ">" + title + "</circle>\n";
        } else {
            out += "<rect class=\"pt\" x=\"" + fmt(x - r) + "\" y=\"" + fmt(y - r) + "\" width=\"" + fmt(2 * r) +
                   "\" height=\"" + fmt(2 * r) + "\" fill=\"" + std::string(colour) + "\" " + stroke + ">" + title +
                   "</rect>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace journey

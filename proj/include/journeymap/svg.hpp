#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "journeymap/embedding.hpp"

namespace journey {

struct ScatterStyle {
    int width = 640;
    int height = 520;
    int margin = 40;
    std::string title = "Journey clusters (classical MDS)";
};

/// Standalone SVG scatter: one marker per row, fill colour by cluster, circle
/// for purchase and square for non-purchase, medoids drawn with a thick
/// outline. Coordinates are printed with fixed precision so reruns match byte
/// for byte.
std::string render_scatter(const Embedding& embedding, const std::vector<std::size_t>& clusters,
                           const std::vector<int>& outcomes, const std::vector<std::size_t>& medoids,
                           const ScatterStyle& style = {});

}  // namespace journey

#include "tmwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tmwave/errors.hpp"

namespace tmwave {

double Mesh1D::min_element_length() const {
    double m = std::numeric_limits<double>::infinity();
    for (int e = 0; e < n_elements(); ++e) m = std::min(m, element_length(e));
    return m;
}

double Mesh1D::max_element_length() const {
    double m = 0.0;
    for (int e = 0; e < n_elements(); ++e) m = std::max(m, element_length(e));
    return m;
}

int Mesh1D::locate(double x) const {
    const double tol = 1e-12 * (right - left);
    if (x < left - tol || x > right + tol)
        throw OutOfDomainError("evaluate: point outside the mesh interval");
    if (x <= vertices.front()) return 0;
    if (x >= vertices.back()) return n_elements() - 1;
    // first vertex >= x, then take the element ending there (left limit)
    auto it = std::lower_bound(vertices.begin() + 1, vertices.end(), x);
    return static_cast<int>(it - vertices.begin()) - 1;
}

bool Mesh1D::has_vertex(double x, double tol) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), x - tol);
    return it != vertices.end() && std::abs(*it - x) <= tol;
}

Mesh1D build_mesh(double left, double right, int n_elements,
                  std::span<const double> required_vertices) {
    if (!(left < right)) throw ValidationError("build_mesh: requires left < right");
    if (n_elements < 1) throw ValidationError("build_mesh: requires n_elements >= 1");

    std::vector<double> anchors;
    anchors.push_back(left);
    std::vector<double> req(required_vertices.begin(), required_vertices.end());
    std::sort(req.begin(), req.end());
    const double tol = 1e-12 * (right - left);
    for (double v : req) {
        if (v <= left + tol || v >= right - tol)
            throw ValidationError("build_mesh: required vertex outside the open interval");
        if (std::abs(v - anchors.back()) > tol) anchors.push_back(v);
    }
    anchors.push_back(right);

    const int n_gaps = static_cast<int>(anchors.size()) - 1;
    if (n_elements < n_gaps)
        throw TooFewElementsError("build_mesh: fewer elements than required segments");

    const double h_target = (right - left) / n_elements;
    std::vector<int> counts(n_gaps);
    int total = 0;
    for (int g = 0; g < n_gaps; ++g) {
        const double len = anchors[g + 1] - anchors[g];
        counts[g] = std::max(1, static_cast<int>(std::llround(len / h_target)));
        total += counts[g];
    }
    // Rebalance to hit the exact element budget, always adjusting the gap
    // whose local element length deviates most from the target.
    while (total != n_elements) {
        if (total < n_elements) {
            int best = 0;
            double best_len = -1.0;
            for (int g = 0; g < n_gaps; ++g) {
                const double len = (anchors[g + 1] - anchors[g]) / counts[g];
                if (len > best_len) {
                    best_len = len;
                    best = g;
                }
            }
            ++counts[best];
            ++total;
        } else {
            int best = -1;
            double best_len = std::numeric_limits<double>::infinity();
            for (int g = 0; g < n_gaps; ++g) {
                if (counts[g] <= 1) continue;
                const double len = (anchors[g + 1] - anchors[g]) / counts[g];
                if (len < best_len) {
                    best_len = len;
                    best = g;
                }
            }
            if (best < 0) throw TooFewElementsError("build_mesh: cannot reduce element count");
            --counts[best];
            --total;
        }
    }

    Mesh1D mesh;
    mesh.left = left;
    mesh.right = right;
    mesh.vertices.reserve(n_elements + 1);
    for (int g = 0; g < n_gaps; ++g) {
        const double a = anchors[g], b = anchors[g + 1];
        for (int k = 0; k < counts[g]; ++k)
            mesh.vertices.push_back(a + (b - a) * k / counts[g]);
    }
    mesh.vertices.push_back(right);
    return mesh;
}

}  // namespace tmwave

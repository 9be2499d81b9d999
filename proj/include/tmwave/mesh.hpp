#pragma once

#include <span>
#include <vector>

namespace tmwave {

/// Partition of an interval into elements.
struct Mesh1D {
    double left = 0.0;
    double right = 1.0;
    std::vector<double> vertices;  // strictly increasing, vertices.front() == left, back() == right

    [[nodiscard]] int n_elements() const { return static_cast<int>(vertices.size()) - 1; }
    [[nodiscard]] double element_left(int e) const { return vertices[e]; }
    [[nodiscard]] double element_length(int e) const { return vertices[e + 1] - vertices[e]; }
    [[nodiscard]] double min_element_length() const;
    [[nodiscard]] double max_element_length() const;

    /// Element containing x. At interior vertices the left element is
    /// returned (left-limit convention). Throws OutOfDomainError.
    [[nodiscard]] int locate(double x) const;

    [[nodiscard]] bool has_vertex(double x, double tol = 1e-12) const;
};

/// Build a quasi-uniform mesh of n_elements elements that contains every
/// entry of required_vertices as an element boundary. Each gap between
/// consecutive anchors is subdivided uniformly; element counts per gap
/// are balanced so lengths stay close to (right-left)/n_elements.
Mesh1D build_mesh(double left, double right, int n_elements,
                  std::span<const double> required_vertices = {});

}  // namespace tmwave

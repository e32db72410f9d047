#include "strata/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace strata {

std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
    std::vector<Vec2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;

    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && orient(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) return {pts.front(), pts.back()};
    return hull;
}

double polygon_area(std::span<const Vec2> polygon) {
    double twice = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const auto& a = polygon[i];
        const auto& b = polygon[(i + 1) % polygon.size()];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

double polygon_perimeter(std::span<const Vec2> polygon) {
    double total = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) total += (polygon[(i + 1) % polygon.size()] - polygon[i]).norm();
    return total;
}

namespace {

// Ring rotated to start at the vertex of smallest polar angle about its
// centroid, with each vertex's normalised arclength position in [0, 1).
struct Ring {
    std::vector<Vec2> points;
    std::vector<double> param;
};

Ring prepare_ring(std::span<const Vec2> hull) {
    Vec2 centroid;
    for (const auto& p : hull) centroid += p;
    centroid = centroid * (1.0 / static_cast<double>(hull.size()));
    std::size_t start = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        double angle = std::atan2(hull[i].y - centroid.y, hull[i].x - centroid.x);
        if (angle < 0.0) angle += 2.0 * std::numbers::pi;
        if (i == 0 || angle < best) {
            best = angle;
            start = i;
        }
    }
    Ring ring;
    for (std::size_t i = 0; i < hull.size(); ++i) ring.points.push_back(hull[(start + i) % hull.size()]);
    const double perimeter = polygon_perimeter(ring.points);
    double run = 0.0;
    for (std::size_t i = 0; i < ring.points.size(); ++i) {
        ring.param.push_back(perimeter > 0.0 ? run / perimeter : 0.0);
        run += (ring.points[(i + 1) % ring.points.size()] - ring.points[i]).norm();
    }
    return ring;
}

}  // namespace

DeltaCone delta_cone(std::span<const Vec2> parent_hull, double z_parent, std::span<const Vec2> child_hull,
                     double z_child) {
    if (parent_hull.size() < 3 || child_hull.size() < 3)
        throw Error(ErrorCode::DegenerateHull, "delta cones need two polygons with at least three vertices");
    if (!(z_child > z_parent)) throw Error(ErrorCode::InvalidConfig, "child outline must sit above the parent");

    const Ring lower = prepare_ring(parent_hull);
    const Ring upper = prepare_ring(child_hull);
    const std::size_t n1 = lower.points.size();
    const std::size_t n2 = upper.points.size();

    DeltaCone cone;
    cone.parent_ring = n1;
    cone.child_ring = n2;
    for (const auto& p : lower.points) cone.vertices.push_back({p.x, p.y, z_parent});
    for (const auto& p : upper.points) cone.vertices.push_back({p.x, p.y, z_child});

    auto lower_index = [&](std::size_t i) { return static_cast<std::uint32_t>(i % n1); };
    auto upper_index = [&](std::size_t j) { return static_cast<std::uint32_t>(n1 + j % n2); };
    auto next_param = [](const Ring& ring, std::size_t i) { return i + 1 < ring.param.size() ? ring.param[i + 1] : 1.0; };

    std::size_t i = 0;
    std::size_t j = 0;
    while (i < n1 || j < n2) {
        const bool advance_lower = j == n2 || (i < n1 && next_param(lower, i) <= next_param(upper, j));
        if (advance_lower) {
            cone.triangles.push_back({lower_index(i), lower_index(i + 1), upper_index(j)});
            ++i;
        } else {
            cone.triangles.push_back({lower_index(i), upper_index(j + 1), upper_index(j)});
            ++j;
        }
    }
    return cone;
}

}  // namespace strata

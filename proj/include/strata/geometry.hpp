#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "strata/core.hpp"

namespace strata {

// Twice the signed area of triangle (o, a, b); positive when counter-clockwise.
inline double orient(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Monotone-chain hull, counter-clockwise, collinear boundary points dropped.
// Degenerate inputs return a single point or the two endpoints of a segment.
std::vector<Vec2> convex_hull(std::span<const Vec2> points);

double polygon_area(std::span<const Vec2> polygon);
double polygon_perimeter(std::span<const Vec2> polygon);

// Triangulated side surface joining a parent outline at `z_parent` to a child
// outline at `z_child`. Vertices hold the parent ring followed by the child ring;
// the rings are matched by normalised arclength, giving exactly
// |parent| + |child| triangles.
struct DeltaCone {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::size_t parent_ring = 0;
    std::size_t child_ring = 0;
};

DeltaCone delta_cone(std::span<const Vec2> parent_hull, double z_parent, std::span<const Vec2> child_hull,
                     double z_child);

}  // namespace strata

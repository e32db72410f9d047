#include "strata/layout_engine.hpp"

#include <algorithm>
#include <numbers>
#include <thread>

#include "strata/random.hpp"
#include "strata/temporal.hpp"

namespace strata {

namespace {

constexpr std::size_t kWarmStartNeighbours = 5;
constexpr double kWarmStartRadius = 0.1;
constexpr std::size_t kParallelMinNodes = 256;

}  // namespace

void PhysicsConfig::validate() const {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidConfig, "dt must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw Error(ErrorCode::InvalidConfig, "damping must be in (0, 1]");
    if (!(beta >= 1.0)) throw Error(ErrorCode::InvalidConfig, "beta must be at least 1");
    if (!(repulsion_strength > 0.0)) throw Error(ErrorCode::InvalidConfig, "repulsion_strength must be positive");
    if (!(repulsion_floor > 0.0)) throw Error(ErrorCode::InvalidConfig, "repulsion_floor must be positive");
    if (!(max_speed > 0.0)) throw Error(ErrorCode::InvalidConfig, "max_speed must be positive");
    if (!(base_mass > 0.0)) throw Error(ErrorCode::InvalidConfig, "base_mass must be positive");
}

double repulsive_force_magnitude(double d_current, const PhysicsConfig& cfg) {
    const double d = std::max(d_current, cfg.repulsion_floor);
    return cfg.repulsion_strength / (d * d);
}

double effective_mass(double base_mass, double beta, int b_initial, int b_current) {
    return base_mass * std::pow(beta, b_current - b_initial);
}

LayoutEngine::LayoutEngine(PhysicsConfig physics, ThresholdPolicy policy, double c_constant, double z_spacing)
    : physics_(physics), z_spacing_(z_spacing), graph_(c_constant, policy), rng_state_(physics.seed) {
    physics_.validate();
    if (!(z_spacing > 0.0)) throw Error(ErrorCode::InvalidConfig, "z_spacing must be positive");
}

double LayoutEngine::uniform() { return to_unit_interval(splitmix64(rng_state_)); }

void LayoutEngine::check_batch(int batch_index) const {
    if (batch_index < 0 || batch_index < current_batch_)
        throw Error(ErrorCode::OutOfOrderBatch, "batch " + std::to_string(batch_index) +
                                                    " precedes current batch " + std::to_string(current_batch_));
}

void LayoutEngine::set_current_batch(int batch_index) {
    check_batch(batch_index);
    current_batch_ = batch_index;
}

Vec2 LayoutEngine::warm_start_centre(std::size_t node, std::size_t existing) const {
    if (existing == 0) return {};
    std::vector<std::size_t> order(existing);
    for (std::size_t i = 0; i < existing; ++i) order[i] = i;
    const std::size_t k = std::min(kWarmStartNeighbours, existing);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          const double sa = graph_.similarity(node, a);
                          const double sb = graph_.similarity(node, b);
                          return sa != sb ? sa > sb : a < b;
                      });
    Vec2 weighted;
    Vec2 plain;
    double weight = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
        const auto& p = nodes_[order[r]].position;
        const double w = std::max(graph_.similarity(node, order[r]), 0.0);
        weighted += Vec2{p.x, p.y} * w;
        plain += Vec2{p.x, p.y};
        weight += w;
    }
    if (weight > 0.0) return weighted * (1.0 / weight);
    return plain * (1.0 / static_cast<double>(k));
}

void LayoutEngine::insert_batch(std::span<const DataRecord> records, int batch_index) {
    check_batch(batch_index);
    const std::size_t existing = nodes_.size();
    graph_.extend(records);
    std::vector<Vec2> xy;
    xy.reserve(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        const Vec2 centre = warm_start_centre(existing + r, existing);
        const double radius = kWarmStartRadius * std::sqrt(uniform());
        const double angle = 2.0 * std::numbers::pi * uniform();
        xy.push_back(centre + Vec2{radius * std::cos(angle), radius * std::sin(angle)});
    }
    for (std::size_t r = 0; r < records.size(); ++r) {
        LayoutNode node;
        node.record_id = records[r].id;
        node.position = {xy[r].x, xy[r].y, z_coordinate(batch_index, z_spacing_)};
        node.base_mass = physics_.base_mass;
        node.batch_index = batch_index;
        nodes_.push_back(std::move(node));
    }
    current_batch_ = batch_index;
}

void LayoutEngine::insert_batch_at(std::span<const DataRecord> records, int batch_index, std::span<const Vec2> xy) {
    if (xy.size() != records.size())
        throw Error(ErrorCode::InvalidConfig, "one position per inserted record is required");
    check_batch(batch_index);
    graph_.extend(records);
    for (std::size_t r = 0; r < records.size(); ++r) {
        LayoutNode node;
        node.record_id = records[r].id;
        node.position = {xy[r].x, xy[r].y, z_coordinate(batch_index, z_spacing_)};
        node.base_mass = physics_.base_mass;
        node.batch_index = batch_index;
        nodes_.push_back(std::move(node));
    }
    current_batch_ = batch_index;
}

Vec2 LayoutEngine::coincident_direction(std::size_t i, std::size_t j) const {
    const std::size_t lo = std::min(i, j);
    const std::size_t hi = std::max(i, j);
    std::uint64_t state = physics_.seed ^ (static_cast<std::uint64_t>(lo) * 0x9E3779B97F4A7C15ull) ^
                          (static_cast<std::uint64_t>(hi) * 0xC2B2AE3D27D4EB4Full) ^
                          (step_count_ * 0x165667B19E3779F9ull);
    const double angle = 2.0 * std::numbers::pi * to_unit_interval(splitmix64(state));
    const Vec2 dir{std::cos(angle), std::sin(angle)};
    return i == lo ? dir : dir * -1.0;
}

void LayoutEngine::accumulate_rows(std::size_t begin, std::size_t end, std::vector<Vec2>& forces,
                                   std::vector<double>& stress) const {
    const std::size_t n = nodes_.size();
    for (std::size_t i = begin; i < end; ++i) {
        const auto sim = graph_.similarity_row(i);
        const auto attract = graph_.attractive_row(i);
        const double xi = nodes_[i].position.x;
        const double yi = nodes_[i].position.y;
        double fx = 0.0;
        double fy = 0.0;
        double row_stress = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dx = xi - nodes_[j].position.x;
            const double dy = yi - nodes_[j].position.y;
            const double d = std::sqrt(dx * dx + dy * dy);
            double ux;
            double uy;
            if (d < physics_.repulsion_floor) {
                const Vec2 dir = coincident_direction(i, j);
                ux = dir.x;
                uy = dir.y;
            } else {
                ux = dx / d;
                uy = dy / d;
            }
            double magnitude;
            if (attract[j]) {
                const double s = sim[j];
                const double error = (1.0 - s) - d;
                magnitude = spring_force_magnitude(s, 1.0 - s, d);
                row_stress += error * error;
            } else {
                magnitude = repulsive_force_magnitude(d, physics_);
            }
            fx += ux * magnitude;
            fy += uy * magnitude;
        }
        forces[i] = {fx, fy};
        stress[i] = row_stress;
    }
}

StepReport LayoutEngine::step() {
    StepReport report;
    const std::size_t n = nodes_.size();
    if (n == 0) return report;

    std::vector<Vec2> forces(n);
    std::vector<double> stress(n, 0.0);
    const unsigned workers = std::max(1u, physics_.threads);
    if (workers > 1 && n >= kParallelMinNodes) {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([this, begin, end, &forces, &stress] { accumulate_rows(begin, end, forces, stress); });
        }
    } else {
        accumulate_rows(0, n, forces, stress);
    }

    double stress_sum = 0.0;
    for (double s : stress) stress_sum += s;
    report.total_stress = 0.5 * stress_sum;

    for (std::size_t i = 0; i < n; ++i) {
        auto& node = nodes_[i];
        const double mass = effective_mass_of(i);
        Vec2 v = (node.velocity + forces[i] * (physics_.dt / mass)) * physics_.damping;
        Vec2 disp = v * physics_.dt;
        const double len = disp.norm();
        if (len > physics_.max_speed) {
            disp = disp * (physics_.max_speed / len);
            v = disp * (1.0 / physics_.dt);
        }
        node.velocity = v;
        node.position.x += disp.x;
        node.position.y += disp.y;
        if (!std::isfinite(node.position.x) || !std::isfinite(node.position.y) || !std::isfinite(v.x) ||
            !std::isfinite(v.y))
            throw Error(ErrorCode::NonFiniteState, "node " + node.record_id + " left the finite range");
        report.max_displacement = std::max(report.max_displacement, disp.norm());
    }
    ++step_count_;
    return report;
}

int LayoutEngine::relax(const RelaxStop& stop, const StepObserver& observer) {
    if (nodes_.empty()) return 0;
    int iters = 0;
    while (iters < stop.max_iters) {
        const StepReport report = step();
        ++iters;
        if (observer) observer(report);
        if (report.max_displacement < stop.tol) break;
    }
    return iters;
}

double LayoutEngine::total_stress() const {
    double sum = 0.0;
    for (std::size_t b = 1; b < nodes_.size(); ++b)
        for (std::size_t a = 0; a < b; ++a) {
            if (graph_.classification(a, b) != EdgeClass::Attractive) continue;
            const double dx = nodes_[a].position.x - nodes_[b].position.x;
            const double dy = nodes_[a].position.y - nodes_[b].position.y;
            const double error = (1.0 - graph_.similarity(a, b)) - std::sqrt(dx * dx + dy * dy);
            sum += error * error;
        }
    return sum;
}

double LayoutEngine::effective_mass_of(std::size_t node) const {
    return effective_mass(nodes_[node].base_mass, physics_.beta, nodes_[node].batch_index, current_batch_);
}

}  // namespace strata

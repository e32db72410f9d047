#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "strata/core.hpp"
#include "strata/similarity_graph.hpp"

namespace strata {

struct PhysicsConfig {
    double dt = 0.02;
    double damping = 0.85;  // velocity retained per step
    double beta = 1.618;    // mass growth per batch of age
    double repulsion_strength = 2.0;
    double repulsion_floor = 1e-3;
    double max_speed = 0.5;  // per-step displacement cap
    double base_mass = 1.0;
    std::uint64_t seed = 0;
    unsigned threads = 1;  // force-loop workers; results do not depend on this

    void validate() const;
};

// Hooke spring along the pair axis. Positive pushes the pair apart.
inline double spring_force_magnitude(double k, double d_ideal, double d_current) {
    return k * (d_ideal - d_current);
}

// Inverse-square push with the distance clamped from below. Always positive.
double repulsive_force_magnitude(double d_current, const PhysicsConfig& cfg);

// m0 * beta^(b_current - b_initial).
double effective_mass(double base_mass, double beta, int b_initial, int b_current);

struct StepReport {
    double max_displacement = 0.0;
    double total_stress = 0.0;  // evaluated at the positions the step started from
};

struct RelaxStop {
    int max_iters = 2000;
    double tol = 1e-4;
};

using StepObserver = std::function<void(const StepReport&)>;

// Spring/repulsion simulation over a SimilarityGraph. Positions live in the X-Y
// plane; each node's z is fixed at insertion from its batch index.
class LayoutEngine {
public:
    explicit LayoutEngine(PhysicsConfig physics = {}, ThresholdPolicy policy = ThresholdPolicy::Dynamic,
                          double c_constant = default_threshold_constant(), double z_spacing = 1.0);

    // Adds one batch: extends the graph, warm-starts the new nodes near their
    // most similar existing neighbours and makes `batch_index` current.
    void insert_batch(std::span<const DataRecord> records, int batch_index);
    // Same, with explicit X-Y positions for the new nodes.
    void insert_batch_at(std::span<const DataRecord> records, int batch_index, std::span<const Vec2> xy);
    // Raises the current batch without adding nodes (empty timestep).
    void set_current_batch(int batch_index);

    StepReport step();
    // Steps until the largest displacement drops below `stop.tol` or the
    // iteration budget runs out. Returns the number of steps taken.
    int relax(const RelaxStop& stop, const StepObserver& observer = {});

    // Sum of squared distance errors over attractive edges, in canonical edge order.
    double total_stress() const;
    double effective_mass_of(std::size_t node) const;

    std::size_t size() const { return nodes_.size(); }
    const std::vector<LayoutNode>& nodes() const { return nodes_; }
    // Direct access for tests and state restoration. Never change z.
    std::vector<LayoutNode>& mutable_nodes() { return nodes_; }
    const SimilarityGraph& graph() const { return graph_; }
    const PhysicsConfig& config() const { return physics_; }
    int current_batch() const { return current_batch_; }
    double z_spacing() const { return z_spacing_; }
    std::uint64_t steps_taken() const { return step_count_; }

private:
    void check_batch(int batch_index) const;
    Vec2 warm_start_centre(std::size_t node, std::size_t existing) const;
    void accumulate_rows(std::size_t begin, std::size_t end, std::vector<Vec2>& forces,
                         std::vector<double>& stress) const;
    Vec2 coincident_direction(std::size_t i, std::size_t j) const;
    double uniform();

    PhysicsConfig physics_;
    double z_spacing_;
    SimilarityGraph graph_;
    std::vector<LayoutNode> nodes_;
    int current_batch_ = -1;
    std::uint64_t rng_state_;
    std::uint64_t step_count_ = 0;
};

}  // namespace strata

#include "strata/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "strata/random.hpp"

namespace strata {

namespace {

constexpr std::size_t kTopicWords = 6;
constexpr std::size_t kBranchWords = 2;

const std::array<const char*, 30> kCommonWords = {
    "people", "time",   "news",   "today", "great",  "year",   "world",   "thing", "think", "good",
    "work",   "day",    "week",   "life",  "really", "going",  "know",    "right", "need",  "still",
    "see",    "make",   "best",   "look",  "love",   "every",  "another", "back",  "first", "way"};

const std::array<const char*, 24> kSyllables = {"ka", "lo", "mi", "ra", "ven", "to", "shi", "qua",
                                                "dor", "el", "nu", "bri", "sa", "zen", "pho", "gal",
                                                "ti", "mor", "xe", "lun", "fa", "ri", "kel", "vo"};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() { return splitmix64(state_); }
    double uniform() { return to_unit_interval(next()); }
    std::size_t below(std::size_t bound) { return static_cast<std::size_t>(uniform() * static_cast<double>(bound)); }
    // Box-Muller; std::normal_distribution is not reproducible across standard libraries.
    double gaussian() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
    std::optional<double> spare_;
};

using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize(Vector& v) {
    const double n = std::sqrt(dot(v, v));
    for (double& x : v) x /= n;
}

Vector random_direction(Rng& rng, std::size_t dim) {
    Vector v(dim);
    for (double& x : v) x = rng.gaussian();
    normalize(v);
    return v;
}

// Random unit vector orthogonal to every vector in `basis` (assumed orthonormal).
Vector orthogonal_direction(Rng& rng, std::size_t dim, const std::vector<const Vector*>& basis) {
    Vector v = random_direction(rng, dim);
    for (const Vector* b : basis) {
        const double p = dot(v, *b);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= p * (*b)[i];
    }
    normalize(v);
    return v;
}

Vector rotate(const Vector& from, const Vector& toward, double angle) {
    Vector v(from.size());
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * from[i] + s * toward[i];
    return v;
}

std::string pseudo_word(Rng& rng) {
    std::string w;
    const std::size_t syllables = 2 + rng.below(2);
    for (std::size_t i = 0; i < syllables; ++i) w += kSyllables[rng.below(kSyllables.size())];
    return w;
}

std::vector<std::size_t> allocate(std::size_t total, const std::vector<double>& weights) {
    double sum = 0.0;
    for (double w : weights) sum += w;
    std::vector<std::size_t> counts(weights.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(total) * weights[i] / sum;
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[i];
        remainders.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++counts[remainders[r % remainders.size()].second];
    return counts;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n_points < 1) throw Error(ErrorCode::InvalidConfig, "n_points must be at least 1");
    if (n_topics < 1) throw Error(ErrorCode::InvalidConfig, "n_topics must be at least 1");
    if (dim < 4) throw Error(ErrorCode::InvalidConfig, "dim must be at least 4");
    if (batches < 1) throw Error(ErrorCode::InvalidConfig, "batches must be at least 1");
    if (!(spread >= 0.0)) throw Error(ErrorCode::InvalidConfig, "spread must be non-negative");
    if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0))
        throw Error(ErrorCode::InvalidConfig, "outlier_fraction must be in [0, 1)");
    if (scenario == SyntheticScenario::Split) {
        if (split_batch < 1 || split_batch >= batches)
            throw Error(ErrorCode::InvalidConfig, "split_batch must fall strictly inside the batch range");
        if (!(split_weight > 0.0)) throw Error(ErrorCode::InvalidConfig, "split_weight must be positive");
    }
    timestep.validate();
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t dim = spec.dim;
    const bool split = spec.scenario == SyntheticScenario::Split;

    struct Topic {
        Vector centre;
        Vector drift_axis;
        Vector split_axis;
        std::vector<std::string> words;
        std::array<std::vector<std::string>, 2> branch_words;
    };
    std::vector<Topic> topics(spec.n_topics);
    for (auto& t : topics) {
        t.centre = random_direction(rng, dim);
        t.drift_axis = orthogonal_direction(rng, dim, {&t.centre});
        t.split_axis = orthogonal_direction(rng, dim, {&t.centre, &t.drift_axis});
        for (std::size_t w = 0; w < kTopicWords; ++w) t.words.push_back(pseudo_word(rng));
        for (auto& branch : t.branch_words)
            for (std::size_t w = 0; w < kBranchWords; ++w) branch.push_back(pseudo_word(rng));
    }

    const auto n_outliers = static_cast<std::size_t>(std::llround(spec.outlier_fraction * static_cast<double>(spec.n_points)));
    std::vector<double> weights(spec.n_topics, 1.0);
    if (split) weights[0] = spec.split_weight;
    const auto sizes = allocate(spec.n_points - n_outliers, weights);

    TimestepSpec timestep = spec.timestep;
    timestep.origin = spec.start;

    SyntheticDataset out;
    if (split) {
        out.split_topic = 0;
        out.split_batch = spec.split_batch;
    }

    std::size_t serial = 0;
    auto timestamp_in = [&](int batch) {
        const Instant lo = batch_start(batch, timestep);
        const Instant hi = batch_start(batch + 1, timestep);
        const auto width = (hi - lo).count();
        // The first record sits on the start instant so that an origin inferred
        // from the data reproduces the generator's batch boundaries.
        if (serial == 0) return lo;
        return lo + std::chrono::milliseconds{static_cast<long long>(rng.uniform() * static_cast<double>(width))};
    };
    auto perturb = [&](const Vector& direction) {
        Vector v = direction;
        const double scale = spec.spread / std::sqrt(static_cast<double>(dim));
        for (double& x : v) x += scale * rng.gaussian();
        normalize(v);
        return v;
    };
    auto pick = [&](const std::vector<std::string>& pool, std::size_t count, std::string& text) {
        for (std::size_t i = 0; i < count; ++i) {
            if (!text.empty()) text += ' ';
            text += pool[rng.below(pool.size())];
        }
    };
    auto common_words = [&](std::size_t count, std::string& text) {
        for (std::size_t i = 0; i < count; ++i) {
            if (!text.empty()) text += ' ';
            text += kCommonWords[rng.below(kCommonWords.size())];
        }
    };

    auto emit = [&](Vector embedding, std::string text, int batch, int topic, std::optional<char> branch) {
        DataRecord r;
        r.timestamp = timestamp_in(batch);
        char id[24];
        std::snprintf(id, sizeof id, "r%05zu", serial++);
        r.id = id;
        r.payload = TextPayload{std::move(text)};
        r.embedding = std::move(embedding);
        out.truth.push_back({r.id, topic, branch, batch});
        out.records.push_back(std::move(r));
    };

    const auto batches = static_cast<std::size_t>(spec.batches);
    for (std::size_t t = 0; t < topics.size(); ++t) {
        const auto& topic = topics[t];
        const bool is_split = split && t == 0;
        for (std::size_t j = 0; j < sizes[t]; ++j) {
            const int batch = static_cast<int>(j % batches);
            const Vector centre = rotate(topic.centre, topic.drift_axis, spec.drift * batch);
            std::optional<char> branch;
            Vector direction = centre;
            if (is_split) {
                const int half = static_cast<int>((j / batches) % 2);
                branch = half == 0 ? 'a' : 'b';
                const double angle = batch < spec.split_batch ? spec.split_before : spec.split_after;
                direction = rotate(centre, topic.split_axis, half == 0 ? angle : -angle);
            }
            std::string text;
            pick(topic.words, 4, text);
            if (branch) pick(topic.branch_words[*branch == 'a' ? 0 : 1], 1, text);
            common_words(3, text);
            emit(perturb(direction), std::move(text), batch, static_cast<int>(t), branch);
        }
    }
    for (std::size_t j = 0; j < n_outliers; ++j) {
        std::string text;
        common_words(6, text);
        emit(random_direction(rng, dim), std::move(text), static_cast<int>(j % batches), -1, std::nullopt);
    }

    std::vector<std::size_t> order(out.records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = out.records[a];
        const auto& rb = out.records[b];
        return ra.timestamp != rb.timestamp ? ra.timestamp < rb.timestamp : ra.id < rb.id;
    });
    SyntheticDataset sorted;
    sorted.split_topic = out.split_topic;
    sorted.split_batch = out.split_batch;
    for (std::size_t i : order) {
        sorted.records.push_back(std::move(out.records[i]));
        sorted.truth.push_back(std::move(out.truth[i]));
    }
    return sorted;
}

nlohmann::json ground_truth_to_json(const SyntheticDataset& data) {
    using nlohmann::json;
    json records = json::object();
    for (const auto& t : data.truth) {
        records[t.id] = {{"topic", t.topic},
                         {"branch", t.branch ? json(std::string(1, *t.branch)) : json(nullptr)},
                         {"batch", t.batch}};
    }
    json events = json::array();
    if (data.split_topic)
        events.push_back({{"type", "split"}, {"topic", *data.split_topic}, {"batch", data.split_batch}});
    return {{"records", records}, {"events", events}};
}

}  // namespace strata

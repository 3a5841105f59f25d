#include "divprune/synthetic.hpp"

#include <cmath>
#include <functional>

#include "divprune/rng.hpp"

namespace divprune {

namespace {

// Rejection sampling against a keep predicate; the structured generators use
// it to carve a margin gap around their decision boundaries.
std::vector<double> sample_point(Rng& rng, std::size_t dim,
                                 const std::function<void(Rng&, std::vector<double>&)>& draw,
                                 const std::function<bool(const std::vector<double>&)>& keep) {
    std::vector<double> x(dim);
    for (;;) {
        draw(rng, x);
        if (keep(x)) return x;
    }
}

Dataset build(std::size_t n, std::size_t dim, const std::string& name, std::uint64_t seed,
              const std::function<void(Rng&, std::vector<double>&)>& draw,
              const std::function<bool(const std::vector<double>&)>& keep,
              const std::function<int(const std::vector<double>&)>& label) {
    Dataset d;
    d.n_features = dim;
    d.name = name;
    d.features.reserve(n * dim);
    d.labels.reserve(n);
    Rng rng(derive_seed(seed, fnv1a64_str(name)));
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = sample_point(rng, dim, draw, keep);
        d.features.insert(d.features.end(), x.begin(), x.end());
        d.labels.push_back(static_cast<std::int8_t>(label(x)));
    }
    return d;
}

}  // namespace

Dataset make_two_gaussian(std::size_t n, std::size_t dim, double separation,
                          std::uint64_t seed, const std::string& name, double flip_rate) {
    Dataset d;
    d.n_features = dim;
    d.name = name;
    d.features.reserve(n * dim);
    d.labels.reserve(n);
    Rng rng(derive_seed(seed, fnv1a64_str(name)));
    for (std::size_t i = 0; i < n; ++i) {
        const int y = (i % 2 == 0) ? 1 : -1;
        for (std::size_t j = 0; j < dim; ++j)
            d.features.push_back(rng.gaussian() + y * separation / 2.0);
        d.labels.push_back(static_cast<std::int8_t>(y));
    }
    if (flip_rate > 0.0) {
        Rng flip(derive_seed(seed, fnv1a64_str(name), 0x666c6970ULL));
        for (auto& y : d.labels)
            if (flip.uniform01() < flip_rate) y = static_cast<std::int8_t>(-y);
    }
    return d;
}

Dataset make_band(std::size_t n, std::size_t dim, double width, double gap,
                  std::uint64_t seed, const std::string& name) {
    return build(
        n, dim, name, seed,
        [](Rng& r, std::vector<double>& x) {
            for (auto& v : x) v = r.uniform01() * 4.0 - 2.0;
        },
        [=](const std::vector<double>& x) { return std::fabs(std::fabs(x[0]) - width) > gap; },
        [=](const std::vector<double>& x) { return std::fabs(x[0]) < width ? 1 : -1; });
}

Dataset make_band_cross(std::size_t n, double width, double gap, std::uint64_t seed,
                        const std::string& name) {
    return build(
        n, 2, name, seed,
        [](Rng& r, std::vector<double>& x) {
            for (auto& v : x) v = r.uniform01() * 4.0 - 2.0;
        },
        [=](const std::vector<double>& x) {
            return std::fabs(std::fabs(x[0]) - width) > gap &&
                   std::fabs(std::fabs(x[1]) - width) > gap;
        },
        [=](const std::vector<double>& x) {
            return (std::fabs(x[0]) < width || std::fabs(x[1]) < width) ? 1 : -1;
        });
}

Dataset make_checkerboard(std::size_t n, int cells, double gap, double scale,
                          std::uint64_t seed, const std::string& name) {
    auto cell_distance = [](double v) {
        const double f = v - std::floor(v);
        return std::min(f, 1.0 - f);
    };
    return build(
        n, 2, name, seed,
        [=](Rng& r, std::vector<double>& x) {
            for (auto& v : x) v = r.uniform01() * cells;
        },
        [=](const std::vector<double>& x) {
            return cell_distance(x[0]) > gap && cell_distance(x[1]) > gap;
        },
        [=](const std::vector<double>& x) {
            const long cx = static_cast<long>(std::floor(x[0]));
            const long cy = static_cast<long>(std::floor(x[1]));
            return ((cx + cy) % 2 == 0) ? 1 : -1;
        });
}

Dataset make_parity_blobs(std::size_t n, std::size_t dim, double spread,
                          std::uint64_t seed, const std::string& name) {
    Dataset d;
    d.n_features = dim;
    d.name = name;
    d.features.reserve(n * dim);
    d.labels.reserve(n);
    Rng rng(derive_seed(seed, fnv1a64_str(name)));
    const std::size_t corners = static_cast<std::size_t>(1) << dim;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = rng.uniform_index(corners);
        int parity = 1;
        for (std::size_t j = 0; j < dim; ++j) {
            const int sign = ((c >> j) & 1U) ? 1 : -1;
            parity *= sign;
            d.features.push_back(sign * 1.3 + rng.gaussian() * spread);
        }
        d.labels.push_back(static_cast<std::int8_t>(parity));
    }
    return d;
}

Dataset make_radial(std::size_t n, double radius, double gap, std::uint64_t seed,
                    const std::string& name) {
    return build(
        n, 2, name, seed,
        [](Rng& r, std::vector<double>& x) {
            for (auto& v : x) v = r.gaussian();
        },
        [=](const std::vector<double>& x) {
            return std::fabs(std::hypot(x[0], x[1]) - radius) > gap;
        },
        [=](const std::vector<double>& x) {
            return std::hypot(x[0], x[1]) < radius ? 1 : -1;
        });
}

std::vector<Dataset> benchmark_suite(std::uint64_t seed) {
    std::vector<Dataset> out;
    out.push_back(make_band_cross(300, 0.7, 0.12, derive_seed(seed, 1), "band-cross"));
    out.push_back(make_checkerboard(300, 3, 0.10, 1.0, derive_seed(seed, 2), "checker3"));
    out.push_back(make_checkerboard(300, 2, 0.12, 2.0, derive_seed(seed, 3), "parity2"));
    out.push_back(make_parity_blobs(300, 3, 0.33, derive_seed(seed, 4), "parity-blobs3"));
    out.push_back(make_radial(300, 1.18, 0.15, derive_seed(seed, 5), "radial"));
    out.push_back(make_band(300, 4, 0.9, 0.10, derive_seed(seed, 6), "band4d"));
    out.push_back(make_checkerboard(260, 3, 0.14, 1.0, derive_seed(seed, 7), "checker3b"));
    out.push_back(make_band_cross(240, 0.7, 0.15, derive_seed(seed, 8), "band-cross-b"));
    return out;
}

}  // namespace divprune

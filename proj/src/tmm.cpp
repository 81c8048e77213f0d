#include "ncfcav/tmm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "ncfcav/error.hpp"

namespace ncfcav
{
namespace
{
const Complex kI{0.0, 1.0};

double k0(double lambda_nm)
{
    return 2.0 * kPi / lambda_nm;
}

// (E, H) at the left face of a layer from (E, H) at its right face.
TransferMatrix characteristic(Complex n, double thickness, double lambda_nm)
{
    const Complex phi = k0(lambda_nm) * n * thickness;
    const Complex c = std::cos(phi);
    const Complex s = std::sin(phi);
    return {c, -kI * s / n, -kI * n * s, c};
}

// Inverse of characteristic(): (E, H) at the right face from the left face.
TransferMatrix characteristic_inverse(Complex n, double thickness, double lambda_nm)
{
    const Complex phi = k0(lambda_nm) * n * thickness;
    const Complex c = std::cos(phi);
    const Complex s = std::sin(phi);
    return {c, kI * s / n, kI * n * s, c};
}

FieldState apply(const TransferMatrix &m, FieldState f)
{
    return {m.m11 * f.e + m.m12 * f.h, m.m21 * f.e + m.m22 * f.h};
}

// Grating stacks repeat a handful of distinct layers; reuse their matrices.
class LayerMatrixCache
{
public:
    explicit LayerMatrixCache(double lambda_nm) : lambda_(lambda_nm) {}

    const TransferMatrix &get(const Layer &layer)
    {
        for (std::size_t i = 0; i < used_; ++i)
            if (entries_[i].layer == layer)
                return entries_[i].matrix;
        Entry &slot = entries_[next_];
        slot.layer = layer;
        slot.matrix = characteristic(layer.index, layer.thickness, lambda_);
        next_ = (next_ + 1) % entries_.size();
        used_ = std::min(used_ + 1, entries_.size());
        return slot.matrix;
    }

private:
    struct Entry
    {
        Layer layer;
        TransferMatrix matrix;
    };
    double lambda_;
    std::array<Entry, 8> entries_{};
    std::size_t used_ = 0;
    std::size_t next_ = 0;
};

TransferMatrix product(std::span<const Layer> layers, double lambda_nm)
{
    LayerMatrixCache cache(lambda_nm);
    TransferMatrix m;
    for (const auto &layer : layers)
        m = m * cache.get(layer);
    return m;
}

void check_wavelength(double lambda_nm)
{
    if (!(lambda_nm > 0) || !std::isfinite(lambda_nm))
        throw ConfigError("wavelength must be > 0");
}

} // namespace

TransferMatrix layers_matrix(std::span<const Layer> layers, Complex n_left, Complex n_right, double lambda_nm)
{
    check_wavelength(lambda_nm);
    const TransferMatrix inner = product(layers, lambda_nm);
    // D_L^{-1} * inner * D_R with D(n) = [[1, 1], [n, -n]].
    const TransferMatrix d_left_inv{0.5, 0.5 / n_left, 0.5, -0.5 / n_left};
    const TransferMatrix d_right{1.0, 1.0, n_right, -n_right};
    return d_left_inv * inner * d_right;
}

TransferMatrix stack_matrix(const LayerStack &stack, double lambda_nm)
{
    return layers_matrix(stack.layers, stack.n_left, stack.n_right, lambda_nm);
}

Amplitudes rt_left_incidence(const LayerStack &stack, double lambda_nm)
{
    const TransferMatrix m = stack_matrix(stack, lambda_nm);
    if (std::abs(m.m11) < 1e-300)
        throw NumericalError("transfer matrix element m11 vanished at " + std::to_string(lambda_nm) + " nm");
    return {m.m21 / m.m11, 1.0 / m.m11};
}

Amplitudes rt_right_incidence(const LayerStack &stack, double lambda_nm)
{
    const TransferMatrix m = stack_matrix(stack, lambda_nm);
    if (std::abs(m.m11) < 1e-300)
        throw NumericalError("transfer matrix element m11 vanished at " + std::to_string(lambda_nm) + " nm");
    return {-m.m12 / m.m11, m.det() / m.m11};
}

SpectrumSample sample_spectrum(const LayerStack &stack, double lambda_nm)
{
    const Amplitudes a = rt_left_incidence(stack, lambda_nm);
    return {a.r, a.t, std::norm(a.r), stack.n_right / stack.n_left * std::norm(a.t)};
}

std::vector<double> adaptive_grid(const std::function<double(double)> &f, double lambda_min, double lambda_max,
                                  std::size_t n_samples, Extremum kind)
{
    if (!(lambda_min < lambda_max) || n_samples < 2)
        throw ConfigError("spectrum needs lambda_min < lambda_max and at least 2 samples");

    const double sign = kind == Extremum::Minimum ? 1.0 : -1.0;
    const double step = (lambda_max - lambda_min) / static_cast<double>(n_samples - 1);
    std::vector<double> grid(n_samples);
    std::vector<double> y(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        grid[i] = i + 1 == n_samples ? lambda_max : lambda_min + step * static_cast<double>(i);
        y[i] = sign * f(grid[i]);
    }
    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double range = *hi_it - *lo_it;

    struct Candidate
    {
        std::size_t index;
        double prominence;
    };
    std::vector<Candidate> candidates;
    constexpr std::size_t kSideReach = 64;
    for (std::size_t i = 1; i + 1 < n_samples; ++i) {
        if (!(y[i] <= y[i - 1] && y[i] < y[i + 1]))
            continue;
        const std::size_t a = i > kSideReach ? i - kSideReach : 0;
        const std::size_t b = std::min(n_samples - 1, i + kSideReach);
        const double left_ref = *std::max_element(y.begin() + a, y.begin() + i);
        const double right_ref = *std::max_element(y.begin() + i + 1, y.begin() + b + 1);
        const double prominence = std::min(left_ref, right_ref) - y[i];
        if (range > 0 && prominence > 1e-3 * range)
            candidates.push_back({i, prominence});
    }
    constexpr std::size_t kMaxRefined = 16;
    if (candidates.size() > kMaxRefined) {
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate &l, const Candidate &r) { return l.prominence > r.prominence; });
        candidates.resize(kMaxRefined);
    }

    auto g = [&](double x) { return sign * f(x); };
    std::vector<double> extra;
    for (const auto &c : candidates) {
        const std::size_t i = c.index;
        const auto [x_ext, y_ext] = boost::math::tools::brent_find_minima(g, grid[i - 1], grid[i + 1], 48);
        const double half = y_ext + 0.5 * c.prominence;

        auto crossing = [&](int dir) {
            double inner = x_ext;
            double outer = x_ext;
            std::size_t j = i;
            while (true) {
                if (dir < 0 && j == 0)
                    return grid.front();
                if (dir > 0 && j + 1 == n_samples)
                    return grid.back();
                j = dir < 0 ? j - 1 : j + 1;
                if (y[j] >= half) {
                    outer = grid[j];
                    break;
                }
                inner = grid[j];
            }
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (inner + outer);
                (g(mid) >= half ? outer : inner) = mid;
            }
            return 0.5 * (inner + outer);
        };
        const double width = crossing(+1) - crossing(-1);
        if (!(width > 0))
            continue;
        const double dense = width / 60.0;
        for (double x = x_ext - 5.0 * width; x <= x_ext + 5.0 * width; x += dense)
            if (x > lambda_min && x < lambda_max)
                extra.push_back(x);
        extra.push_back(x_ext);
    }
    grid.insert(grid.end(), extra.begin(), extra.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

Spectrum spectrum_on_grid(const LayerStack &stack, std::span<const double> wavelengths)
{
    Spectrum s;
    s.wavelengths.assign(wavelengths.begin(), wavelengths.end());
    s.r.reserve(wavelengths.size());
    s.t.reserve(wavelengths.size());
    s.R.reserve(wavelengths.size());
    s.T.reserve(wavelengths.size());
    for (double lambda : wavelengths) {
        const SpectrumSample x = sample_spectrum(stack, lambda);
        s.r.push_back(x.r);
        s.t.push_back(x.t);
        s.R.push_back(x.R);
        s.T.push_back(x.T);
    }
    return s;
}

Spectrum reflection_spectrum(const LayerStack &stack, double lambda_min, double lambda_max, std::size_t n_samples)
{
    const auto grid = adaptive_grid([&](double l) { return sample_spectrum(stack, l).R; }, lambda_min, lambda_max,
                                    n_samples, Extremum::Minimum);
    return spectrum_on_grid(stack, grid);
}

Complex MirrorCoefficients::r_left_at_source() const
{
    return r_left * std::exp(2.0 * kI * phase_left);
}

Complex MirrorCoefficients::r_right_at_source() const
{
    return r_right * std::exp(2.0 * kI * phase_right);
}

Complex MirrorCoefficients::t_left_at_source() const
{
    return t_left * std::exp(kI * phase_left);
}

Complex MirrorCoefficients::t_right_at_source() const
{
    return t_right * std::exp(kI * phase_right);
}

MirrorCoefficients mirror_coefficients(const LayerStack &stack, double source_plane, double lambda_nm)
{
    check_wavelength(lambda_nm);
    if (stack.layers.empty())
        throw ConfigError("mirror decomposition needs a layer containing the source plane");
    const std::size_t j = stack.layer_at(source_plane);
    double left_edge = 0.0;
    for (std::size_t i = 0; i < j; ++i)
        left_edge += stack.layers[i].thickness;
    const Layer &defect = stack.layers[j];
    const double d_left = source_plane - left_edge;
    const double d_right = defect.thickness - d_left;

    const std::span<const Layer> all(stack.layers);
    const TransferMatrix left = layers_matrix(all.first(j), stack.n_left, defect.index, lambda_nm);
    const TransferMatrix right = layers_matrix(all.subspan(j + 1), defect.index, stack.n_right, lambda_nm);

    MirrorCoefficients mc;
    mc.r_left = -left.m12 / left.m11;
    mc.t_left = left.det() / left.m11;
    mc.r_right = right.m21 / right.m11;
    mc.t_right = 1.0 / right.m11;
    mc.phase_left = k0(lambda_nm) * defect.index * d_left;
    mc.phase_right = k0(lambda_nm) * defect.index * d_right;
    mc.n_defect = defect.index;
    mc.n_exterior_left = stack.n_left;
    mc.n_exterior_right = stack.n_right;
    return mc;
}

std::vector<IntensitySample> propagate_intensity(const LayerStack &stack, double lambda_nm, double z0,
                                                 FieldState state, Side toward, int points_per_layer)
{
    check_wavelength(lambda_nm);
    if (points_per_layer < 1)
        throw ConfigError("points_per_layer must be >= 1");
    std::vector<double> edges(stack.layers.size() + 1, 0.0);
    for (std::size_t i = 0; i < stack.layers.size(); ++i)
        edges[i + 1] = edges[i] + stack.layers[i].thickness;

    std::vector<IntensitySample> out;
    const std::size_t start = z0 >= edges.back() ? stack.layers.size() - 1 : stack.layer_at(z0);

    if (toward == Side::Right) {
        double z = z0;
        FieldState f = state;
        for (std::size_t i = start; i < stack.layers.size(); ++i) {
            const Layer &layer = stack.layers[i];
            const double span = edges[i + 1] - z;
            for (int k = 0; k < points_per_layer; ++k) {
                const double dz = span * k / points_per_layer;
                const FieldState g = apply(characteristic_inverse(layer.index, dz, lambda_nm), f);
                out.push_back({z + dz, std::norm(g.e)});
            }
            f = apply(characteristic_inverse(layer.index, span, lambda_nm), f);
            z = edges[i + 1];
        }
        out.push_back({z, std::norm(f.e)});
    } else {
        double z = z0;
        FieldState f = state;
        for (std::size_t i = start + 1; i-- > 0;) {
            const Layer &layer = stack.layers[i];
            const double span = z - edges[i];
            for (int k = 0; k < points_per_layer; ++k) {
                const double dz = span * k / points_per_layer;
                const FieldState g = apply(characteristic(layer.index, dz, lambda_nm), f);
                out.push_back({z - dz, std::norm(g.e)});
            }
            f = apply(characteristic(layer.index, span, lambda_nm), f);
            z = edges[i];
        }
        out.push_back({z, std::norm(f.e)});
        std::reverse(out.begin(), out.end());
    }
    return out;
}

std::vector<IntensitySample> intensity_profile(const LayerStack &stack, double lambda_nm, Side incidence,
                                               int points_per_layer)
{
    if (points_per_layer < 8)
        throw ConfigError("intensity_profile needs at least 8 points per layer");
    if (stack.layers.empty())
        return {{0.0, 1.0}};

    std::vector<IntensitySample> prof;
    if (incidence == Side::Left) {
        const Amplitudes a = rt_left_incidence(stack, lambda_nm);
        const FieldState exit{a.t, stack.n_right * a.t};
        prof = propagate_intensity(stack, lambda_nm, stack.total_length(), exit, Side::Left, points_per_layer);
    } else {
        const Amplitudes a = rt_right_incidence(stack, lambda_nm);
        const FieldState exit{a.t, -stack.n_left * a.t};
        prof = propagate_intensity(stack, lambda_nm, 0.0, exit, Side::Right, points_per_layer);
    }
    double peak = 0.0;
    for (const auto &s : prof)
        peak = std::max(peak, s.intensity);
    if (peak > 0)
        for (auto &s : prof)
            s.intensity /= peak;
    return prof;
}

} // namespace ncfcav

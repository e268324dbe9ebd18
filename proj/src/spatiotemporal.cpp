#include "ctst/spatiotemporal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <set>

#include "ctst/errors.hpp"

namespace ctst {

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double kEarthRadiusKm = 6371.0;
    constexpr double kDeg = M_PI / 180.0;
    const double phi1 = lat1 * kDeg, phi2 = lat2 * kDeg;
    const double dphi = (lat2 - lat1) * kDeg;
    const double dlam = (lon2 - lon1) * kDeg;
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

Graph knn_spatial_graph(const std::vector<Station>& stations, int k) {
    const int n = static_cast<int>(stations.size());
    if (k < 1) throw InputError("kNN graph needs k >= 1");
    if (n < k + 1) throw InputError("kNN graph needs at least k + 1 stations");
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (stations[u].lat == stations[v].lat && stations[u].lon == stations[v].lon)
                throw InputError("duplicate station coordinates: " + stations[u].id + " and " +
                                 stations[v].id);

    std::set<std::pair<int, int>> picked;
    std::vector<std::pair<double, int>> dist;
    for (int v = 0; v < n; ++v) {
        dist.clear();
        for (int u = 0; u < n; ++u) {
            if (u == v) continue;
            dist.emplace_back(
                haversine_km(stations[v].lat, stations[v].lon, stations[u].lat, stations[u].lon),
                u);
        }
        std::sort(dist.begin(), dist.end()); // ties fall to the smaller index
        for (int j = 0; j < k; ++j) {
            const int u = dist[static_cast<std::size_t>(j)].second;
            picked.emplace(std::min(u, v), std::max(u, v));
        }
    }
    std::vector<Edge> edges;
    edges.reserve(picked.size());
    for (const auto& [u, v] : picked) edges.push_back({u, v, 1.0});
    return Graph::build(n, edges);
}

MultiplexGraph build_multiplex(const Graph& base, int num_windows) {
    if (num_windows < 1) throw InputError("multiplex graph needs num_windows >= 1");
    MultiplexGraph mg;
    mg.base = base;
    mg.num_windows = num_windows;

    const int n = base.num_nodes();
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(num_windows) * base.edges().size() +
                  static_cast<std::size_t>(n) * (num_windows - 1));
    for (int t = 0; t < num_windows; ++t)
        for (const auto& e : base.edges())
            edges.push_back({e.u * num_windows + t, e.v * num_windows + t, 1.0});
    for (int v = 0; v < n; ++v)
        for (int t = 0; t + 1 < num_windows; ++t)
            edges.push_back({v * num_windows + t, v * num_windows + t + 1, 1.0});
    mg.product = Graph::build(n * num_windows, edges);
    return mg;
}

NodeSampleSet segment_windows(const std::vector<Matrix>& series, int event_index,
                              int num_windows, int window_len) {
    if (series.empty()) throw InputError("segmentation needs at least one station");
    if (num_windows < 1 || window_len < 1)
        throw InputError("segmentation needs num_windows, window_len >= 1");
    const long span = static_cast<long>(num_windows) * window_len;
    const auto d = series.front().rows();

    NodeSampleSet out;
    out.X.reserve(series.size() * static_cast<std::size_t>(num_windows));
    out.Xp.reserve(series.size() * static_cast<std::size_t>(num_windows));
    for (const auto& s : series) {
        if (s.rows() != d) throw InputError("stations disagree on channel count");
        if (event_index < span || s.cols() - event_index < span)
            throw InputError("series too short around the event: need " + std::to_string(span) +
                             " samples on each side");
        for (int t = 0; t < num_windows; ++t) {
            // Observations are rows downstream, so each window transposes to
            // window_len x d.
            out.X.push_back(s.middleCols(event_index - span + static_cast<long>(t) * window_len,
                                         window_len)
                                .transpose());
            out.Xp.push_back(s.middleCols(event_index + static_cast<long>(t) * window_len,
                                          window_len)
                                 .transpose());
        }
    }
    out.validate();
    return out;
}

namespace {

// One normalized biquad: y = b0 x + b1 x[-1] + b2 x[-2] - a1 y[-1] - a2 y[-2].
struct Biquad {
    double b0, b1, b2, a1, a2;
};

// Digital 2-16 Hz Butterworth band-pass of prototype order N as a cascade of
// N sections: analog low-pass prototype poles -> low-pass-to-band-pass
// transform (prewarped edges) -> bilinear transform. Each section carries one
// zero at z=1 and one at z=-1 (the transform puts N zeros at each).
std::vector<Biquad> butter_bandpass_sos(int order, double lo, double hi, double fs) {
    if (order < 2 || order % 2 != 0) throw InputError("band-pass prototype order must be even");
    const double fs2 = 2.0 * fs;
    const double w1 = fs2 * std::tan(M_PI * lo / fs);
    const double w2 = fs2 * std::tan(M_PI * hi / fs);
    const double bw = w2 - w1;
    const double w0sq = w1 * w2;

    // Band-pass analog poles, one representative per conjugate pair.
    std::vector<std::complex<double>> analog;
    for (int k = 0; k < order; ++k) {
        const double angle = M_PI * (2.0 * k + order + 1.0) / (2.0 * order);
        const std::complex<double> proto(std::cos(angle), std::sin(angle));
        if (proto.imag() <= 0.0) continue; // conjugates handled implicitly
        const std::complex<double> s = proto * (bw / 2.0);
        const std::complex<double> disc = std::sqrt(s * s - w0sq);
        analog.push_back(s + disc);
        analog.push_back(s - disc);
    }

    // Gain of the analog band-pass is bw^order (numerator (bw s)^order over
    // the pole polynomial); after the bilinear transform the numerator zeros
    // contribute (fs2)^order and the poles |prod(fs2 - p)|^2 over the
    // representative half.
    double log_gain = order * (std::log(bw) + std::log(fs2));
    std::complex<double> denom(1.0, 0.0);
    std::vector<Biquad> sos;
    sos.reserve(analog.size());
    for (const auto& pa : analog) {
        denom *= (fs2 - pa);
        const std::complex<double> pd = (fs2 + pa) / (fs2 - pa);
        sos.push_back({1.0, 0.0, -1.0, -2.0 * pd.real(), std::norm(pd)});
    }
    const double gain = std::exp(log_gain) / std::norm(denom);
    sos.front().b0 *= gain;
    sos.front().b2 *= gain;
    return sos;
}

// Direct-form II transposed pass over the cascade; z holds two states per
// section and is updated in place.
void sosfilt(const std::vector<Biquad>& sos, std::vector<double>& x,
             std::vector<std::array<double, 2>>& z) {
    for (double& sample : x) {
        double v = sample;
        for (std::size_t s = 0; s < sos.size(); ++s) {
            const Biquad& q = sos[s];
            const double y = q.b0 * v + z[s][0];
            z[s][0] = q.b1 * v - q.a1 * y + z[s][1];
            z[s][1] = q.b2 * v - q.a2 * y;
            v = y;
        }
        sample = v;
    }
}

// Steady-state section states for a unit-level constant input, used to damp
// start-up transients; level propagates through each section's DC gain.
std::vector<std::array<double, 2>> sos_step_state(const std::vector<Biquad>& sos) {
    std::vector<std::array<double, 2>> z(sos.size());
    double level = 1.0;
    for (std::size_t s = 0; s < sos.size(); ++s) {
        const Biquad& q = sos[s];
        const double dc = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
        const double out = dc * level;
        z[s][0] = out - q.b0 * level;
        z[s][1] = q.b2 * level - q.a2 * out;
        level = out;
    }
    return z;
}

// Forward-backward filtering with odd-reflection padding at both ends.
std::vector<double> sosfiltfilt(const std::vector<Biquad>& sos, const std::vector<double>& x) {
    const long n = static_cast<long>(x.size());
    long pad = 3 * (2 * static_cast<long>(sos.size()) + 1);
    if (pad >= n) pad = n - 1;

    std::vector<double> ext;
    ext.reserve(static_cast<std::size_t>(n + 2 * pad));
    for (long i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[static_cast<std::size_t>(i)]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (long i = 1; i <= pad; ++i)
        ext.push_back(2.0 * x.back() - x[static_cast<std::size_t>(n - 1 - i)]);

    const auto zi = sos_step_state(sos);
    auto scaled = [&](double v) {
        auto z = zi;
        for (auto& pair : z) {
            pair[0] *= v;
            pair[1] *= v;
        }
        return z;
    };

    auto z = scaled(ext.front());
    sosfilt(sos, ext, z);
    std::reverse(ext.begin(), ext.end());
    z = scaled(ext.front());
    sosfilt(sos, ext, z);
    std::reverse(ext.begin(), ext.end());

    return std::vector<double>(ext.begin() + pad, ext.end() - pad);
}

// Index reflection with edge repeat, valid for any overhang.
inline long reflect_index(long i, long n) {
    const long period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return (i < n) ? i : period - 1 - i;
}

} // namespace

std::vector<double> bandpass_2_16(const std::vector<double>& x, double fs) {
    if (fs <= 32.0) throw InputError("sampling rate too low for a 2-16 Hz band (need fs > 32)");
    if (x.size() < 32) throw InputError("series too short to filter (need >= 32 samples)");
    const auto sos = butter_bandpass_sos(4, 2.0, 16.0, fs);
    return sosfiltfilt(sos, x);
}

std::vector<double> rms_envelope(const std::vector<double>& x, double fs) {
    const long n = static_cast<long>(x.size());
    if (n < 1) throw InputError("empty series");
    const long w = std::max<long>(1, std::lround(0.5 * fs));
    const long left = w / 2;
    std::vector<double> env(static_cast<std::size_t>(n));
    for (long t = 0; t < n; ++t) {
        double acc = 0.0;
        for (long j = t - left; j < t - left + w; ++j) {
            const double v = x[static_cast<std::size_t>(reflect_index(j, n))];
            acc += v * v;
        }
        env[static_cast<std::size_t>(t)] = std::sqrt(acc / static_cast<double>(w));
    }
    return env;
}

std::vector<double> ar1_residuals(const std::vector<double>& x) {
    const long n = static_cast<long>(x.size());
    if (n < 2) throw InputError("AR(1) needs at least 2 samples");
    double num = 0.0, den = 0.0;
    for (long t = 1; t < n; ++t) {
        num += x[static_cast<std::size_t>(t)] * x[static_cast<std::size_t>(t - 1)];
        den += x[static_cast<std::size_t>(t - 1)] * x[static_cast<std::size_t>(t - 1)];
    }
    const double phi = (den > 0.0) ? num / den : 0.0;
    std::vector<double> out(x);
    for (long t = n - 1; t >= 1; --t)
        out[static_cast<std::size_t>(t)] -= phi * out[static_cast<std::size_t>(t - 1)];
    return out;
}

std::vector<double> preprocess_channel(const std::vector<double>& x, double fs) {
    if (fs <= 32.0) throw InputError("sampling rate too low for a 2-16 Hz band (need fs > 32)");
    const long n = static_cast<long>(x.size());
    if (n < 32) throw InputError("series too short to preprocess (need >= 32 samples)");

    double max_abs_in = 0.0;
    for (double v : x) max_abs_in = std::max(max_abs_in, std::abs(v));

    // Least-squares line removal.
    std::vector<double> y(x);
    {
        const double tbar = (n - 1) / 2.0;
        double sxy = 0.0, sxx = 0.0, ybar = 0.0;
        for (long t = 0; t < n; ++t) ybar += y[static_cast<std::size_t>(t)];
        ybar /= static_cast<double>(n);
        for (long t = 0; t < n; ++t) {
            sxy += (t - tbar) * (y[static_cast<std::size_t>(t)] - ybar);
            sxx += (t - tbar) * (t - tbar);
        }
        const double slope = sxy / sxx;
        for (long t = 0; t < n; ++t)
            y[static_cast<std::size_t>(t)] -= ybar + slope * (t - tbar);
    }

    y = bandpass_2_16(y, fs);
    y = rms_envelope(y, fs);
    y = ar1_residuals(y);

    // Standardize, then scale the peak to exactly 1.
    {
        double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
        double var = 0.0;
        for (double v : y) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(n));
        if (sd <= 1e-10 * std::max(1.0, max_abs_in))
            throw InputError("constant series cannot be standardized");
        double max_abs = 0.0;
        for (double& v : y) {
            v = (v - mean) / sd;
            max_abs = std::max(max_abs, std::abs(v));
        }
        for (double& v : y) v /= max_abs;
    }
    return y;
}

} // namespace ctst

#pragma once

#include <string>
#include <vector>

#include "ctst/graph.hpp"
#include "ctst/samples.hpp"

namespace ctst {

struct Station {
    std::string id;
    double lat = 0.0; // degrees
    double lon = 0.0;
};

// Great-circle distance in kilometers.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Symmetrized k-nearest-neighbor graph over station coordinates: edge when
// either endpoint lists the other among its k geographically nearest, unit
// weights. Distance ties break toward the smaller station index.
Graph knn_spatial_graph(const std::vector<Station>& stations, int k = 3);

// Product of a spatial graph with a temporal path: node (v, t) gets index
// v * num_windows + t; (u,t)-(v,t) is an edge when (u,v) is a spatial edge,
// and (v,t)-(v,t+1) always. Unit weights.
struct MultiplexGraph {
    Graph base;
    int num_windows = 0;
    Graph product;

    int node(int station, int window) const { return station * num_windows + window; }
    int station_of(int node) const { return node / num_windows; }
    int window_of(int node) const { return node % num_windows; }
};

MultiplexGraph build_multiplex(const Graph& base, int num_windows);

// Cut the series around the event into per-(station, window) sample sets:
// X_{(v,t)} is the t-th block of window_len columns starting at
// event_index - num_windows * window_len, X'_{(v,t)} the t-th block starting
// at event_index. series[v] holds one station's channels as a d x T matrix
// (columns are time samples).
NodeSampleSet segment_windows(const std::vector<Matrix>& series, int event_index,
                              int num_windows, int window_len);

// Per-channel conditioning chain, applied in order: remove the least-squares
// linear trend; 2-16 Hz band-pass (4th-order Butterworth, forward-backward
// for zero phase); RMS amplitude envelope over a centered 0.5 s window with
// reflected boundaries; AR(1) residuals (slope by least squares, no
// intercept); standardize to zero mean / unit variance; divide by the
// maximum absolute value. Output lives in [-1, 1] with max |.| = 1.
std::vector<double> preprocess_channel(const std::vector<double>& x, double fs);

// Individual steps of the chain, exposed so they can be checked in
// isolation.
std::vector<double> bandpass_2_16(const std::vector<double>& x, double fs);
std::vector<double> rms_envelope(const std::vector<double>& x, double fs);
std::vector<double> ar1_residuals(const std::vector<double>& x);

} // namespace ctst

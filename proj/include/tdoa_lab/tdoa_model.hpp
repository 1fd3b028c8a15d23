#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tdoa_lab/errors.hpp"
#include "tdoa_lab/geometry.hpp"
#include "tdoa_lab/rng.hpp"

namespace tdoa_lab {

/// Canonical full-set pair enumeration: for j = 1..N-1, for i = j+1..N emit
/// (i, j). Indices are 1-based; M = N(N-1)/2.
class PairOrder {
public:
    explicit PairOrder(int n) : n_(n) {
        pairs_.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
        for (int j = 1; j <= n - 1; ++j)
            for (int i = j + 1; i <= n; ++i) pairs_.emplace_back(i, j);
    }

    int n() const { return n_; }
    int size() const { return static_cast<int>(pairs_.size()); }
    std::pair<int, int> pair(int flat) const { return pairs_[flat]; }
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

    /// Flat index of the (i, j) pair, i > j, both 1-based.
    int index_of(int i, int j) const {
        // pairs with second element < j come first: (N-1) + (N-2) + ... + (N-j+1)
        return (j - 1) * n_ - j * (j - 1) / 2 + (i - j - 1);
    }

private:
    int n_;
    std::vector<std::pair<int, int>> pairs_;
};

/// Full-set TDOA values, seconds, in canonical pair order.
struct TdoaVector {
    Eigen::VectorXd values;
    PairOrder order;
};

/// sigma_t: TDOA noise std (s); sigma_loc: per-coordinate sensor position
/// noise std (m); c: propagation speed (m/s). 343 m/s is indoor sound at
/// room temperature.
struct NoiseModel {
    double sigma_t = 1e-4;
    double sigma_loc = 0.1;
    double c = 343.0;

    void validate() const {
        if (!(c > 0.0)) throw ConfigError("propagation speed c must be > 0");
        if (sigma_t < 0.0 || sigma_loc < 0.0) throw ConfigError("noise std must be >= 0");
    }
};

/// One draw of the joint measurement z = [t, m]: noisy TDOAs plus noisy
/// stacked sensor positions.
struct MeasurementBundle {
    TdoaVector tdoa;
    Eigen::VectorXd sensor_meas; // DN, sensor-major
};

/// Noise-free TDOA vector: entry (i, j) = (||s - x_i|| - ||s - x_j||) / c.
inline TdoaVector tdoa_true(const SourceLocation& source, const SensorArray& array, double c) {
    if (!(c > 0.0)) throw ConfigError("propagation speed c must be > 0");
    array.require_clear_of(source);
    PairOrder order(array.size());
    Eigen::VectorXd dists(array.size());
    for (int i = 0; i < array.size(); ++i)
        dists(i) = (source - array.position(i)).norm();
    Eigen::VectorXd values(order.size());
    for (int k = 0; k < order.size(); ++k) {
        auto [i, j] = order.pair(k);
        values(k) = (dists(i - 1) - dists(j - 1)) / c;
    }
    return TdoaVector{std::move(values), std::move(order)};
}

/// Draws z = [t, m]: each TDOA entry gets independent N(0, sigma_t^2), each
/// sensor coordinate independent N(0, sigma_loc^2).
inline MeasurementBundle simulate_measurements(const SourceLocation& source, const SensorArray& array,
                                               const NoiseModel& noise, std::uint64_t seed) {
    noise.validate();
    TdoaVector t = tdoa_true(source, array, noise.c);
    auto eng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (noise.sigma_t > 0.0)
        for (Eigen::Index k = 0; k < t.values.size(); ++k) t.values(k) += noise.sigma_t * gauss(eng);
    Eigen::VectorXd m = array.stacked();
    if (noise.sigma_loc > 0.0)
        for (Eigen::Index k = 0; k < m.size(); ++k) m(k) += noise.sigma_loc * gauss(eng);
    return MeasurementBundle{std::move(t), std::move(m)};
}

/// Diagonal of the joint covariance Sigma = diag(sigma_t^2 I_M, sigma_loc^2 I_DN).
/// Both variances must be positive: Sigma must be invertible.
inline Eigen::VectorXd covariance_diagonal(const NoiseModel& noise, int n, int dim) {
    noise.validate();
    if (!(noise.sigma_t > 0.0)) throw ConfigError("joint covariance needs sigma_t > 0");
    if (!(noise.sigma_loc > 0.0)) throw ConfigError("joint covariance needs sigma_loc > 0");
    const int m = n * (n - 1) / 2;
    Eigen::VectorXd diag(m + dim * n);
    diag.head(m).setConstant(noise.sigma_t * noise.sigma_t);
    diag.tail(dim * n).setConstant(noise.sigma_loc * noise.sigma_loc);
    return diag;
}

// ---- serialization ----------------------------------------------------------

inline nlohmann::json to_json(const MeasurementBundle& bundle) {
    nlohmann::json j;
    j["n"] = bundle.tdoa.order.n();
    j["tdoa"] = std::vector<double>(bundle.tdoa.values.begin(), bundle.tdoa.values.end());
    j["sensor_meas"] = std::vector<double>(bundle.sensor_meas.begin(), bundle.sensor_meas.end());
    return j;
}

inline MeasurementBundle measurement_bundle_from_json(const nlohmann::json& j) {
    const int n = j.at("n").get<int>();
    PairOrder order(n);
    auto tv = j.at("tdoa").get<std::vector<double>>();
    if (static_cast<int>(tv.size()) != order.size())
        throw ConfigError("measurement bundle TDOA length does not match n");
    auto mv = j.at("sensor_meas").get<std::vector<double>>();
    MeasurementBundle b{TdoaVector{Eigen::Map<Eigen::VectorXd>(tv.data(), tv.size()), order},
                        Eigen::Map<Eigen::VectorXd>(mv.data(), mv.size())};
    return b;
}

/// CSV with one labeled column pair per TDOA entry: t_i_j,value.
inline void save_tdoa_csv(const TdoaVector& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "pair,value\n";
    for (int k = 0; k < t.order.size(); ++k) {
        auto [i, j] = t.order.pair(k);
        out << "t_" << i << "_" << j << "," << format_double(t.values(k)) << "\n";
    }
}

} // namespace tdoa_lab

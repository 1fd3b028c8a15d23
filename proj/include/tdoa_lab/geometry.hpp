#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tdoa_lab/errors.hpp"
#include "tdoa_lab/rng.hpp"

namespace tdoa_lab {

/// Source position, length D (D = 2 or 3), meters.
using SourceLocation = Eigen::VectorXd;

/// Sensors may not sit on top of each other or on the source.
inline constexpr double kCoincidenceTol = 1e-9;

/// N sensor positions in D-dimensional space, one row per sensor.
///
/// N >= D + 2 so that J1 can reach full column rank and J2 can reach rank
/// N - 1 at the same time on generic geometry.
class SensorArray {
public:
    SensorArray(int dim, Eigen::MatrixXd positions) : dim_(dim), positions_(std::move(positions)) {
        if (dim_ != 2 && dim_ != 3)
            throw ConfigError("sensor array dimension must be 2 or 3, got " + std::to_string(dim_));
        if (positions_.cols() != dim_)
            throw ConfigError("sensor position rows must have " + std::to_string(dim_) + " coordinates");
        const auto n = positions_.rows();
        if (n < dim_ + 2)
            throw ConfigError("need at least D+2 = " + std::to_string(dim_ + 2) + " sensors, got " +
                              std::to_string(n));
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                if ((positions_.row(i) - positions_.row(j)).norm() <= kCoincidenceTol)
                    throw DegenerateGeometryError("sensors " + std::to_string(i + 1) + " and " +
                                                  std::to_string(j + 1) + " coincide");
    }

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(positions_.rows()); }
    const Eigen::MatrixXd& positions() const { return positions_; }
    Eigen::VectorXd position(int i) const { return positions_.row(i).transpose(); }

    /// Positions stacked sensor-major into one DN-vector (x1x, x1y[, x1z], x2x, ...).
    Eigen::VectorXd stacked() const {
        Eigen::VectorXd out(positions_.size());
        for (int i = 0; i < size(); ++i)
            out.segment(i * dim_, dim_) = positions_.row(i).transpose();
        return out;
    }

    static SensorArray from_stacked(int dim, const Eigen::VectorXd& flat) {
        if (flat.size() % dim != 0)
            throw ConfigError("stacked sensor vector length not divisible by dimension");
        const int n = static_cast<int>(flat.size()) / dim;
        Eigen::MatrixXd pos(n, dim);
        for (int i = 0; i < n; ++i)
            pos.row(i) = flat.segment(i * dim, dim).transpose();
        return SensorArray(dim, std::move(pos));
    }

    /// Throws if the source sits on a sensor (unit vectors become undefined).
    void require_clear_of(const SourceLocation& source) const {
        if (source.size() != dim_)
            throw ConfigError("source dimension does not match sensor array");
        for (int i = 0; i < size(); ++i)
            if ((positions_.row(i).transpose() - source).norm() <= kCoincidenceTol)
                throw DegenerateGeometryError("source coincides with sensor " + std::to_string(i + 1));
    }

private:
    int dim_;
    Eigen::MatrixXd positions_;
};

/// Uniform angular array: x_i = r [cos a_i, sin a_i], a_i = alpha0 + 2 pi (i-1)/n.
inline SensorArray build_uaa(int n, double radius, double alpha0) {
    if (n < 4) throw ConfigError("uniform angular array needs n >= 4, got " + std::to_string(n));
    if (!(radius > 0.0)) throw ConfigError("uniform angular array radius must be > 0");
    Eigen::MatrixXd pos(n, 2);
    for (int i = 0; i < n; ++i) {
        const double a = alpha0 + 2.0 * M_PI * i / n;
        pos(i, 0) = radius * std::cos(a);
        pos(i, 1) = radius * std::sin(a);
    }
    return SensorArray(2, std::move(pos));
}

/// Cube of 8 sensors: center + (+-edge/2, +-edge/2, +-edge/2).
inline SensorArray build_cube(double edge, const SourceLocation& center) {
    if (!(edge > 0.0)) throw ConfigError("cube edge length must be > 0");
    if (center.size() != 3) throw ConfigError("cube center must be 3-dimensional");
    Eigen::MatrixXd pos(8, 3);
    int row = 0;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1}) {
                pos(row, 0) = center(0) + sx * edge / 2.0;
                pos(row, 1) = center(1) + sy * edge / 2.0;
                pos(row, 2) = center(2) + sz * edge / 2.0;
                ++row;
            }
    return SensorArray(3, std::move(pos));
}

/// n sensors i.i.d. uniform in the axis-aligned hypercube of side `side`
/// centered at `center`. Coincident draws (against other sensors or the
/// center) are resampled, so the result always satisfies the array
/// invariants.
inline SensorArray build_random_square(int n, double side, const SourceLocation& center, int dim,
                                       std::uint64_t seed) {
    if (n < 4) throw ConfigError("random placement needs n >= 4, got " + std::to_string(n));
    if (!(side > 0.0)) throw ConfigError("random placement side must be > 0");
    if (dim != 2 && dim != 3) throw ConfigError("random placement dimension must be 2 or 3");
    if (center.size() != dim) throw ConfigError("random placement center has wrong dimension");
    if (n < dim + 2)
        throw ConfigError("random placement needs n >= D+2 = " + std::to_string(dim + 2));

    auto eng = make_engine(seed);
    std::uniform_real_distribution<double> unif(-side / 2.0, side / 2.0);
    Eigen::MatrixXd pos(n, dim);
    for (int i = 0; i < n; ++i) {
        while (true) {
            Eigen::VectorXd p(dim);
            for (int d = 0; d < dim; ++d) p(d) = center(d) + unif(eng);
            bool clear = (p - center).norm() > kCoincidenceTol;
            for (int j = 0; clear && j < i; ++j)
                clear = (pos.row(j).transpose() - p).norm() > kCoincidenceTol;
            if (clear) {
                pos.row(i) = p.transpose();
                break;
            }
        }
    }
    return SensorArray(dim, std::move(pos));
}

/// Adds i.i.d. N(0, sigma_loc^2) noise to every coordinate of every sensor.
inline SensorArray perturb(const SensorArray& array, double sigma_loc, std::uint64_t seed) {
    if (sigma_loc < 0.0) throw ConfigError("sigma_loc must be >= 0");
    if (sigma_loc == 0.0) return array;
    auto eng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, sigma_loc);
    Eigen::MatrixXd pos = array.positions();
    for (Eigen::Index i = 0; i < pos.rows(); ++i)
        for (Eigen::Index d = 0; d < pos.cols(); ++d) pos(i, d) += gauss(eng);
    return SensorArray(array.dim(), std::move(pos));
}

// ---- placement specs -------------------------------------------------------

enum class PlacementKind { Uaa, Cube, Random, FromFile };

/// Declarative sensor placement, loadable from experiment configs.
struct PlacementSpec {
    PlacementKind kind = PlacementKind::Uaa;
    // UAA
    int n = 6;
    double radius = 5.0;
    double alpha0 = 0.0;
    // cube
    double edge = 10.0;
    Eigen::VectorXd center = Eigen::VectorXd::Zero(3);
    // random
    double side = 10.0;
    int dim = 2;
    std::uint64_t seed = 0;
    // file
    std::string path;
};

// ---- serialization ----------------------------------------------------------

inline nlohmann::json to_json(const SensorArray& array) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < array.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int d = 0; d < array.dim(); ++d) row.push_back(array.positions()(i, d));
        rows.push_back(row);
    }
    return rows;
}

inline SensorArray sensor_array_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ConfigError("sensor array JSON must be an array of coordinate arrays");
    const int n = static_cast<int>(j.size());
    const int dim = static_cast<int>(j.front().size());
    Eigen::MatrixXd pos(n, dim);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(j[i].size()) != dim)
            throw ConfigError("sensor array JSON rows have inconsistent lengths");
        for (int d = 0; d < dim; ++d) pos(i, d) = j[i][d].get<double>();
    }
    return SensorArray(dim, std::move(pos));
}

/// %.17g prints doubles so they read back bit-exact.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void save_sensor_csv(const SensorArray& array, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << (array.dim() == 2 ? "x,y" : "x,y,z") << "\n";
    for (int i = 0; i < array.size(); ++i) {
        for (int d = 0; d < array.dim(); ++d) {
            if (d) out << ",";
            out << format_double(array.positions()(i, d));
        }
        out << "\n";
    }
}

inline SensorArray load_sensor_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw ConfigError(path + ": empty sensor CSV");
    int dim;
    if (header == "x,y") dim = 2;
    else if (header == "x,y,z") dim = 3;
    else throw ConfigError(path + ": sensor CSV header must be 'x,y' or 'x,y,z'");
    std::vector<Eigen::VectorXd> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        Eigen::VectorXd p(dim);
        std::string cell;
        for (int d = 0; d < dim; ++d) {
            if (!std::getline(ss, cell, ','))
                throw ConfigError(path + ": sensor CSV row with too few columns");
            p(d) = std::stod(cell);
        }
        rows.push_back(p);
    }
    Eigen::MatrixXd pos(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) pos.row(i) = rows[i].transpose();
    return SensorArray(dim, std::move(pos));
}

/// Materializes a placement spec into sensor positions.
inline SensorArray build_placement(const PlacementSpec& spec) {
    switch (spec.kind) {
        case PlacementKind::Uaa: return build_uaa(spec.n, spec.radius, spec.alpha0);
        case PlacementKind::Cube: return build_cube(spec.edge, spec.center);
        case PlacementKind::Random:
            return build_random_square(spec.n, spec.side, spec.center, spec.dim, spec.seed);
        case PlacementKind::FromFile: {
            if (spec.path.size() > 5 && spec.path.substr(spec.path.size() - 5) == ".json") {
                std::ifstream in(spec.path);
                if (!in) throw IoError("cannot open " + spec.path);
                nlohmann::json j;
                in >> j;
                return sensor_array_from_json(j);
            }
            return load_sensor_csv(spec.path);
        }
    }
    throw ConfigError("unknown placement kind");
}

} // namespace tdoa_lab

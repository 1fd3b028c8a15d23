#pragma once

#include <Eigen/Dense>

#include <fstream>
#include <string>

#include "tdoa_lab/errors.hpp"
#include "tdoa_lab/geometry.hpp"
#include "tdoa_lab/tdoa_model.hpp"

namespace tdoa_lab {

/// First-order blocks of the joint measurement map at (source, sensors):
/// j1 = dT/ds (M x D), j2 = dT/dx (M x DN, sensor-major columns).
///
/// For the pair (i, j) row, with u_k the unit vector from sensor k toward
/// the source:
///   j1 row = (u_i - u_j)^T / c
///   j2 row = -u_i^T / c in sensor i's block, +u_j^T / c in sensor j's block.
struct JacobianBlocks {
    Eigen::MatrixXd j1;
    Eigen::MatrixXd j2;
    Eigen::MatrixXd unit_vectors; // N x D, row k = u_k^T
    PairOrder order;
};

/// Stacked Jacobian of g(theta) = [T, x] over theta = [s, x]:
/// [[J1, J2], [0, I_DN]].
struct JointJacobian {
    Eigen::MatrixXd matrix;
    int dim = 0;
    int n = 0;
};

inline JacobianBlocks build_blocks(const SourceLocation& source, const SensorArray& array, double c) {
    if (!(c > 0.0)) throw ConfigError("propagation speed c must be > 0");
    array.require_clear_of(source);
    const int n = array.size();
    const int dim = array.dim();
    PairOrder order(n);
    const int m = order.size();

    Eigen::MatrixXd units(n, dim);
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd diff = source - array.position(k);
        units.row(k) = diff.transpose() / diff.norm();
    }

    Eigen::MatrixXd j1 = Eigen::MatrixXd::Zero(m, dim);
    Eigen::MatrixXd j2 = Eigen::MatrixXd::Zero(m, dim * n);
    for (int k = 0; k < m; ++k) {
        auto [i, j] = order.pair(k);
        j1.row(k) = (units.row(i - 1) - units.row(j - 1)) / c;
        j2.block(k, (i - 1) * dim, 1, dim) = -units.row(i - 1) / c;
        j2.block(k, (j - 1) * dim, 1, dim) = units.row(j - 1) / c;
    }
    return JacobianBlocks{std::move(j1), std::move(j2), std::move(units), std::move(order)};
}

inline JointJacobian build_joint(const JacobianBlocks& blocks) {
    const int m = static_cast<int>(blocks.j1.rows());
    const int dim = static_cast<int>(blocks.j1.cols());
    const int dn = static_cast<int>(blocks.j2.cols());
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(m + dn, dim + dn);
    joint.topLeftCorner(m, dim) = blocks.j1;
    joint.topRightCorner(m, dn) = blocks.j2;
    joint.bottomRightCorner(dn, dn).setIdentity();
    return JointJacobian{std::move(joint), dim, dn / dim};
}

inline void dump_matrix_csv(const Eigen::MatrixXd& mat, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index col = 0; col < mat.cols(); ++col) {
            if (col) out << ",";
            out << format_double(mat(r, col));
        }
        out << "\n";
    }
}

} // namespace tdoa_lab

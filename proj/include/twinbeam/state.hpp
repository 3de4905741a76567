// Two-mode covariance matrix in block form.

#pragma once

#include <Eigen/Dense>

namespace twinbeam {

// 4x4 real symmetric covariance matrix of a two-mode Gaussian state in the
// vacuum-is-1/2 convention, addressed as blocks [[A, C], [C^T, B]].
struct CovarianceMatrix4 {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();

    Eigen::Matrix2d A() const { return m.block<2, 2>(0, 0); }
    Eigen::Matrix2d B() const { return m.block<2, 2>(2, 2); }
    Eigen::Matrix2d C() const { return m.block<2, 2>(0, 2); }

    static CovarianceMatrix4 from_blocks(const Eigen::Matrix2d& a,
                                         const Eigen::Matrix2d& b,
                                         const Eigen::Matrix2d& c) {
        CovarianceMatrix4 s;
        s.m.block<2, 2>(0, 0) = a;
        s.m.block<2, 2>(2, 2) = b;
        s.m.block<2, 2>(0, 2) = c;
        s.m.block<2, 2>(2, 0) = c.transpose();
        return s;
    }

    double max_asymmetry() const {
        return (m - m.transpose()).cwiseAbs().maxCoeff();
    }
};

}  // namespace twinbeam

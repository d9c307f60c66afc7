#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "lesionbench/errors.hpp"

namespace lesionbench {

/// 4x4 voxel-index-to-world-mm transform, row-major storage.
/// Column j of the upper 3x3 is the world step per unit increment of axis j;
/// the fourth column is the world position of voxel (0,0,0).
struct Affine {
    std::array<double, 16> m{};

    double& at(int r, int c) { return m[static_cast<std::size_t>(r) * 4 + c]; }
    double at(int r, int c) const { return m[static_cast<std::size_t>(r) * 4 + c]; }

    static Affine identity() {
        Affine a;
        a.at(0, 0) = a.at(1, 1) = a.at(2, 2) = a.at(3, 3) = 1.0;
        return a;
    }

    /// Axis-aligned scaling with optional translation.
    static Affine diagonal(const std::array<double, 3>& scale,
                           const std::array<double, 3>& origin = {0, 0, 0}) {
        Affine a = identity();
        for (int i = 0; i < 3; ++i) {
            a.at(i, i) = scale[i];
            a.at(i, 3) = origin[i];
        }
        return a;
    }

    std::array<double, 3> apply(double x, double y, double z) const {
        std::array<double, 3> out{};
        for (int r = 0; r < 3; ++r)
            out[r] = at(r, 0) * x + at(r, 1) * y + at(r, 2) * z + at(r, 3);
        return out;
    }

    std::array<double, 3> apply(const std::array<double, 3>& p) const {
        return apply(p[0], p[1], p[2]);
    }

    Affine operator*(const Affine& o) const {
        Affine r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += at(i, k) * o.at(k, j);
                r.at(i, j) = s;
            }
        return r;
    }

    double det3() const {
        return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
               at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
               at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    }

    /// Euclidean norm of column j of the 3x3 part; equals the voxel spacing
    /// along axis j for any rigid-plus-scaling transform.
    double column_norm(int j) const {
        return std::sqrt(at(0, j) * at(0, j) + at(1, j) * at(1, j) + at(2, j) * at(2, j));
    }

    std::array<double, 3> column_norms() const {
        return {column_norm(0), column_norm(1), column_norm(2)};
    }

    /// Inverse assuming the last row is (0,0,0,1): inverts the 3x3 block and
    /// back-solves the translation. Throws DegenerateAffineError if singular.
    Affine inverse() const {
        const double d = det3();
        if (std::abs(d) < 1e-12)
            throw DegenerateAffineError("affine 3x3 block is singular");
        Affine r = identity();
        // adjugate / det
        r.at(0, 0) = (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) / d;
        r.at(0, 1) = (at(0, 2) * at(2, 1) - at(0, 1) * at(2, 2)) / d;
        r.at(0, 2) = (at(0, 1) * at(1, 2) - at(0, 2) * at(1, 1)) / d;
        r.at(1, 0) = (at(1, 2) * at(2, 0) - at(1, 0) * at(2, 2)) / d;
        r.at(1, 1) = (at(0, 0) * at(2, 2) - at(0, 2) * at(2, 0)) / d;
        r.at(1, 2) = (at(0, 2) * at(1, 0) - at(0, 0) * at(1, 2)) / d;
        r.at(2, 0) = (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0)) / d;
        r.at(2, 1) = (at(0, 1) * at(2, 0) - at(0, 0) * at(2, 1)) / d;
        r.at(2, 2) = (at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0)) / d;
        for (int i = 0; i < 3; ++i) {
            double t = 0;
            for (int k = 0; k < 3; ++k) t += r.at(i, k) * at(k, 3);
            r.at(i, 3) = -t;
        }
        return r;
    }

    bool almost_equal(const Affine& o, double tol) const {
        for (int i = 0; i < 16; ++i)
            if (std::abs(m[i] - o.m[i]) > tol) return false;
        return true;
    }
};

}  // namespace lesionbench

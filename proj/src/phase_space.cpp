#include "tmss/phase_space.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tmss {

namespace {

void require_even_square(const Matrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols() || m.rows() % 2 != 0) {
        throw std::invalid_argument(
            fmt::format("{} must be a non-empty even-dimensional square matrix, got {}x{}", what, m.rows(), m.cols()));
    }
}

std::vector<double> symplectic_spectrum(const Matrix& sigma) {
    const int n = static_cast<int>(sigma.rows()) / 2;
    Eigen::EigenSolver<Matrix> solver(symplectic_form(n) * sigma, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symplectic eigenvalue solve did not converge");
    }
    std::vector<double> moduli;
    moduli.reserve(2 * n);
    for (const auto& ev : solver.eigenvalues()) {
        moduli.push_back(std::abs(ev));
    }
    std::sort(moduli.begin(), moduli.end());
    // eigenvalues of i Omega sigma come in +/- pairs
    std::vector<double> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        out.push_back(moduli[2 * k]);
    }
    return out;
}

Matrix rotation_block(double theta) {
    Matrix r(2, 2);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    r << c, -s, s, c;
    return r;
}

}  // namespace

Matrix symplectic_form(int n_modes) {
    if (n_modes <= 0) {
        throw std::invalid_argument("n_modes must be positive");
    }
    Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

CovarianceMatrix::CovarianceMatrix(Matrix entries) : entries_(std::move(entries)) {
    require_even_square(entries_, "covariance matrix");
    if (!entries_.allFinite()) {
        throw std::invalid_argument("covariance matrix has non-finite entries");
    }
    const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
        throw std::invalid_argument(fmt::format("covariance matrix not symmetric (defect {:.3e})", asym));
    }
    // exact symmetrization so downstream congruences stay symmetric
    entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
    const auto nus = symplectic_spectrum(entries_);
    const double m = entries_.cwiseAbs().maxCoeff();
    const double tol = std::max(kUncertaintyTol, kUncertaintyRoundoff * std::numeric_limits<double>::epsilon() * m * m);
    if (nus.front() < kVacuumVariance - tol) {
        throw std::invalid_argument(
            fmt::format("covariance matrix violates the uncertainty bound (symplectic eigenvalue {:.17g})", nus.front()));
    }
}

CovarianceMatrix CovarianceMatrix::vacuum(int n_modes) {
    if (n_modes <= 0) {
        throw std::invalid_argument("n_modes must be positive");
    }
    return CovarianceMatrix(kVacuumVariance * Matrix::Identity(2 * n_modes, 2 * n_modes));
}

SymplecticTransform::SymplecticTransform(Matrix m) : m_(std::move(m)) {
    require_even_square(m_, "symplectic transform");
    // tolerance scaled by the entry size so strongly squeezing maps are not rejected on round-off
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    const double defect = symplectic_defect();
    if (!(defect <= kSymplecticTol * scale * scale)) {
        throw std::invalid_argument(fmt::format("matrix is not symplectic (defect {:.3e})", defect));
    }
}

SymplecticTransform SymplecticTransform::identity(int n_modes) {
    return SymplecticTransform(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

double SymplecticTransform::symplectic_defect() const {
    const Matrix omega = symplectic_form(dim() / 2);
    return (m_ * omega * m_.transpose() - omega).cwiseAbs().maxCoeff();
}

SymplecticTransform SymplecticTransform::inverse() const {
    // S^{-1} = -Omega S^T Omega
    const Matrix omega = symplectic_form(dim() / 2);
    return SymplecticTransform(-omega * m_.transpose() * omega);
}

SymplecticTransform operator*(const SymplecticTransform& a, const SymplecticTransform& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("symplectic transforms have different dimensions");
    }
    return SymplecticTransform(a.m_ * b.m_);
}

EprBasisChange::EprBasisChange()
    : s_([] {
          const double h = 1.0 / std::sqrt(2.0);
          Matrix m(4, 4);
          // rows: xi, nu, eta, mu
          m << h, 0, -h, 0,
               0, h, 0, -h,
               h, 0, h, 0,
               0, h, 0, h;
          return SymplecticTransform(m);
      }()) {}

SymplecticTransform mode_rotation(double theta, int mode_index, int n_modes) {
    if (n_modes <= 0 || mode_index < 0 || mode_index >= n_modes) {
        throw std::out_of_range(fmt::format("mode index {} out of range for {} modes", mode_index, n_modes));
    }
    Matrix m = Matrix::Identity(2 * n_modes, 2 * n_modes);
    m.block(2 * mode_index, 2 * mode_index, 2, 2) = rotation_block(theta);
    return SymplecticTransform(m);
}

SymplecticTransform mode_squeezer(double r, int mode_index, int n_modes) {
    if (n_modes <= 0 || mode_index < 0 || mode_index >= n_modes) {
        throw std::out_of_range(fmt::format("mode index {} out of range for {} modes", mode_index, n_modes));
    }
    Matrix m = Matrix::Identity(2 * n_modes, 2 * n_modes);
    m(2 * mode_index, 2 * mode_index) = std::exp(-r);
    m(2 * mode_index + 1, 2 * mode_index + 1) = std::exp(r);
    return SymplecticTransform(m);
}

EprBasisChange epr_basis_change() { return EprBasisChange{}; }

SymplecticTransform vb_rotation(double theta) {
    const Matrix e = epr_basis_change().matrix();
    Matrix rot = Matrix::Identity(4, 4);
    rot.block(2, 2, 2, 2) = rotation_block(theta);
    return SymplecticTransform(e.transpose() * rot * e);
}

CovarianceMatrix apply_transform(const CovarianceMatrix& sigma, const SymplecticTransform& s) {
    if (sigma.dim() != s.dim()) {
        throw std::invalid_argument(
            fmt::format("dimension mismatch: covariance {} vs transform {}", sigma.dim(), s.dim()));
    }
    Matrix out = s.matrix() * sigma.matrix() * s.matrix().transpose();
    out = 0.5 * (out + out.transpose()).eval();
    return CovarianceMatrix(std::move(out));
}

CovarianceMatrix reduce(const CovarianceMatrix& sigma, int keep_mode) {
    if (sigma.n_modes() != 2) {
        throw std::invalid_argument("reduce expects a two-mode covariance matrix");
    }
    if (keep_mode != 0 && keep_mode != 1) {
        throw std::out_of_range(fmt::format("keep_mode must be 0 or 1, got {}", keep_mode));
    }
    return CovarianceMatrix(sigma.matrix().block(2 * keep_mode, 2 * keep_mode, 2, 2));
}

double purity(const CovarianceMatrix& sigma) {
    const double det = sigma.matrix().determinant();
    if (!(det > 0.0)) {
        throw std::domain_error(fmt::format("covariance determinant {:.3e} is not positive", det));
    }
    return std::pow(kVacuumVariance, sigma.n_modes()) / std::sqrt(det);
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& sigma) {
    return symplectic_spectrum(sigma.matrix());
}

}  // namespace tmss

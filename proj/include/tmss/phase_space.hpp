#pragma once

// Zero-mean Gaussian states in the covariance-matrix picture.
//
// Quadratures are dimensionless with vacuum variance 1/4 and are ordered
// (x1, p1, x2, p2, ...). The symplectic form is block diagonal with blocks
// [[0, 1], [-1, 0]].

#include <Eigen/Dense>

#include <vector>

namespace tmss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using PhasePoint = Eigen::Vector4d;

inline constexpr double kVacuumVariance = 0.25;
inline constexpr double kSymmetryTol = 1e-12;
/// Absolute floor of the uncertainty-bound tolerance. Entries of size m carry
/// round-off of order eps * m^2 into the symplectic spectrum, so large states get
/// max(kUncertaintyTol, kUncertaintyRoundoff * eps * m^2).
inline constexpr double kUncertaintyTol = 1e-9;
inline constexpr double kUncertaintyRoundoff = 16.0;
inline constexpr double kSymplecticTol = 1e-10;

/// Standard symplectic form for n modes.
Matrix symplectic_form(int n_modes);

/// Real symmetric 2n x 2n second-moment matrix of a physical Gaussian state.
///
/// Construction checks symmetry (1e-12 absolute) and the uncertainty bound
/// (every symplectic eigenvalue >= 1/4 - 1e-9) and throws
/// std::invalid_argument otherwise.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(Matrix entries);

    static CovarianceMatrix vacuum(int n_modes);

    int dim() const { return static_cast<int>(entries_.rows()); }
    int n_modes() const { return dim() / 2; }
    const Matrix& matrix() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

private:
    Matrix entries_;
};

/// Real 2n x 2n matrix S with S Omega S^T = Omega (to 1e-10).
///
/// Acts actively on states: sigma -> S sigma S^T, W(z) -> W(S^{-1} z).
class SymplecticTransform {
public:
    explicit SymplecticTransform(Matrix m);

    static SymplecticTransform identity(int n_modes);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    SymplecticTransform inverse() const;

    /// Max-norm deviation of S Omega S^T from Omega.
    double symplectic_defect() const;

    friend SymplecticTransform operator*(const SymplecticTransform& a, const SymplecticTransform& b);

private:
    Matrix m_;
};

/// Fixed map (x1, p1, x2, p2) -> (xi, nu, eta, mu) with
/// xi = (x1 - x2)/sqrt2, nu = (p1 - p2)/sqrt2, eta = (x1 + x2)/sqrt2, mu = (p1 + p2)/sqrt2.
/// Both (xi, nu) and (eta, mu) are conjugate pairs, so the matrix is orthogonal and symplectic.
class EprBasisChange {
public:
    EprBasisChange();

    const SymplecticTransform& transform() const { return s_; }
    const Matrix& matrix() const { return s_.matrix(); }

    PhasePoint to_epr(const PhasePoint& lab) const { return s_.matrix() * lab; }
    PhasePoint to_lab(const PhasePoint& epr) const { return s_.matrix().transpose() * epr; }

private:
    SymplecticTransform s_;
};

/// Rotation by theta in the (x, p) plane of one mode. The image of the
/// position axis is cos(theta) x + sin(theta) p, i.e. the quadrature
/// Lambda(theta) generated by exp(-i theta a^dagger a).
SymplecticTransform mode_rotation(double theta, int mode_index, int n_modes);

/// Single-mode squeezer diag(e^{-r}, e^{r}) on the selected mode.
SymplecticTransform mode_squeezer(double r, int mode_index, int n_modes);

EprBasisChange epr_basis_change();

/// Rotation by theta of the collective (eta, mu) plane, (xi, nu) untouched,
/// expressed in lab coordinates. At theta = pi/2 it maps eta -> mu, mu -> -eta.
SymplecticTransform vb_rotation(double theta);

/// S sigma S^T.
CovarianceMatrix apply_transform(const CovarianceMatrix& sigma, const SymplecticTransform& s);

/// Covariance of one mode of a two-mode state (its 2x2 diagonal block).
CovarianceMatrix reduce(const CovarianceMatrix& sigma, int keep_mode);

/// tr rho^2 = (1/4)^n / sqrt(det sigma).
double purity(const CovarianceMatrix& sigma);

/// Moduli of the eigenvalues of i Omega sigma, one per mode, ascending.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& sigma);

}  // namespace tmss

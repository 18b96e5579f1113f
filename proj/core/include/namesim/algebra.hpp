#pragma once

#include "namesim/protocol.hpp"
#include "namesim/units.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace namesim {

using cplx = std::complex<double>;

// F+ = A Q + B P and b = sqrt(c) F+, with [b, b^dagger] = 1.
struct QuadratureCoefficients {
    cplx A;
    cplx B;
    double c = 0.0;
    double kappa = 0.0;
};

QuadratureCoefficients eigenoperator_coefficients(double mu, double omega0, double m,
                                                  const UnitSystem& u = {});
QuadratureCoefficients eigenoperator_coefficients(const Protocol& p, double m,
                                                  const UnitSystem& u = {});

// G(t) = profile(t) * A0 acting on the scaled quadratures (Qbar, Pbar).
struct GeneratorMatrix {
    Eigen::MatrixXcd A0;
    std::function<double(double)> profile;
};

GeneratorMatrix generator_matrix(const Protocol& p);

struct Eigenpairs {
    Eigen::VectorXcd values;
    // Row j is the left eigenvector of values(j): left.row(j) * A0 = values(j) * left.row(j).
    Eigen::MatrixXcd left;
};

// Left eigenvectors are scaled so their last component is 1 when possible,
// otherwise to unit norm; pairs are sorted by descending imaginary part.
Eigenpairs eigen_decompose_generator(const Eigen::MatrixXcd& A0);
Eigenpairs eigen_decompose_generator(const GeneratorMatrix& G);

struct PositionDecomposition {
    double xi = 1.0;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
    QuadratureCoefficients coeffs;
};

PositionDecomposition decompose_position(const Protocol& p, double t, double m,
                                         const UnitSystem& u = {});

// (b, b^dagger) = T (Q, P) and its inverse.
Eigen::Matrix2cd ladder_from_quadratures(const QuadratureCoefficients& q);
Eigen::Matrix2cd quadratures_from_ladder(const QuadratureCoefficients& q);

} // namespace namesim

#include "namesim/algebra.hpp"

#include "namesim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace namesim {

QuadratureCoefficients eigenoperator_coefficients(double mu, double omega0, double m,
                                                  const UnitSystem& u) {
    if (!(m > 0.0))
        throw DomainError("mass must be positive");
    if (!(omega0 > 0.0))
        throw DomainError("omega0 must be positive");
    double k = kappa(mu);
    QuadratureCoefficients q;
    q.kappa = k;
    q.A = 0.5 * cplx(1.0, mu / k);
    q.B = cplx(0.0, 1.0 / (m * omega0 * k));
    q.c = 1.0 / (2.0 * u.hbar * std::imag(std::conj(q.A) * q.B));
    return q;
}

QuadratureCoefficients eigenoperator_coefficients(const Protocol& p, double m,
                                                  const UnitSystem& u) {
    return eigenoperator_coefficients(p.mu(), p.omega0(), m, u);
}

GeneratorMatrix generator_matrix(const Protocol& p) {
    double mu = p.mu();
    GeneratorMatrix G;
    G.A0.resize(2, 2);
    G.A0 << mu / 2.0, 1.0, -1.0, -mu / 2.0;
    G.profile = [p](double t) { return omega_at(p, t); };
    return G;
}

Eigenpairs eigen_decompose_generator(const Eigen::MatrixXcd& A0) {
    if (A0.rows() != A0.cols() || A0.rows() == 0)
        throw DomainError("generator must be a non-empty square matrix");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A0);
    if (es.info() != Eigen::Success)
        throw DefectiveMatrixError("eigen decomposition did not converge");
    const Eigen::MatrixXcd& V = es.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
    const auto& sv = svd.singularValues();
    double smin = sv(sv.size() - 1);
    if (smin == 0.0 || sv(0) / smin > 1e12)
        throw DefectiveMatrixError("eigenvector matrix is numerically singular");

    Eigen::MatrixXcd W = V.inverse();
    const Eigen::Index n = A0.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        cplx last = W(j, n - 1);
        if (std::abs(last) > 1e-12 * W.row(j).norm())
            W.row(j) /= last;
        else
            W.row(j).normalize();
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto& ev = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return ev(a).imag() > ev(b).imag();
    });

    Eigenpairs out;
    out.values.resize(n);
    out.left.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.values(j) = ev(order[static_cast<std::size_t>(j)]);
        out.left.row(j) = W.row(order[static_cast<std::size_t>(j)]);
    }
    return out;
}

Eigenpairs eigen_decompose_generator(const GeneratorMatrix& G) {
    return eigen_decompose_generator(G.A0);
}

PositionDecomposition decompose_position(const Protocol& p, double t, double m,
                                         const UnitSystem& u) {
    const auto& seg = p.segment(p.segment_index(t));
    double w = omega_at(p, t);
    PositionDecomposition d;
    d.xi = std::sqrt(seg.omega_start / w);
    auto th = theta_pm(p, t);
    d.theta_plus = th.first;
    d.theta_minus = th.second;
    d.coeffs = eigenoperator_coefficients(seg.mu, seg.omega_start, m, u);
    return d;
}

Eigen::Matrix2cd ladder_from_quadratures(const QuadratureCoefficients& q) {
    double s = std::sqrt(q.c);
    Eigen::Matrix2cd T;
    T << s * q.A, s * q.B, s * std::conj(q.A), s * std::conj(q.B);
    return T;
}

Eigen::Matrix2cd quadratures_from_ladder(const QuadratureCoefficients& q) {
    return ladder_from_quadratures(q).inverse();
}

} // namespace namesim

#include "excsim/state.hpp"

#include <stdexcept>

namespace excsim {

Eigen::Matrix2cd renormalized_exciton_block(const Rho3& rho) {
    const double pop = exciton_population(rho);
    if (!(pop > 0.0)) throw std::runtime_error("vanishing exciton population");
    return exciton_block(rho) / pop;
}

bool is_physical_density(const Rho3& rho, double tol) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(rho.trace().real() - 1.0) > tol) return false;
    if (std::abs(rho.trace().imag()) > tol) return false;
    Eigen::SelfAdjointEigenSolver<Rho3> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

Eigen::Vector3d bloch_vector(const Eigen::Matrix2cd& rho) {
    return {2.0 * rho(0, 1).real(),
            2.0 * rho(0, 1).imag(),
            rho(0, 0).real() - rho(1, 1).real()};
}

Eigen::Matrix2cd density_from_bloch(const Eigen::Vector3d& r) {
    Eigen::Matrix2cd rho;
    rho << 0.5 * (1.0 + r(2)), 0.5 * complexd(r(0), r(1)),
           0.5 * complexd(r(0), -r(1)), 0.5 * (1.0 - r(2));
    return rho;
}

} // namespace excsim

#ifndef REBMBO_KERNELS_HPP
#define REBMBO_KERNELS_HPP

#include "rebmbo/common.hpp"

namespace rebmbo::kernels {

/// Parameters of the RBF + Matern-5/2 mixture
///   k(x, x') = amplitude * (w_rbf * k_rbf(x, x') + w_matern * k_matern(x, x')).
/// The RBF term carries one lengthscale per input dimension (Lambda = diag(l_i^2));
/// the Matern term is isotropic. Lengthscales are expressed in whatever
/// coordinates the caller feeds in (the GP uses the unit box).
struct KernelParams {
    double amplitude = 1.0;
    Vector rbf_lengthscales;
    double matern_lengthscale = 0.2;
    double w_rbf = 0.5;
    double w_matern = 0.5;

    static KernelParams defaults(Eigen::Index dim, double lengthscale = 0.2);

    /// Throws ParameterError if any invariant is violated.
    void validate() const;
    [[nodiscard]] double prior_variance() const { return amplitude * (w_rbf + w_matern); }

    bool operator==(const KernelParams&) const;
};

double rbf(const Vector& x, const Vector& xp, const Vector& lengthscales);
double matern52(const Vector& x, const Vector& xp, double lengthscale);
double mixture(const Vector& x, const Vector& xp, const KernelParams& params);

/// Gram matrix over the rows of X. Entries are evaluated once per unordered
/// pair, so the result is exactly symmetric.
Matrix gram(const Matrix& X, const KernelParams& params);

/// Cross-covariance between the rows of A and the rows of B.
Matrix cross(const Matrix& A, const Matrix& B, const KernelParams& params);

/// Covariance of x against every row of X.
Vector cross(const Matrix& X, const Vector& x, const KernelParams& params);

}  // namespace rebmbo::kernels

#endif  // REBMBO_KERNELS_HPP

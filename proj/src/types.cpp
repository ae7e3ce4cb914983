#include "oqw/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace oqw {

WalkModel make_walk_model(int d, std::vector<Matrix> ops, double tol_norm) {
    if (d < 1) throw StructuralError("lattice dimension must be positive");
    if (tol_norm < 0) throw StructuralError("tol_norm must be nonnegative");
    const auto expected = static_cast<std::size_t>(2 * d + 1);
    if (ops.size() != expected) {
        std::ostringstream msg;
        msg << "expected " << expected << " transition operators for d=" << d << ", got "
            << ops.size();
        throw StructuralError(msg.str());
    }
    const auto D = ops[0].rows();
    if (D < 1) throw StructuralError("coin dimension must be positive (operator 0 is empty)");
    for (std::size_t j = 0; j < ops.size(); ++j) {
        if (ops[j].rows() != ops[j].cols()) {
            std::ostringstream msg;
            msg << "operator " << j << " is not square (" << ops[j].rows() << "x"
                << ops[j].cols() << ")";
            throw StructuralError(msg.str());
        }
        if (ops[j].rows() != D) {
            std::ostringstream msg;
            msg << "operator " << j << " has dimension " << ops[j].rows()
                << ", inconsistent with operator 0 (" << D << ")";
            throw StructuralError(msg.str());
        }
    }
    WalkModel model;
    model.d = d;
    model.D = static_cast<int>(D);
    model.ops = std::move(ops);
    model.tol_norm = tol_norm;
    return model;
}

double normalization_residual(const WalkModel& model) {
    Matrix sum = Matrix::Zero(model.D, model.D);
    for (const auto& A : model.ops) sum += A.adjoint() * A;
    sum -= Matrix::Identity(model.D, model.D);
    return sum.cwiseAbs().maxCoeff();
}

Matrix apply_coin_map(const WalkModel& model, const Matrix& tau) {
    if (tau.rows() != model.D || tau.cols() != model.D)
        throw StructuralError("coin state dimension does not match the model");
    Matrix out = Matrix::Zero(model.D, model.D);
    for (const auto& A : model.ops) out += A * tau * A.adjoint();
    return out;
}

Matrix apply_dual_map(const WalkModel& model, const Matrix& X) {
    if (X.rows() != model.D || X.cols() != model.D)
        throw StructuralError("observable dimension does not match the model");
    Matrix out = Matrix::Zero(model.D, model.D);
    for (const auto& A : model.ops) out += A.adjoint() * X * A;
    return out;
}

void validate_coin_state(const Matrix& rho, double tol) {
    if (rho.rows() != rho.cols()) throw StructuralError("coin state must be square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw StructuralError("coin state is not Hermitian within tolerance");
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
        throw StructuralError("coin state trace is not 1 within tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
    if (es.eigenvalues().minCoeff() < -tol)
        throw StructuralError("coin state has a negative eigenvalue beyond tolerance");
}

Matrix maximally_mixed(int D) {
    return Matrix::Identity(D, D) / static_cast<double>(D);
}

}  // namespace oqw

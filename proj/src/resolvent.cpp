#include "nuhawkes/resolvent.hpp"

#include "nuhawkes/errors.hpp"
#include "detail.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace nuhawkes {

namespace {

using Complex = std::complex<double>;

using detail::complex_expm1;

double max_abs(const ComplexMatrix& m) {
    return m.cwiseAbs().maxCoeff();
}

// Invert I - A, or nothing when the matrix is numerically singular.
std::optional<ComplexMatrix> inverse_of_identity_minus(const ComplexMatrix& a) {
    const auto d = a.rows();
    const ComplexMatrix m = ComplexMatrix::Identity(d, d) - a;
    Eigen::FullPivLU<ComplexMatrix> lu(m);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible()) {
        return std::nullopt;
    }
    return lu.inverse();
}

std::string index_suffix(std::size_t i, std::size_t j, std::size_t d) {
    if (d == 1) {
        return "";
    }
    return "_" + std::to_string(i) + std::to_string(j);
}

} // namespace

Matrix ResolventTable::psi_at(double t) const {
    if (t < 0.0 || t > grid.end() * (1.0 + 1e-12)) {
        throw OutOfRangeError("time outside resolvent table");
    }
    auto k = static_cast<std::size_t>(t / grid.step());
    return psi[std::min(k, psi.size() - 1)];
}

Matrix ResolventTable::cumulative_at(double t) const {
    if (t < 0.0 || t > grid.end() * (1.0 + 1e-12)) {
        throw OutOfRangeError("time outside resolvent table");
    }
    const auto k = std::min(static_cast<std::size_t>(t / grid.step()), psi.size() - 1);
    return cumulative[k] + (t - grid.node(k)) * psi[k];
}

ComplexMatrix ResolventTable::laplace(std::complex<double> z) const {
    const auto d = static_cast<Eigen::Index>(dimension());
    const double h = grid.step();
    const Complex cell_factor = (z == 0.0) ? Complex(h) : -complex_expm1(-z * h) / z;
    const Complex ratio = std::exp(-z * h);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    Complex shift = 1.0;
    for (const auto& cell : psi) {
        out += (shift * cell_factor) * cell.cast<Complex>();
        shift *= ratio;
    }
    return out;
}

void ResolventTable::write_csv(std::ostream& out) const {
    const std::size_t d = dimension();
    const bool scaled = !density.empty();
    out << "t";
    for (const char* prefix : {"psi", "cumnorm", "fn", "Fn"}) {
        if (!scaled && (prefix[0] == 'f' || prefix[0] == 'F')) {
            continue;
        }
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                out << ',' << prefix << index_suffix(i, j, d);
            }
        }
    }
    out << '\n';
    out.precision(17);
    // One row per node; the cell value is the one starting at the node (the
    // last node repeats the final cell).
    for (std::size_t k = 0; k < cumulative.size(); ++k) {
        const std::size_t cell = std::min(k, psi.size() - 1);
        out << grid.node(k);
        auto emit = [&](const Matrix& m) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    out << ',' << m(i, j);
                }
            }
        };
        emit(psi[cell]);
        emit(cumulative[k]);
        if (scaled) {
            emit(density[cell]);
            emit(distribution[k]);
        }
        out << '\n';
    }
}

ResolventTable resolvent_grid(const Kernel& kernel, const Grid& grid) {
    ResolventTable table;
    table.grid = grid;
    const std::size_t m = grid.cells();
    const std::size_t d = kernel.dimension();
    const auto di = static_cast<Eigen::Index>(d);
    const double h = grid.step();

    try {
        const auto report = l1_and_stability(kernel);
        if (!report.stable) {
            table.warnings.push_back("spectral radius " + std::to_string(report.spectral_radius) +
                                     " >= 1: resolvent norms grow with the horizon");
        }
    } catch (const DomainError&) {
        table.warnings.push_back("kernel not integrable on [0, inf): resolvent computed on [0, T] only");
    }

    // Per-pair flat arrays keep the O(m^2) inner loop contiguous.
    std::vector<std::vector<double>> phibar(d * d, std::vector<double>(m));
    for (std::size_t k = 0; k < m; ++k) {
        const Matrix cell = kernel.cell_integral(grid.node(k), grid.node(k + 1)) / h;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                phibar[i * d + j][k] = cell(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }

    std::vector<std::vector<double>> psi(d * d, std::vector<double>(m));
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t l = 0; l < d; ++l) {
                double conv = 0.0;
                for (std::size_t r = 0; r < d; ++r) {
                    const double* phi_ir = phibar[i * d + r].data();
                    const double* psi_rl = psi[r * d + l].data();
                    // sum_{j<k} phibar_{k-1-j} psi_j
                    for (std::size_t j = 0; j < k; ++j) {
                        conv += phi_ir[k - 1 - j] * psi_rl[j];
                    }
                }
                psi[i * d + l][k] = phibar[i * d + l][k] + h * conv;
            }
        }
    }

    table.psi.assign(m, Matrix::Zero(di, di));
    table.cumulative.assign(m + 1, Matrix::Zero(di, di));
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t l = 0; l < d; ++l) {
                table.psi[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = psi[i * d + l][k];
            }
        }
        table.cumulative[k + 1] = table.cumulative[k] + h * table.psi[k];
    }
    return table;
}

double discrete_residual(const Kernel& kernel, const ResolventTable& table) {
    const double h = table.grid.step();
    const std::size_t m = table.psi.size();
    std::vector<Matrix> phibar(m);
    for (std::size_t k = 0; k < m; ++k) {
        phibar[k] = kernel.cell_integral(table.grid.node(k), table.grid.node(k + 1)) / h;
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        Matrix rhs = phibar[k];
        for (std::size_t j = 0; j < k; ++j) {
            rhs += h * phibar[k - 1 - j] * table.psi[j];
        }
        worst = std::max(worst, (table.psi[k] - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

ResolventTable scaled_resolvent_measure(const NearlyUnstableFamily& family, std::size_t n, const Grid& grid) {
    const double beta = family.beta(n);
    ResolventTable table = resolvent_grid(family.kernel(n), grid);
    table.beta = beta;
    table.density.reserve(table.psi.size());
    table.distribution.reserve(table.cumulative.size());
    const auto d = static_cast<Eigen::Index>(table.dimension());
    Matrix squares = Matrix::Zero(d, d);
    for (const auto& cell : table.psi) {
        table.density.push_back(beta * cell);
        squares += grid.step() * cell.cwiseAbs2();
    }
    for (const auto& node : table.cumulative) {
        table.distribution.push_back(beta * node);
    }
    table.scaled_l2 = beta * squares.cwiseSqrt();
    return table;
}

std::vector<LaplaceResidual> verify_laplace_identity(const Kernel& kernel, const ResolventTable& table,
                                                     const std::vector<double>& z_list) {
    std::vector<LaplaceResidual> out;
    out.reserve(z_list.size());
    for (double z : z_list) {
        if (!(z > 0.0)) {
            throw DomainError("Laplace identity check needs z > 0");
        }
        LaplaceResidual r;
        r.z = z;
        const ComplexMatrix lphi = kernel.laplace(z);
        const auto inv = inverse_of_identity_minus(lphi);
        if (!inv) {
            r.singular = true;
            r.residual = std::numeric_limits<double>::quiet_NaN();
        } else {
            r.residual = max_abs(table.laplace(z) - (*inv) * lphi);
        }
        out.push_back(r);
    }
    return out;
}

FourierLimitReport fourier_scaling_limit(const FourierFamily& family, double z,
                                          const std::vector<std::size_t>& n_list) {
    FourierLimitReport report;
    report.z = z;
    const auto d = static_cast<Eigen::Index>(family.dimension);
    const ComplexMatrix b = family.limit_b(z);
    Eigen::FullPivLU<ComplexMatrix> lu(b);
    if (!lu.isInvertible()) {
        throw DomainError("B(z) is not invertible at the requested z");
    }
    report.limit = lu.inverse();
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t n : n_list) {
        FourierLimitEntry entry;
        entry.n = n;
        entry.beta = family.beta(n);
        const ComplexMatrix fphi = family.fourier_phi(n, z);
        const auto inv = inverse_of_identity_minus(fphi);
        if (!inv) {
            entry.singular = true;
            entry.value = ComplexMatrix::Zero(d, d);
            entry.deviation = std::numeric_limits<double>::quiet_NaN();
            report.deviation_decreasing = false;
        } else {
            entry.value = entry.beta * (*inv) * fphi;
            entry.deviation = max_abs(entry.value - report.limit);
            if (!(entry.deviation < previous)) {
                report.deviation_decreasing = false;
            }
            previous = entry.deviation;
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

FourierFamily exact_linear_family(std::size_t dimension, std::function<ComplexMatrix(double)> limit_b) {
    FourierFamily family;
    family.dimension = dimension;
    family.beta = [](std::size_t n) { return 1.0 / static_cast<double>(n); };
    family.limit_b = limit_b;
    family.fourier_phi = [dimension, limit_b](std::size_t n, double z) {
        const auto d = static_cast<Eigen::Index>(dimension);
        return ComplexMatrix(ComplexMatrix::Identity(d, d) - limit_b(z) / static_cast<double>(n));
    };
    return family;
}

FourierFamily jr_fourier_family(const NearlyUnstableFamily& jr) {
    const auto* form = std::get_if<ExponentialForm>(&jr.base().form());
    if (form == nullptr) {
        throw InvalidParameter("jr_fourier_family needs an exponential base kernel");
    }
    const Matrix& alpha = form->alpha;
    const Matrix& rate = form->beta;
    const auto d = alpha.rows();
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const bool ok = (i == j) ? std::abs(alpha(i, j) - rate(i, j)) <= 1e-12 * rate(i, j)
                                     : alpha(i, j) == 0.0;
            if (!ok) {
                throw InvalidParameter("jr_fourier_family needs a diagonal unit-mass exponential base");
            }
        }
    }
    FourierFamily family;
    family.dimension = static_cast<std::size_t>(d);
    family.beta = [jr](std::size_t n) { return jr.beta(n); };
    family.fourier_phi = [jr](std::size_t n, double z) { return jr.kernel(n).laplace(Complex(0.0, z)); };
    const double c = jr.c();
    const Vector rates = rate.diagonal();
    family.limit_b = [c, rates](double z) {
        const auto dim = rates.size();
        ComplexMatrix b = ComplexMatrix::Zero(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            b(i, i) = Complex(1.0, z / (c * rates(i)));
        }
        return b;
    };
    return family;
}

FourierBoundCheck fourier_spectral_bound(const Kernel& kernel, double z) {
    FourierBoundCheck check;
    const ComplexMatrix f = kernel.laplace(Complex(0.0, z));
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(f, false);
    check.fourier_radius = solver.eigenvalues().cwiseAbs().maxCoeff();
    check.l1_radius = spectral_radius(kernel.l1());

    const auto d = static_cast<Eigen::Index>(kernel.dimension());
    Matrix l2 = Matrix::Zero(d, d);
    bool computable = true;
    std::visit(
        [&](const auto& form) {
            using T = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<T, ExponentialForm>) {
                l2 = (form.alpha.cwiseAbs2().cwiseQuotient(2.0 * form.beta)).cwiseSqrt();
            } else if constexpr (std::is_same_v<T, GridForm>) {
                for (const auto& cell : form.cells) {
                    l2 += form.step * cell.cwiseAbs2();
                }
                l2 = l2.cwiseSqrt();
            } else {
                computable = false;
            }
        },
        kernel.form());
    check.l2_radius = computable ? spectral_radius(l2) : std::numeric_limits<double>::quiet_NaN();
    check.within_l1_bound = check.fourier_radius <= check.l1_radius * (1.0 + 1e-12) + 1e-15;
    return check;
}

} // namespace nuhawkes

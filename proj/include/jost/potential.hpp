#pragma once

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace jost {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// N x N interaction matrix U(r) in energy units. The solvers multiply row n by
/// 2 mu_n / hbar^2, so the coupled equations read u'' + (k^2 - l(l+1)/r^2) u = (2 mu / hbar^2) U u.
class RadialPotential {
public:
    virtual ~RadialPotential() = default;

    virtual std::size_t channels() const = 0;

    /// Writes V(r) into `out` (resized as needed). Hot path of every integrator.
    virtual void evaluate_into(cplx r, Matrix& out) const = 0;

    /// Exponential decay rates lambda_{nn'} along the real axis (may be +inf).
    virtual Eigen::MatrixXd decay_rates() const = 0;

    /// Largest |arg r| at which the potential may be evaluated; 0 means real axis only.
    /// The bound itself is excluded unless it is 0.
    virtual double max_rotation() const = 0;

    virtual std::string description() const = 0;

    Matrix evaluate(cplx r) const;
    double min_decay_rate() const;
};

/// V_{nn'}(r) = C_{nn'} r^p exp(-a_{nn'} r).
class ExponentialPotential : public RadialPotential {
public:
    ExponentialPotential(Eigen::MatrixXd strength, double power, Eigen::MatrixXd decay);
    ExponentialPotential(Eigen::MatrixXd strength, double power, double decay);

    std::size_t channels() const override { return static_cast<std::size_t>(strength_.rows()); }
    void evaluate_into(cplx r, Matrix& out) const override;
    Eigen::MatrixXd decay_rates() const override { return decay_; }
    double max_rotation() const override;
    std::string description() const override;

    const Eigen::MatrixXd& strength() const { return strength_; }
    double power() const { return power_; }

private:
    Eigen::MatrixXd strength_;
    double power_;
    Eigen::MatrixXd decay_;
};

/// Two-channel benchmark: [[-1, -7.5], [-7.5, 7.5]] r^2 e^{-r}.
class NoroTaylorPotential final : public ExponentialPotential {
public:
    NoroTaylorPotential();
    std::string description() const override { return "noro_taylor"; }
};

/// V identically zero.
class ZeroPotential final : public RadialPotential {
public:
    explicit ZeroPotential(std::size_t channels);

    std::size_t channels() const override { return n_; }
    void evaluate_into(cplx r, Matrix& out) const override;
    Eigen::MatrixXd decay_rates() const override;
    double max_rotation() const override;
    std::string description() const override { return "zero"; }

private:
    std::size_t n_;
};

/// W(r) = V(s r) for a positive scale s; decay rates scale by s.
class ScaledRadiusPotential final : public RadialPotential {
public:
    ScaledRadiusPotential(std::shared_ptr<const RadialPotential> base, double scale);

    std::size_t channels() const override { return base_->channels(); }
    void evaluate_into(cplx r, Matrix& out) const override { base_->evaluate_into(scale_ * r, out); }
    Eigen::MatrixXd decay_rates() const override { return scale_ * base_->decay_rates(); }
    double max_rotation() const override { return base_->max_rotation(); }
    std::string description() const override;

private:
    std::shared_ptr<const RadialPotential> base_;
    double scale_;
};

/// Real potential tabulated on a radial grid. Cubic spline inside the grid,
/// per-entry exponential tail beyond it. Real radii only.
class TabulatedPotential final : public RadialPotential {
public:
    /// values[i] is the N x N matrix at radii[i].
    TabulatedPotential(std::vector<double> radii, std::vector<Eigen::MatrixXd> values, std::string source = "table");
    ~TabulatedPotential() override;
    TabulatedPotential(const TabulatedPotential&) = delete;
    TabulatedPotential& operator=(const TabulatedPotential&) = delete;

    /// Reads the plain-text format: header `# r V11 V12 ... VNN`, then rows of
    /// 1 + N^2 numbers in row-major matrix order with strictly increasing r.
    static std::unique_ptr<TabulatedPotential> load(const std::filesystem::path& path);

    std::size_t channels() const override { return n_; }
    void evaluate_into(cplx r, Matrix& out) const override;
    Eigen::MatrixXd decay_rates() const override { return tail_rate_; }
    double max_rotation() const override { return 0.0; }
    std::string description() const override { return source_; }

private:
    struct Splines;

    std::size_t n_;
    std::vector<double> radii_;
    Eigen::MatrixXd last_;
    Eigen::MatrixXd tail_rate_;
    std::unique_ptr<Splines> splines_;
    std::string source_;
};

}  // namespace jost

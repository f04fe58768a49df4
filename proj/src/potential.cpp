#include "jost/potential.hpp"

#include "jost/errors.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace jost {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_sector(cplx r, double max_rotation) {
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) throw InvalidArgument("non-finite radius");
    if (r == cplx{0.0, 0.0}) return;
    const double arg = std::abs(std::arg(r));
    if (max_rotation == 0.0 ? (r.imag() != 0.0 || r.real() < 0.0) : arg >= max_rotation)
        throw InvalidArgument("radius outside the potential's analyticity sector");
}

}  // namespace

Matrix RadialPotential::evaluate(cplx r) const {
    Matrix out(channels(), channels());
    evaluate_into(r, out);
    return out;
}

double RadialPotential::min_decay_rate() const {
    return decay_rates().minCoeff();
}

ExponentialPotential::ExponentialPotential(Eigen::MatrixXd strength, double power, Eigen::MatrixXd decay)
    : strength_(std::move(strength)), power_(power), decay_(std::move(decay)) {
    if (strength_.rows() == 0 || strength_.rows() != strength_.cols())
        throw InvalidArgument("potential strength must be a non-empty square matrix");
    if (decay_.rows() != strength_.rows() || decay_.cols() != strength_.cols())
        throw InvalidArgument("decay matrix must match the strength matrix");
    if (!(power_ >= 0.0) || !std::isfinite(power_)) throw InvalidArgument("radial power must be non-negative");
    if (!strength_.allFinite()) throw InvalidArgument("potential strength must be finite");
    if ((decay_.array() <= 0.0).any() || !decay_.allFinite())
        throw InvalidArgument("decay rates must be positive and finite");
}

ExponentialPotential::ExponentialPotential(Eigen::MatrixXd strength, double power, double decay)
    : ExponentialPotential(strength, power, Eigen::MatrixXd::Constant(strength.rows(), strength.cols(), decay)) {}

void ExponentialPotential::evaluate_into(cplx r, Matrix& out) const {
    check_sector(r, max_rotation());
    const auto n = strength_.rows();
    out.resize(n, n);
    if (r == cplx{0.0, 0.0}) {
        out.setZero();
        if (power_ == 0.0) out = strength_.cast<cplx>();
        return;
    }
    const cplx rp = power_ == 2.0 ? r * r : std::pow(r, power_);
    const bool uniform = (decay_.array() == decay_(0, 0)).all();
    if (uniform) {
        out = (rp * std::exp(-decay_(0, 0) * r)) * strength_.cast<cplx>();
        return;
    }
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) out(a, b) = strength_(a, b) * rp * std::exp(-decay_(a, b) * r);
}

double ExponentialPotential::max_rotation() const {
    return std::numbers::pi / 2.0;
}

std::string ExponentialPotential::description() const {
    std::ostringstream os;
    os.precision(17);
    os << "exponential(power=" << power_ << ", strength=[";
    for (Eigen::Index a = 0; a < strength_.rows(); ++a)
        for (Eigen::Index b = 0; b < strength_.cols(); ++b) os << (a + b ? "," : "") << strength_(a, b);
    os << "], decay=[";
    for (Eigen::Index a = 0; a < decay_.rows(); ++a)
        for (Eigen::Index b = 0; b < decay_.cols(); ++b) os << (a + b ? "," : "") << decay_(a, b);
    os << "])";
    return os.str();
}

NoroTaylorPotential::NoroTaylorPotential()
    : ExponentialPotential((Eigen::MatrixXd(2, 2) << -1.0, -7.5, -7.5, 7.5).finished(), 2.0, 1.0) {}

ZeroPotential::ZeroPotential(std::size_t channels) : n_(channels) {
    if (n_ == 0) throw InvalidArgument("zero potential needs at least one channel");
}

void ZeroPotential::evaluate_into(cplx r, Matrix& out) const {
    check_sector(r, max_rotation());
    out.setZero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
}

Eigen::MatrixXd ZeroPotential::decay_rates() const {
    return Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_), inf);
}

double ZeroPotential::max_rotation() const {
    return std::numbers::pi / 2.0;
}

ScaledRadiusPotential::ScaledRadiusPotential(std::shared_ptr<const RadialPotential> base, double scale)
    : base_(std::move(base)), scale_(scale) {
    if (!base_) throw InvalidArgument("scaled potential needs a base potential");
    if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw InvalidArgument("radius scale must be positive");
}

std::string ScaledRadiusPotential::description() const {
    std::ostringstream os;
    os.precision(17);
    os << "scaled(" << scale_ << ", " << base_->description() << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// Tabulated potential

struct TabulatedPotential::Splines {
    std::vector<gsl_spline*> entries;

    ~Splines() {
        for (auto* s : entries) gsl_spline_free(s);
    }
};

TabulatedPotential::TabulatedPotential(std::vector<double> radii, std::vector<Eigen::MatrixXd> values,
                                       std::string source)
    : n_(0), radii_(std::move(radii)), splines_(std::make_unique<Splines>()), source_(std::move(source)) {
    if (radii_.size() < 3 || values.size() != radii_.size())
        throw InvalidArgument("tabulated potential needs at least 3 rows with one matrix per radius");
    n_ = static_cast<std::size_t>(values.front().rows());
    if (n_ == 0) throw InvalidArgument("tabulated potential matrices must be non-empty");
    for (std::size_t i = 0; i < radii_.size(); ++i) {
        if (values[i].rows() != values[i].cols() || static_cast<std::size_t>(values[i].rows()) != n_)
            throw InvalidArgument("tabulated potential matrices must all be N x N");
        if (!values[i].allFinite() || !std::isfinite(radii_[i]))
            throw InvalidArgument("tabulated potential contains non-finite values");
        if (i > 0 && !(radii_[i] > radii_[i - 1]))
            throw InvalidArgument("tabulated radii must be strictly increasing");
    }
    if (radii_.front() < 0.0) throw InvalidArgument("tabulated radii must be non-negative");

    gsl_set_error_handler_off();
    const auto n = static_cast<Eigen::Index>(n_);
    const std::size_t rows = radii_.size();
    last_ = values.back();
    tail_rate_.resize(n, n);
    std::vector<double> column(rows);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            for (std::size_t i = 0; i < rows; ++i) column[i] = values[i](a, b);
            gsl_spline* s = gsl_spline_alloc(gsl_interp_cspline, rows);
            if (s == nullptr || gsl_spline_init(s, radii_.data(), column.data(), rows) != GSL_SUCCESS) {
                if (s) gsl_spline_free(s);
                throw InvalidArgument("failed to build spline for tabulated potential");
            }
            splines_->entries.push_back(s);

            const double v1 = column[rows - 2];
            const double v2 = column[rows - 1];
            if (v2 == 0.0) {
                tail_rate_(a, b) = inf;
            } else if (v1 * v2 > 0.0 && std::abs(v2) < std::abs(v1)) {
                tail_rate_(a, b) = std::log(v1 / v2) / (radii_[rows - 1] - radii_[rows - 2]);
            } else {
                throw InvalidArgument("tabulated potential tail is not exponentially decaying");
            }
        }
    }
}

TabulatedPotential::~TabulatedPotential() = default;

void TabulatedPotential::evaluate_into(cplx r, Matrix& out) const {
    check_sector(r, 0.0);
    const double x = r.real();
    if (x < radii_.front()) throw InvalidArgument("radius below the first tabulated point");
    const auto n = static_cast<Eigen::Index>(n_);
    out.resize(n, n);
    const double r_last = radii_.back();
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            double v = 0.0;
            if (x <= r_last) {
                v = gsl_spline_eval(splines_->entries[static_cast<std::size_t>(a * n + b)], x, nullptr);
            } else if (std::isfinite(tail_rate_(a, b))) {
                v = last_(a, b) * std::exp(-tail_rate_(a, b) * (x - r_last));
            }
            out(a, b) = v;
        }
    }
}

std::unique_ptr<TabulatedPotential> TabulatedPotential::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open potential table: " + path.string());
    std::string line;
    std::size_t columns = 0;
    bool have_header = false;
    std::vector<double> radii;
    std::vector<Eigen::MatrixXd> values;
    std::size_t n = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            if (have_header) continue;
            std::istringstream hs(line.substr(first + 1));
            std::string tok;
            std::vector<std::string> names;
            while (hs >> tok) names.push_back(tok);
            columns = names.size();
            if (columns < 2 || names.front() != "r")
                throw InvalidArgument("potential table header must read '# r V11 V12 ...'");
            n = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(columns - 1))));
            if (n * n + 1 != columns) throw InvalidArgument("potential table header must list 1 + N^2 columns");
            have_header = true;
            continue;
        }
        if (!have_header) throw InvalidArgument("potential table is missing its '# r V11 ...' header");
        std::istringstream ls(line);
        std::vector<double> row;
        double v = 0.0;
        while (ls >> v) row.push_back(v);
        if (!ls.eof() || row.size() != columns)
            throw InvalidArgument("malformed potential table row at line " + std::to_string(line_no));
        radii.push_back(row[0]);
        Eigen::MatrixXd m(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) m(a, b) = row[1 + a * n + b];
        values.push_back(std::move(m));
    }
    if (!have_header) throw InvalidArgument("potential table is empty");
    return std::make_unique<TabulatedPotential>(std::move(radii), std::move(values), "table:" + path.string());
}

}  // namespace jost

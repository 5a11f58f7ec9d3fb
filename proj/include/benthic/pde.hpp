#ifndef BENTHIC_PDE_HPP
#define BENTHIC_PDE_HPP

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "benthic/errors.hpp"
#include "benthic/kinetics.hpp"
#include "benthic/parameters.hpp"

namespace benthic {

/// Node-based grid along one axis: n points from lo to hi inclusive.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    int n = 3;

    double h() const noexcept { return (hi - lo) / (n - 1); }
    double at(int i) const noexcept { return lo + (hi - lo) * i / (n - 1); }
    double length() const noexcept { return hi - lo; }

    bool operator==(const Axis&) const = default;
};

/// Rectangular 1D or 2D domain. Nodes are stored row-major: index = iy * nx + ix.
struct Domain {
    int dim = 1;
    Axis x;
    Axis y{0.0, 0.0, 1};

    static Domain line(double lo, double hi, int n) {
        Domain d;
        d.dim = 1;
        d.x = {lo, hi, n};
        d.validate();
        return d;
    }

    static Domain rect(double xlo, double xhi, int nx, double ylo, double yhi, int ny) {
        Domain d;
        d.dim = 2;
        d.x = {xlo, xhi, nx};
        d.y = {ylo, yhi, ny};
        d.validate();
        return d;
    }

    int nx() const noexcept { return x.n; }
    int ny() const noexcept { return dim == 2 ? y.n : 1; }
    int size() const noexcept { return nx() * ny(); }
    int index(int ix, int iy) const noexcept { return iy * nx() + ix; }

    void validate() const {
        if (dim != 1 && dim != 2) throw MismatchError("domain dimension must be 1 or 2");
        auto check = [](const Axis& a) {
            if (a.n < 3) throw MismatchError("a grid axis needs at least 3 points");
            if (!(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
                throw MismatchError("grid axis extents must be finite and increasing");
            }
        };
        check(x);
        if (dim == 2) check(y);
    }

    bool operator==(const Domain&) const = default;
};

/// Number of nodes per axis that gives at least `per_wavelength` points per wavelength 2 pi / k.
inline int nodes_for(double length, double k, int per_wavelength = 16) {
    const double waves = length * k / (2.0 * std::numbers::pi);
    return std::max(3, static_cast<int>(std::ceil(waves * per_wavelength)) + 1);
}

/// Bacteria and nutrient values on a domain, with an optional per-node balancing rate.
struct Field {
    Domain domain;
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    std::optional<Eigen::VectorXd> sigma;

    static Field uniform(const Domain& d, const StateVector& w) {
        d.validate();
        return {d, Eigen::VectorXd::Constant(d.size(), w.u), Eigen::VectorXd::Constant(d.size(), w.v), std::nullopt};
    }

    /// Stacked unknown [u; v] of length 2N.
    Eigen::VectorXd stacked() const {
        Eigen::VectorXd z(2 * u.size());
        z << u, v;
        return z;
    }

    static Field from_stacked(const Domain& d, const Eigen::VectorXd& z, std::optional<Eigen::VectorXd> sigma = {}) {
        const int n = d.size();
        if (z.size() != 2 * n) throw MismatchError("stacked vector does not match the domain");
        return {d, z.head(n), z.tail(n), std::move(sigma)};
    }

    void check() const {
        const auto n = static_cast<Eigen::Index>(domain.size());
        if (u.size() != n || v.size() != n || (sigma && sigma->size() != n)) {
            throw MismatchError("field length does not match the domain");
        }
        if (!u.allFinite() || !v.allFinite()) throw DomainError("field has non-finite entries");
    }

    double sigma_at(int i, const ParameterSet& p) const { return sigma ? (*sigma)[i] : p.sigma; }

    /// Coordinates of node i.
    std::array<double, 2> coords(int i) const {
        const int ix = i % domain.nx(), iy = i / domain.nx();
        return {domain.x.at(ix), domain.dim == 2 ? domain.y.at(iy) : 0.0};
    }
};

using SparseOperator = Eigen::SparseMatrix<double>;

namespace detail {

inline void laplacian_1d_triplets(const Axis& a, int stride, int repeat, int outer_stride,
                                  std::vector<Eigen::Triplet<double>>& t) {
    const double w = 1.0 / (a.h() * a.h());
    for (int r = 0; r < repeat; ++r) {
        const int base = r * outer_stride;
        for (int i = 0; i < a.n; ++i) {
            const int row = base + i * stride;
            t.emplace_back(row, row, -2.0 * w);
            // mirror ghost nodes: u_{-1} = u_1, u_n = u_{n-2}
            const int left = i == 0 ? 1 : i - 1;
            const int right = i == a.n - 1 ? a.n - 2 : i + 1;
            t.emplace_back(row, base + left * stride, w);
            t.emplace_back(row, base + right * stride, w);
        }
    }
}

}  // namespace detail

/// Second-order Neumann Laplacian on the N nodes of the domain.
inline SparseOperator assemble_laplacian(const Domain& d) {
    d.validate();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(d.size()) * (d.dim == 2 ? 6 : 3));
    detail::laplacian_1d_triplets(d.x, 1, d.ny(), d.nx(), t);
    if (d.dim == 2) detail::laplacian_1d_triplets(d.y, d.nx(), d.nx(), 1, t);
    SparseOperator L(d.size(), d.size());
    L.setFromTriplets(t.begin(), t.end());
    L.makeCompressed();
    return L;
}

/// Operator cache for repeated residual and Jacobian evaluations on one domain.
class Discretization {
public:
    explicit Discretization(const Domain& d) : domain_(d), lap_(assemble_laplacian(d)) {}

    const Domain& domain() const noexcept { return domain_; }
    const SparseOperator& laplacian() const noexcept { return lap_; }

    /// f(w) + D Lap w, stacked [u; v].
    Eigen::VectorXd residual(const Field& w, const ParameterSet& p) const {
        require(w);
        const int n = domain_.size();
        Eigen::VectorXd r(2 * n);
        r.head(n) = lap_ * w.u;
        r.tail(n) = p.delta() * (lap_ * w.v);
        ParameterSet q = p;
        for (int i = 0; i < n; ++i) {
            q.sigma = w.sigma_at(i, p);
            StateVector f;
            try {
                f = reaction({w.u[i], w.v[i]}, q);
            } catch (const DomainError& e) {
                throw DomainError(std::string(e.what()) + " at node " + std::to_string(i));
            }
            r[i] += f.u;
            r[n + i] += f.v;
        }
        return r;
    }

    /// Jacobian of residual: per-node kinetics blocks plus diag(1, delta) (x) Lap.
    SparseOperator jacobian(const Field& w, const ParameterSet& p) const {
        require(w);
        const int n = domain_.size();
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(2 * lap_.nonZeros() + 4 * n));
        for (int k = 0; k < lap_.outerSize(); ++k) {
            for (SparseOperator::InnerIterator it(lap_, k); it; ++it) {
                t.emplace_back(it.row(), it.col(), it.value());
                t.emplace_back(n + it.row(), n + it.col(), p.delta() * it.value());
            }
        }
        ParameterSet q = p;
        for (int i = 0; i < n; ++i) {
            q.sigma = w.sigma_at(i, p);
            Eigen::Matrix2d J;
            try {
                J = DerivativeTensor({w.u[i], w.v[i]}, q).jacobian();
            } catch (const DomainError& e) {
                throw DomainError(std::string(e.what()) + " at node " + std::to_string(i));
            }
            t.emplace_back(i, i, J(0, 0));
            t.emplace_back(i, n + i, J(0, 1));
            t.emplace_back(n + i, i, J(1, 0));
            t.emplace_back(n + i, n + i, J(1, 1));
        }
        SparseOperator A(2 * n, 2 * n);
        A.setFromTriplets(t.begin(), t.end());
        A.makeCompressed();
        return A;
    }

    /// d residual / d sigma at fixed field (uniform sigma only).
    Eigen::VectorXd sigma_derivative(const Field& w, const ParameterSet& p) const {
        const int n = domain_.size();
        Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * n);
        r.tail(n) = (p.v0 - w.v.array()).matrix();
        return r;
    }

private:
    void require(const Field& w) const {
        if (!(w.domain == domain_)) throw MismatchError("field lives on a different domain");
        w.check();
    }

    Domain domain_;
    SparseOperator lap_;
};

inline Eigen::VectorXd residual(const Field& w, const ParameterSet& p) { return Discretization(w.domain).residual(w, p); }

inline SparseOperator jacobian(const Field& w, const ParameterSet& p) { return Discretization(w.domain).jacobian(w, p); }

/// Trapezoidal quadrature weights, normalized to sum 1.
inline Eigen::VectorXd quadrature_weights(const Domain& d) {
    auto axis_weights = [](const Axis& a) {
        Eigen::VectorXd w = Eigen::VectorXd::Ones(a.n);
        w[0] = w[a.n - 1] = 0.5;
        return w;
    };
    const Eigen::VectorXd wx = axis_weights(d.x);
    Eigen::VectorXd w(d.size());
    if (d.dim == 1) {
        w = wx;
    } else {
        const Eigen::VectorXd wy = axis_weights(d.y);
        for (int iy = 0; iy < d.ny(); ++iy)
            for (int ix = 0; ix < d.nx(); ++ix) w[d.index(ix, iy)] = wx[ix] * wy[iy];
    }
    return w / w.sum();
}

struct Norms {
    double l1 = 0.0, l2 = 0.0, l8 = 0.0;
};

struct FieldNorms {
    Norms u;
    Norms v;
};

/// Domain-averaged L1, L2 and L8 norms of one component.
inline Norms averaged_norms(const Eigen::VectorXd& values, const Eigen::VectorXd& weights) {
    const Eigen::ArrayXd a = values.array().abs();
    // scale by the maximum before the 8th power to avoid underflow
    const double top = a.maxCoeff();
    if (top == 0.0) return {};
    const Eigen::ArrayXd s = a / top;
    const Eigen::ArrayXd w = weights.array();
    return {(w * a).sum(), std::sqrt((w * a * a).sum()), top * std::pow((w * s.pow(8)).sum(), 0.125)};
}

inline FieldNorms norms(const Field& w) {
    w.check();
    const Eigen::VectorXd q = quadrature_weights(w.domain);
    return {averaged_norms(w.u, q), averaged_norms(w.v, q)};
}

/// sigma(y) = s0 / (1 + exp(rate (y - y0))) at every node; uses x on 1D domains.
inline Eigen::VectorXd sigma_profile(const Domain& d, double s0 = 0.128, double rate = 0.011, double y0 = 480.0) {
    if (!(s0 > 0.0)) throw DomainError("sigma profile amplitude must be positive");
    Eigen::VectorXd out(d.size());
    for (int i = 0; i < d.size(); ++i) {
        const double y = d.dim == 2 ? d.y.at(i / d.nx()) : d.x.at(i);
        out[i] = s0 / (1.0 + std::exp(rate * (y - y0)));
    }
    return out;
}

/// Writes the text dump: `# dim`, `# extents`, `# shape` headers, then `x [y] u v [sigma]` per node.
inline void write_field(std::ostream& os, const Field& w) {
    w.check();
    const Domain& d = w.domain;
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    os << "# dim " << d.dim << "\n# extents " << num(d.x.lo) << ' ' << num(d.x.hi);
    if (d.dim == 2) os << ' ' << num(d.y.lo) << ' ' << num(d.y.hi);
    os << "\n# shape " << d.nx();
    if (d.dim == 2) os << ' ' << d.ny();
    os << '\n';
    for (int i = 0; i < d.size(); ++i) {
        const auto c = w.coords(i);
        os << num(c[0]);
        if (d.dim == 2) os << ' ' << num(c[1]);
        os << ' ' << num(w.u[i]) << ' ' << num(w.v[i]);
        if (w.sigma) os << ' ' << num((*w.sigma)[i]);
        os << '\n';
    }
}

inline Field read_field(std::istream& is) {
    std::string line, tag, key;
    Domain d;
    std::vector<double> ext;
    std::vector<int> shape;
    for (int h = 0; h < 3; ++h) {
        if (!std::getline(is, line)) throw MismatchError("field dump: truncated header");
        std::istringstream ls(line);
        ls >> tag >> key;
        if (tag != "#") throw MismatchError("field dump: expected header line, got '" + line + "'");
        if (key == "dim") {
            ls >> d.dim;
        } else if (key == "extents") {
            for (double x; ls >> x;) ext.push_back(x);
        } else if (key == "shape") {
            for (int n; ls >> n;) shape.push_back(n);
        } else {
            throw MismatchError("field dump: unknown header '" + key + "'");
        }
    }
    if (static_cast<int>(ext.size()) != 2 * d.dim || static_cast<int>(shape.size()) != d.dim) {
        throw MismatchError("field dump: header does not match dimension");
    }
    d.x = {ext[0], ext[1], shape[0]};
    if (d.dim == 2) d.y = {ext[2], ext[3], shape[1]};
    d.validate();
    Field w{d, Eigen::VectorXd(d.size()), Eigen::VectorXd(d.size()), std::nullopt};
    Eigen::VectorXd sig(d.size());
    bool has_sigma = false;
    for (int i = 0; i < d.size(); ++i) {
        if (!std::getline(is, line)) throw MismatchError("field dump: fewer rows than nodes");
        std::istringstream ls(line);
        std::vector<double> vals;
        for (double x; ls >> x;) vals.push_back(x);
        const int base = d.dim;
        const int cols = static_cast<int>(vals.size());
        if (cols != base + 2 && cols != base + 3) throw MismatchError("field dump: bad row '" + line + "'");
        if (i == 0) has_sigma = cols == base + 3;
        if (has_sigma != (cols == base + 3)) throw MismatchError("field dump: inconsistent sigma column");
        w.u[i] = vals[base];
        w.v[i] = vals[base + 1];
        if (has_sigma) sig[i] = vals[base + 2];
    }
    if (has_sigma) w.sigma = sig;
    return w;
}

}  // namespace benthic

#endif

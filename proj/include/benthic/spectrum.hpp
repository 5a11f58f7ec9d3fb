#ifndef BENTHIC_SPECTRUM_HPP
#define BENTHIC_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <arpack/arpack.hpp>
// complex.h, pulled in by the ARPACK header, defines I as a macro
#ifdef I
#undef I
#endif

#include "benthic/errors.hpp"
#include "benthic/pde.hpp"

namespace benthic {

struct SpectrumOptions {
    int nev = 8;
    double shift = 0.05;        // shift-invert target, above the top of the spectrum
    int dense_limit = 300;      // operators up to this size go to a dense QR solve
    double tol = 1e-13;         // ARPACK Ritz tolerance
    int max_iter = 5000;
    std::uint64_t seed = 20240531;
};

/// Eigenvalues sorted by descending real part with matching eigenvectors in the columns.
struct Spectrum {
    std::vector<std::complex<double>> values;
    Eigen::MatrixXcd vectors;

    int n_unstable(double tol = 0.0) const {
        return static_cast<int>(std::count_if(values.begin(), values.end(), [&](auto z) { return z.real() > tol; }));
    }
    double max_real() const { return values.empty() ? -INFINITY : values.front().real(); }
};

namespace detail {

inline Spectrum sorted_subset(const Eigen::VectorXcd& vals, const Eigen::MatrixXcd& vecs, int nev) {
    std::vector<int> order(vals.size());
    std::iota(order.begin(), order.end(), 0);
    // ties broken by the imaginary part so conjugate pairs come out in a fixed order
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals[a].real() != vals[b].real()) return vals[a].real() > vals[b].real();
        return vals[a].imag() > vals[b].imag();
    });
    const int m = std::min<int>(nev, static_cast<int>(order.size()));
    Spectrum s;
    s.vectors.resize(vecs.rows(), m);
    for (int i = 0; i < m; ++i) {
        s.values.push_back(vals[order[i]]);
        Eigen::VectorXcd v = vecs.col(order[i]);
        // unit norm, largest component real positive
        Eigen::Index top;
        v.cwiseAbs().maxCoeff(&top);
        v *= std::conj(v[top]) / std::abs(v[top]) / v.norm();
        s.vectors.col(i) = v;
    }
    return s;
}

inline Spectrum dense_spectrum(const SparseOperator& A, int nev) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(A), true);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigen decomposition failed");
    return sorted_subset(es.eigenvalues(), es.eigenvectors(), nev);
}

/// Eigenvalues of A nearest the real shift s, by ARPACK in shift-invert mode.
inline Spectrum arpack_near(const SparseOperator& A, double s, int want, const SpectrumOptions& o) {
    const int n = static_cast<int>(A.rows());
    SparseOperator M = A;
    for (int i = 0; i < n; ++i) M.coeffRef(i, i) -= s;
    M.makeCompressed();
    Eigen::SparseLU<SparseOperator> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success) throw ConvergenceError("shift-invert factorization failed at shift " + std::to_string(s));

    const a_int nev = want;
    const a_int ncv = std::min<a_int>(n, std::max<a_int>(2 * nev + 1, 40));
    const a_int lworkl = 3 * ncv * ncv + 6 * ncv;
    std::vector<double> resid(n), v(static_cast<std::size_t>(n) * ncv), workd(3 * n), workl(lworkl);
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto& r : resid) r = uni(rng);
    a_int iparam[11] = {1, 0, o.max_iter, 1, 0, 0, 3, 0, 0, 0, 0};
    a_int ipntr[14] = {};
    a_int ido = 0, info = 1;
    Eigen::VectorXd x(n);
    while (true) {
        arpack::naupd(ido, arpack::bmat::identity, n, arpack::which::largest_magnitude, nev, o.tol, resid.data(), ncv,
                      v.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, info);
        if (ido != -1 && ido != 1) break;
        x = Eigen::Map<const Eigen::VectorXd>(&workd[ipntr[0] - 1], n);
        Eigen::Map<Eigen::VectorXd>(&workd[ipntr[1] - 1], n) = lu.solve(x);
    }
    if (info < 0 || info == 1) {
        throw ConvergenceError("ARPACK did not converge (info " + std::to_string(info) + ")");
    }
    // Schur basis of the converged invariant subspace; the eigenpairs of J itself are then
    // recovered by a Rayleigh-Ritz step on that basis.
    std::vector<a_int> select(ncv);
    std::vector<double> dr(nev + 1), di(nev + 1), workev(3 * ncv);
    a_int rinfo = 0;
    arpack::neupd(1, arpack::howmny::schur_vectors, select.data(), dr.data(), di.data(), v.data(), n, s, 0.0,
                  workev.data(), arpack::bmat::identity, n, arpack::which::largest_magnitude, nev, o.tol,
                  resid.data(), ncv, v.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, rinfo);
    if (rinfo != 0) throw ConvergenceError("ARPACK Schur extraction failed (info " + std::to_string(rinfo) + ")");
    const int got = static_cast<int>(iparam[4]);
    const Eigen::MatrixXd Q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::Map<const Eigen::MatrixXd>(v.data(), n, got)).householderQ() *
        Eigen::MatrixXd::Identity(n, got);
    const Eigen::MatrixXd B = Q.transpose() * (A * Q);
    Eigen::EigenSolver<Eigen::MatrixXd> es(B, true);
    if (es.info() != Eigen::Success) throw ConvergenceError("Rayleigh-Ritz step failed");
    const Eigen::VectorXcd vals = es.eigenvalues();
    const Eigen::MatrixXcd vecs = Q.cast<std::complex<double>>() * es.eigenvectors();
    return sorted_subset(vals, vecs, got);
}

}  // namespace detail

/// The `nev` eigenvalues of A with the largest real parts. Large operators use shift-invert
/// around `shift` with a buffer of extra Ritz values, then keep the top `nev` by real part.
inline Spectrum leading_spectrum(const SparseOperator& A, const SpectrumOptions& o = {}) {
    if (A.rows() != A.cols()) throw MismatchError("spectrum of a non-square operator");
    if (A.rows() <= o.dense_limit) return detail::dense_spectrum(A, o.nev);
    const int want = std::min<int>(static_cast<int>(A.rows()) - 2, std::max(2 * o.nev, o.nev + 8));
    Spectrum s = detail::arpack_near(A, o.shift, want, o);
    if (static_cast<int>(s.values.size()) > o.nev) {
        s.values.resize(o.nev);
        s.vectors = s.vectors.leftCols(o.nev).eval();
    }
    return s;
}

/// The `count` eigenvalues nearest the real shift s (dense for small operators).
inline Spectrum spectrum_near(const SparseOperator& A, double s, int count, const SpectrumOptions& o = {}) {
    Spectrum all;
    if (A.rows() <= o.dense_limit) {
        all = detail::dense_spectrum(A, static_cast<int>(A.rows()));
    } else {
        all = detail::arpack_near(A, s, std::min<int>(static_cast<int>(A.rows()) - 2, count + 4), o);
    }
    std::vector<int> idx(all.values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return std::abs(all.values[a] - s) < std::abs(all.values[b] - s); });
    Spectrum out;
    const int m = std::min<int>(count, static_cast<int>(idx.size()));
    out.vectors.resize(A.rows(), m);
    for (int i = 0; i < m; ++i) {
        out.values.push_back(all.values[idx[i]]);
        out.vectors.col(i) = all.vectors.col(idx[i]);
    }
    return out;
}

struct TransverseSample {
    double kz = 0.0;
    double max_real = 0.0;
};

/// Quantized transverse wavenumbers n pi / (2 lz), n = 0..count-1, for a slab of thickness 2 lz.
inline std::vector<double> transverse_wavenumbers(double lz, int count) {
    if (!(lz > 0.0) || count < 1) throw DomainError("transverse slab needs lz > 0 and at least one mode");
    std::vector<double> k(count);
    for (int n = 0; n < count; ++n) k[n] = n * std::numbers::pi / (2.0 * lz);
    return k;
}

/// Largest real part of the spectrum of J - diag(1, delta) kz^2 for each kz.
inline std::vector<TransverseSample> transverse_spectrum(const SparseOperator& J, double delta,
                                                         const std::vector<double>& kz_list,
                                                         const SpectrumOptions& o = {}) {
    const int n = static_cast<int>(J.rows()) / 2;
    std::vector<TransverseSample> out;
    SpectrumOptions one = o;
    one.nev = std::min(o.nev, 4);
    for (double kz : kz_list) {
        SparseOperator M = J;
        for (int i = 0; i < n; ++i) {
            M.coeffRef(i, i) -= kz * kz;
            M.coeffRef(n + i, n + i) -= delta * kz * kz;
        }
        try {
            out.push_back({kz, leading_spectrum(M, one).max_real()});
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(std::string(e.what()) + " at kz = " + std::to_string(kz));
        }
    }
    return out;
}

}  // namespace benthic

#endif
